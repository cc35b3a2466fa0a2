#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>

namespace lorentz {

/// Identifier of a single atom.  Two shapes are supported: plain integers
/// (used by the shift/valley families and finite spaces) and integer pairs
/// (used by the two-dimensional builtin family).  A space never mixes the
/// two shapes, but the ordering below is total regardless.
struct AtomId {
    std::int64_t a = 0;
    std::int64_t b = 0;
    bool is_pair = false;

    AtomId() = default;
    explicit AtomId(std::int64_t i) : a(i), b(0), is_pair(false) {}
    AtomId(std::int64_t x, std::int64_t y) : a(x), b(y), is_pair(true) {}

    friend bool operator==(const AtomId&, const AtomId&) = default;
};

/// Canonical enumeration key.  Integers are ordered by distance from the
/// origin with the negative element first (0, -1, 1, -2, 2, ...); pairs by
/// (|a+b|, a, b).  Integers sort before pairs.
inline std::tuple<int, std::int64_t, std::int64_t, std::int64_t>
canonical_key(const AtomId& id) {
    if (!id.is_pair) {
        std::int64_t m = id.a < 0 ? -id.a : id.a;
        return {0, m, id.a, 0};
    }
    std::int64_t s = id.a + id.b;
    if (s < 0) s = -s;
    return {1, s, id.a, id.b};
}

inline bool operator<(const AtomId& x, const AtomId& y) {
    return canonical_key(x) < canonical_key(y);
}

inline std::string atom_to_string(const AtomId& id) {
    if (!id.is_pair) return std::to_string(id.a);
    return "(" + std::to_string(id.a) + "," + std::to_string(id.b) + ")";
}

inline AtomId atom_from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty atom literal");
    auto parse_int = [](std::string_view t) -> std::int64_t {
        if (t.empty()) throw std::invalid_argument("empty integer in atom literal");
        size_t pos = 0;
        long long v = std::stoll(std::string(t), &pos);
        if (pos != t.size()) throw std::invalid_argument("trailing junk in atom literal");
        return v;
    };
    if (s.front() == '(') {
        if (s.back() != ')') throw std::invalid_argument("unterminated atom pair");
        std::string_view body = s.substr(1, s.size() - 2);
        auto comma = body.find(',');
        if (comma == std::string_view::npos)
            throw std::invalid_argument("atom pair needs two components");
        return AtomId(parse_int(body.substr(0, comma)), parse_int(body.substr(comma + 1)));
    }
    return AtomId(parse_int(s));
}

struct AtomIdHash {
    std::size_t operator()(const AtomId& id) const {
        std::size_t h = std::hash<std::int64_t>{}(id.a);
        h ^= std::hash<std::int64_t>{}(id.b) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h ^ (id.is_pair ? 0x517cc1b727220a95ull : 0);
    }
};

} // namespace lorentz
