#include "lorentz/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace lorentz;

namespace {

Json parse(const char* text) { return Json::parse(text); }

const char* kUnilateral = R"({
  "space": {"family": "unilateral_shift", "base": "1/2"},
  "analyses": ["li_yorke"],
  "candidates": [[21]]
})";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config defaults materialize into the normalized echo") {
    AnalysisConfig cfg = parse_config(parse(kUnilateral));
    CHECK(cfg.horizon == 64);
    CHECK(cfg.window == 256);
    CHECK(cfg.thresholds.low == make_rational(1, 1000000));
    CHECK(cfg.thresholds.high == make_rational(1000000));
    CHECK(cfg.divergence == make_rational(2));
    REQUIRE(cfg.indices.size() == 1);
    CHECK(index_p_string(cfg.indices[0]) == "2");
    CHECK(index_q_string(cfg.indices[0]) == "2");
    CHECK(cfg.tau.has_value());
    CHECK_FALSE(cfg.multiplier.has_value());

    const Json& echo = cfg.normalized;
    CHECK(echo.at("schema_version") == 1);
    CHECK(echo.at("horizon") == 64);
    CHECK(echo.at("window") == 256);
    CHECK(echo.at("thresholds").at("low") == "1/1000000");
    CHECK(echo.at("thresholds").at("divergence") == "2");
    CHECK(echo.at("indices") == Json::array({Json::array({"2", "2"})}));
    // the echo itself must re-parse to the same normalized form
    AnalysisConfig again = parse_config(echo);
    CHECK(again.normalized.dump() == echo.dump());
}

TEST_CASE("config rejects malformed documents with schema errors") {
    auto reject = [](const char* text, const char* fragment) {
        try {
            parse_config(parse(text));
            FAIL("expected SchemaError for: " << text);
        } catch (const SchemaError& e) {
            INFO(e.what());
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };

    reject(R"({"analyses": ["li_yorke"]})", "missing field 'space'");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"}})",
           "missing field 'analyses'");
    reject(R"({"space": {"family": "nope"}, "analyses": ["li_yorke"]})", "unknown builtin");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "analyses": ["li_yorke"], "horizont": 3})",
           "unknown field 'horizont'");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "analyses": ["parity_check"]})",
           "unsupported analysis name");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "analyses": ["li_yorke"], "horizon": 0})",
           "horizon");
    reject(R"({"space": {"family": "unilateral_shift", "base": 0.5},
               "analyses": ["li_yorke"]})",
           "floating-point");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "analyses": ["norm"], "indices": [["1", "2"]]})",
           "p must exceed 1");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "analyses": ["li_yorke"], "schema_version": 2})",
           "schema_version");
    reject(R"({"space": {"family": "two_row_fiber", "base": "1/2"},
               "analyses": ["li_yorke"]})",
           "no base");
    reject(R"({"space": {"atoms": [{"id": 1, "weight": "0"}]},
               "analyses": ["li_yorke"]})",
           "positive");
    reject(R"({"space": {"atoms": [{"id": 1, "weight": "1"}]},
               "map": {"kind": "shift"}, "analyses": ["li_yorke"]})",
           "builtin family");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "map": {"kind": "table", "pairs": [[1, 2]]}, "analyses": ["li_yorke"]})",
           "explicit finite space");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "analyses": ["li_yorke"],
               "thresholds": {"low": "2", "high": "1"}})",
           "smaller");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "analyses": ["li_yorke"], "candidates": []})",
           "candidates");
    reject(R"({"space": {"family": "unilateral_shift", "base": "1/2"},
               "analyses": ["norm"], "function": [[1, "-2"]]})",
           "negative");
    CHECK_THROWS_AS(parse_config_text("{nope"), SchemaError);
}

TEST_CASE("explicit spaces take table maps and multipliers") {
    Json doc = parse(R"({
      "space": {"atoms": [{"id": 1, "weight": "1/2"}, {"id": 2, "weight": "1/2"}]},
      "map": {"kind": "table", "pairs": [[1, 2], [2, 1]]},
      "analyses": ["li_yorke"]
    })");
    AnalysisConfig cfg = parse_config(doc);
    REQUIRE(cfg.tau.has_value());
    CHECK(cfg.tau->invertible);
    CHECK(cfg.tau->forward(AtomId(1)) == AtomId(2));

    Json mdoc = parse(R"({
      "space": {"atoms": [{"id": 1, "weight": "1/2"}, {"id": 2, "weight": "1/2"}]},
      "map": {"kind": "multiplier", "values": [[1, "-3"]], "default": "1"},
      "analyses": ["multiplication"]
    })");
    AnalysisConfig mcfg = parse_config(mdoc);
    CHECK_FALSE(mcfg.tau.has_value());
    REQUIRE(mcfg.multiplier.has_value());
    CHECK(mcfg.multiplier->magnitude_at(AtomId(1)) == make_rational(3));
    CHECK(mcfg.multiplier->magnitude_at(AtomId(2)) == make_rational(1));
}

TEST_CASE("run produces one entry per analysis and index, and errors stay local") {
    Json doc = parse(R"({
      "space": {"family": "unilateral_shift", "base": "1/2"},
      "analyses": ["norm", "li_yorke", "expansive_invertible"],
      "candidates": [[21]],
      "indices": [["2", "2"], ["3", "1"]]
    })");
    Json rep = run(parse_config(doc));
    CHECK(rep.at("schema_version") == 1);
    CHECK(rep.at("tool").at("name") == "ldyn");
    const Json& entries = rep.at("analyses");
    REQUIRE(entries.size() == 4); // norm twice (per index), li_yorke, expansive_invertible

    // norm has no function configured: a local error, not a thrown one
    CHECK(entries[0].at("analysis") == "norm");
    CHECK(entries[0].at("index") == "2,2");
    CHECK(entries[0].contains("error"));
    CHECK(entries[1].at("index") == "3,1");
    CHECK(entries[1].contains("error"));
    // the shift is not invertible: again a local error
    CHECK(entries[3].at("analysis") == "expansive_invertible");
    CHECK(entries[3].contains("error"));
    // li_yorke still ran and confirmed
    CHECK(entries[2].at("analysis") == "li_yorke");
    CHECK(entries[2].at("verdict").at("status") == "CONFIRMED");
}

TEST_CASE("reports replay byte-identically and tampering is located") {
    Json doc = parse(R"({
      "space": {"family": "two_row_fiber"},
      "analyses": ["li_yorke", "sufficient_condition"],
      "candidates": [[[0, 0]], [[-1, 0]]],
      "horizon": 48
    })");
    Json rep = run(parse_config(doc));
    CHECK_FALSE(verify_report(rep).has_value());

    // a report that took a round trip through text still replays
    Json reparsed = Json::parse(rep.dump(2));
    CHECK_FALSE(verify_report(reparsed).has_value());

    Json tampered = reparsed;
    tampered["analyses"][0]["verdict"]["status"] = "CONFIRMED";
    std::optional<std::string> diff = verify_report(tampered);
    REQUIRE(diff.has_value());
    CHECK(diff->find("/analyses/0/verdict/status") != std::string::npos);

    Json gutted = reparsed;
    gutted.erase("analyses");
    CHECK_THROWS_AS(verify_report(gutted), SchemaError);
}

TEST_CASE("orbit traces export as CSV with exact measures") {
    Json doc = parse(R"({
      "space": {"family": "bilateral_shift", "base": "1/2"},
      "analyses": ["orbit"],
      "function": [[0, "1"]],
      "horizon": 3
    })");
    AnalysisConfig cfg = parse_config(doc);
    OrbitTrace tr = compute_orbit_trace(cfg, cfg.indices.front());
    REQUIRE(tr.entries.size() == 4);

    std::string path = "report_test_orbit.csv";
    export_orbit_csv(tr, path);
    std::string text = read_file(path);
    std::remove(path.c_str());

    std::istringstream lines(text);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "n,measure_num,measure_den,norm,norm_abs_error");
    REQUIRE(std::getline(lines, line));
    CHECK(line.rfind("0,1,1,", 0) == 0); // mu({0}) = 1 exactly
    REQUIRE(std::getline(lines, line));
    CHECK(line.rfind("1,2,1,", 0) == 0); // preimage {-1} has weight 2
    REQUIRE(std::getline(lines, line));
    CHECK(line.rfind("2,4,1,", 0) == 0);

    CHECK_THROWS_AS(export_orbit_csv(OrbitTrace{}, path), std::invalid_argument);
    CHECK_THROWS_AS(export_orbit_csv(tr, ""), std::invalid_argument);
    CHECK_THROWS_AS(export_orbit_csv(tr, "no_such_dir/x.csv"), std::runtime_error);
}

TEST_CASE("defaulted candidates and samples come from the leading window atoms") {
    Json doc = parse(R"({
      "space": {"family": "unilateral_shift", "base": "1/2"},
      "analyses": ["li_yorke", "divergence_probe"],
      "horizon": 16
    })");
    Json rep = run(parse_config(doc));
    const Json& entries = rep.at("analyses");
    REQUIRE(entries.size() == 2);
    // shallow singletons are all tame at this base: refuted, not an error
    CHECK(entries[0].at("verdict").at("status") == "REFUTED");
    // the two default indicator samples die under the backward shift
    CHECK(entries[1].at("verdict").at("status") == "REFUTED");
    CHECK_FALSE(entries[0].contains("error"));
    CHECK_FALSE(entries[1].contains("error"));
}
