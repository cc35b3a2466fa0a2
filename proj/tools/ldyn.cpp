// ldyn: analyze composition and multiplication operators on Lorentz
// sequence spaces from a JSON config, emit certified reports, and replay
// reports for verification.
//
// Exit codes:
//   0  success
//   2  config or report document rejected (schema / parse / read error)
//   3  a requested analysis could not run (missing inputs, precondition)
//   4  verify: report does not replay byte-identically

#include <lorentz.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lorentz::SchemaError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

lorentz::Json parse_json_file(const std::string& path) {
    lorentz::Json doc =
        lorentz::Json::parse(slurp(path), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
        throw lorentz::SchemaError("'" + path + "' is not valid JSON");
    return doc;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

int run_analyze(const std::string& config_path) {
    lorentz::AnalysisConfig cfg = lorentz::parse_config(parse_json_file(config_path));
    lorentz::Json report = lorentz::run(cfg);

    bool failed = false;
    for (const auto& entry : report.at("analyses"))
        if (entry.contains("error")) {
            failed = true;
            std::cerr << "ldyn: analysis '" << entry.at("analysis").get<std::string>()
                      << "' failed: " << entry.at("error").get<std::string>() << "\n";
        }

    std::string text = report.dump(2);
    std::cout << text << "\n";
    if (!cfg.report_path.empty()) {
        write_text(cfg.report_path, text + "\n");
        std::cerr << "ldyn: report written to " << cfg.report_path << "\n";
    }
    if (!cfg.orbit_csv_path.empty()) {
        bool orbit_ok = false;
        for (const auto& entry : report.at("analyses"))
            if (entry.at("analysis") == "orbit" && !entry.contains("error")) orbit_ok = true;
        if (orbit_ok) {
            lorentz::export_orbit_csv(
                lorentz::compute_orbit_trace(cfg, cfg.indices.front()), cfg.orbit_csv_path);
            std::cerr << "ldyn: orbit trace written to " << cfg.orbit_csv_path << "\n";
        }
    }
    return failed ? 3 : 0;
}

int run_orbit(const std::string& config_path) {
    lorentz::AnalysisConfig cfg = lorentz::parse_config(parse_json_file(config_path));
    if (!cfg.function) {
        std::cerr << "ldyn: orbit needs a 'function' in the config\n";
        return 3;
    }
    if (cfg.orbit_csv_path.empty()) {
        std::cerr << "ldyn: orbit needs output.orbit_csv in the config\n";
        return 3;
    }
    lorentz::OrbitTrace tr;
    try {
        tr = lorentz::compute_orbit_trace(cfg, cfg.indices.front());
    } catch (const std::invalid_argument& e) {
        std::cerr << "ldyn: " << e.what() << "\n";
        return 3;
    }
    lorentz::export_orbit_csv(tr, cfg.orbit_csv_path);
    std::cout << "orbit: " << tr.entries.size() << " iterates under L^{"
              << lorentz::index_p_string(cfg.indices.front()) << ","
              << lorentz::index_q_string(cfg.indices.front()) << "} written to "
              << cfg.orbit_csv_path << "\n";
    const lorentz::OrbitEntry& last = tr.entries.back();
    std::cout << "  final step n=" << last.n
              << " support measure=" << lorentz::rat_to_string(last.support_measure)
              << " norm=" << lorentz::real_to_string(last.norm.value, 12) << "\n";
    return 0;
}

int run_norm(const std::string& config_path) {
    lorentz::AnalysisConfig cfg = lorentz::parse_config(parse_json_file(config_path));
    if (!cfg.function) {
        std::cerr << "ldyn: norm needs a 'function' in the config\n";
        return 3;
    }
    for (const lorentz::LorentzIndex& idx : cfg.indices) {
        lorentz::CertifiedReal n = lorentz::lorentz_norm(cfg.space, *cfg.function, idx);
        std::cout << "L^{" << lorentz::index_p_string(idx) << ","
                  << lorentz::index_q_string(idx)
                  << "} norm = " << lorentz::real_to_string(n.value)
                  << "  (abs error <= " << lorentz::real_to_string(n.abs_error, 6) << ")\n";
    }
    return 0;
}

int run_verify(const std::string& report_path) {
    std::optional<std::string> mismatch =
        lorentz::verify_report(parse_json_file(report_path));
    if (mismatch) {
        std::cerr << "ldyn: " << *mismatch << "\n";
        return 4;
    }
    std::cout << "verified: report replays byte-identically\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified chaos and expansivity analysis of composition "
                 "operators on Lorentz sequence spaces"};
    app.require_subcommand(1);

    std::string analyze_cfg, orbit_cfg, norm_cfg, verify_path;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "run the analyses requested by a JSON config and print the report");
    analyze->add_option("config", analyze_cfg, "path to the JSON config")->required();
    CLI::App* orbit = app.add_subcommand(
        "orbit", "iterate the configured function and export the orbit trace as CSV");
    orbit->add_option("config", orbit_cfg, "path to the JSON config")->required();
    CLI::App* norm = app.add_subcommand(
        "norm", "print the Lorentz norms of the configured function");
    norm->add_option("config", norm_cfg, "path to the JSON config")->required();
    CLI::App* verify = app.add_subcommand(
        "verify", "recompute a report from its embedded config and compare bytes");
    verify->add_option("report", verify_path, "path to a report produced by analyze")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(analyze_cfg);
        if (orbit->parsed()) return run_orbit(orbit_cfg);
        if (norm->parsed()) return run_norm(norm_cfg);
        if (verify->parsed()) return run_verify(verify_path);
    } catch (const lorentz::SchemaError& e) {
        std::cerr << "ldyn: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ldyn: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
