// Command-line driver for the verification suites.
//
//   abelcs_cli verify <all | suite | check-id>   identity and limit checks
//   abelcs_cli abel   <curve | threefold>        divisor-pairing experiments
//
// Exit codes: 0 all checks pass, 1 at least one check fails, 2 configuration
// or usage error.  With a fixed config and seed the JSON report is
// byte-identical across runs and worker counts (pass --timings to trade that
// for wall-clock columns).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "abelcs/checks.hpp"
#include "abelcs/config.hpp"
#include "abelcs/report.hpp"

namespace {

using abelcs::Config;
using abelcs::ConfigError;
using abelcs::Report;
using abelcs::checks::Settings;
using abelcs::checks::SuiteDef;

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    std::optional<std::int64_t> samples;
    std::optional<int> workers;
    bool timings = false;
    std::string format = "json";
    std::string out_path;
    // abel curve parameter overrides
    std::optional<std::string> tau, p, q;
};

int emit(const Report& rep, const CliOptions& opt) {
    std::string text = opt.format == "text" ? rep.to_text() : rep.to_json();
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write output file: " << opt.out_path << "\n";
            return 2;
        }
        out << text;
    }
    return rep.exit_code();
}

// Builds the effective settings: defaults, then config file, then flags.
Settings make_settings(const CliOptions& opt, bool& timings) {
    Config cfg;
    if (!opt.config_path.empty()) cfg = Config::parse_file(opt.config_path);
    Settings st = Settings::from_config(cfg);
    timings = cfg.get<bool>("global.timings", false);
    auto unused = cfg.unused_keys();
    if (!unused.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unused) msg += " " + k;
        throw ConfigError(msg);
    }
    if (opt.seed) st.seed = *opt.seed;
    if (opt.tolerance) st.tol_scale = *opt.tolerance;
    if (opt.workers) st.workers = *opt.workers;
    if (opt.samples) {
        st.cs_samples = *opt.samples;
        st.threefold_samples = *opt.samples;
    }
    if (opt.timings) timings = true;
    if (st.tol_scale <= 0) throw ConfigError("tolerance scale must be positive");
    if (st.workers < 1) throw ConfigError("workers must be at least 1");
    if (opt.tau) st.tau = abelcs::parse_complex(*opt.tau);
    if (opt.p) st.p = abelcs::parse_complex(*opt.p);
    if (opt.q) st.q = abelcs::parse_complex(*opt.q);
    if (st.tau.imag() <= 0) throw ConfigError("tau must have positive imaginary part");
    return st;
}

int run_verify(const CliOptions& opt, const std::string& selector) {
    bool timings = false;
    Settings st = make_settings(opt, timings);
    const auto& suites = abelcs::checks::registry();

    Report rep;
    rep.capture_timings = timings;
    if (selector == "all") {
        for (const auto& s : suites)
            if (s.verify_suite) s.fn(rep, st);
        return emit(rep, opt);
    }
    for (const auto& s : suites)
        if (s.verify_suite && s.name == selector) {
            s.fn(rep, st);
            return emit(rep, opt);
        }
    // individual check id: run its suite, keep the one record
    for (const auto& s : suites)
        for (const auto& id : s.check_ids)
            if (s.verify_suite && id == selector) {
                s.fn(rep, st);
                std::erase_if(rep.records, [&](const auto& r) { return r.id != selector; });
                return emit(rep, opt);
            }
    std::cerr << "error: unknown verify selector: " << selector << "\n"
              << "suites: all";
    for (const auto& s : suites)
        if (s.verify_suite) std::cerr << " " << s.name;
    std::cerr << "\n";
    return 2;
}

int run_abel(const CliOptions& opt, const std::string& which) {
    bool timings = false;
    Settings st = make_settings(opt, timings);
    std::string suite_name = "abel-" + which;
    for (const auto& s : abelcs::checks::registry())
        if (s.name == suite_name) {
            Report rep;
            rep.capture_timings = timings;
            s.fn(rep, st);
            return emit(rep, opt);
        }
    std::cerr << "error: unknown abel target: " << which << " (use curve or threefold)\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification suites for divisor currents and transgression forms"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "configuration file (see configs/default.toml)");
    app.add_option("--seed", opt.seed, "random seed shared by all randomized checks");
    app.add_option("--tolerance", opt.tolerance, "scale factor applied to every check tolerance");
    app.add_option("--samples", opt.samples, "override the Monte Carlo sample counts");
    app.add_option("--workers", opt.workers, "worker threads for sample integration");
    app.add_flag("--timings", opt.timings, "record wall-clock times (breaks byte-identical output)");
    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    app.add_option("--out", opt.out_path, "write the report to this file instead of stdout");

    std::string verify_sel, abel_which;
    CLI::App* verify = app.add_subcommand("verify", "run an identity/limit suite or one check");
    verify->fallthrough();
    verify->add_option("selector", verify_sel, "all, a suite name, or a check id")->required();

    CLI::App* abel = app.add_subcommand("abel", "divisor-pairing experiments");
    abel->fallthrough();
    abel->add_option("target", abel_which, "curve or threefold")
        ->required()
        ->check(CLI::IsMember({"curve", "threefold"}));
    abel->add_option("--tau", opt.tau, "lattice modulus for the curve experiments, e.g. 0.3+1.1i");
    abel->add_option("--P", opt.p, "pole divisor base point for the curve experiments");
    abel->add_option("--Q", opt.q, "zero divisor base point for the curve experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed()) return run_verify(opt, verify_sel);
        return run_abel(opt, abel_which);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
