// apnum: almost-periodicity analysis and mild-solution SDE simulation.
//
// Commands:
//   analyze  --spec FILE      metric scans / defects / ergodic means
//   solve    --scenario NAME  run a registry scenario, check expectations
//   report   --out DIR        re-print a summary written by analyze/solve
//
// Exit codes: 0 ok, 2 schema error, 3 numerical failure, 4 expected-check
// failure.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "apnum/corpus.hpp"
#include "apnum/errors.hpp"
#include "apnum/json_io.hpp"
#include "apnum/law.hpp"
#include "apnum/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCheckFailed = 4;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct OutputDir {
    fs::path dir;
    json checksums = json::object();

    explicit OutputDir(const std::string& path) : dir(path) { fs::create_directories(dir); }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(content));
        checksums[name] = buf;
    }

    void write_manifest(const json& manifest) {
        json m = manifest;
        m["checksums"] = checksums;
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << m.dump(2) << "\n";
    }
};

apnum::MetricKind parse_metric(const std::string& flag) {
    if (flag == "uniform") return apnum::MetricKind::uniform();
    if (flag == "smeasure") return apnum::MetricKind::stepanov_measure();
    if (flag.rfind("sp:", 0) == 0) {
        const double p = std::stod(flag.substr(3));
        return apnum::MetricKind::stepanov(p);
    }
    throw apnum::SchemaError("unknown metric flag: " + flag +
                             " (expected uniform | sp:<p> | smeasure)");
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw apnum::SchemaError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw apnum::SchemaError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

struct AnalyzeArgs {
    std::string spec_file, metric = "uniform", out = "apnum-out";
    double eps = 0.1, tau_min = 0.0, tau_max = 50.0, tau_step = 0.01;
    double t0 = 0.0, t1 = 100.0, dt = 1e-3;
    double defect_p = 1.0, defect_mass = 1e-3;
};

int run_analyze(const AnalyzeArgs& args) {
    const apnum::FunctionSpec spec = apnum::spec_from_json(load_json_file(args.spec_file));
    const apnum::MetricKind metric = parse_metric(args.metric);
    const apnum::GridWindow window(args.t0, args.t1, args.dt);
    const apnum::SampledPath path = apnum::sample(spec, window);

    const auto scan = apnum::scan_almost_periods(path, args.eps, metric, args.tau_min,
                                                 args.tau_max, args.tau_step);
    const double defect = apnum::mp_prime_defect(path, args.defect_p, args.defect_mass);

    std::vector<double> radii;
    const double half = 0.5 * (args.t1 - args.t0);
    for (double r : {0.1, 0.25, 0.5, 1.0})
        if (r * half >= window.dt) radii.push_back(r * half);
    apnum::SampledPath centered = path;
    centered.window = apnum::GridWindow(-half, half, args.dt);
    const auto profile =
        apnum::ergodic_profile(centered, apnum::WeightMeasure::lebesgue(), radii);

    OutputDir out(args.out);
    {
        std::ostringstream csv;
        csv << "tau\n";
        for (double tau : scan.periods) csv << format_double(tau) << "\n";
        out.write("periods.csv", csv.str());
    }
    {
        std::ostringstream csv;
        csv << "r,mean\n";
        for (const auto& [r, mean] : profile)
            csv << format_double(r) << "," << format_double(mean) << "\n";
        out.write("ergodic.csv", csv.str());
    }
    json summary = {{"scan", apnum::scan_to_json(scan)},
                    {"mpPrimeDefect",
                     {{"p", args.defect_p}, {"deltaMass", args.defect_mass}, {"value", defect}}}};
    out.write("summary.json", summary.dump(2) + "\n");
    out.write_manifest({{"command", "analyze"},
                        {"spec", apnum::spec_to_json(spec)},
                        {"metric", apnum::metric_to_json(metric)},
                        {"eps", args.eps},
                        {"tauMin", args.tau_min},
                        {"tauMax", args.tau_max},
                        {"tauStep", args.tau_step},
                        {"t0", args.t0},
                        {"t1", args.t1},
                        {"dt", args.dt}});
    std::cout << "accepted " << scan.periods.size() << " almost periods; maxGap "
              << (std::isfinite(scan.max_gap) ? format_double(scan.max_gap) : "inf") << "\n";
    return 0;
}

struct SolveArgs {
    std::string scenario_name, out = "apnum-out";
    std::optional<std::uint64_t> n;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt, t0, t1;
    std::vector<double> taus;
};

int run_solve(const SolveArgs& args) {
    apnum::Scenario s = apnum::scenario(args.scenario_name);
    if (args.n) s.config.ensemble_n = *args.n;
    if (args.seed) s.config.seed = *args.seed;
    {
        apnum::GridWindow w = s.config.window;
        s.config.window = apnum::GridWindow(args.t0.value_or(w.t0), args.t1.value_or(w.t1),
                                            args.dt.value_or(w.dt));
    }

    const apnum::ScenarioRun run = apnum::run_scenario(s, args.taus);

    OutputDir out(args.out);
    {
        std::ostringstream csv;
        if (s.deterministic) {
            csv << "t,x\n";
            for (std::size_t k = 0; k < run.path.node_count(); ++k)
                csv << format_double(run.path.window.node(k)) << ","
                    << format_double(run.path.at(k)) << "\n";
        } else {
            csv << "member,t";
            for (std::size_t i = 0; i < run.ensemble.dim; ++i) csv << ",x" << (i + 1);
            csv << "\n";
            for (std::size_t m = 0; m < run.ensemble.ensemble_n; ++m)
                for (std::size_t k = 0; k < run.ensemble.node_count(); ++k) {
                    csv << m << "," << format_double(run.ensemble.grid.node(k));
                    for (std::size_t i = 0; i < run.ensemble.dim; ++i)
                        csv << "," << format_double(run.ensemble.state(m, k, i));
                    csv << "\n";
                }
        }
        out.write("ensemble.csv", csv.str());
    }
    if (!s.deterministic) {
        std::ostringstream csv;
        csv << "iter,supMeanSq\n";
        for (std::size_t i = 0; i < run.ensemble.diagnostics.size(); ++i)
            csv << (i + 1) << "," << format_double(run.ensemble.diagnostics[i]) << "\n";
        out.write("diagnostics.csv", csv.str());
    }

    json checks = json::array();
    for (const auto& c : run.checks) checks.push_back(apnum::check_to_json(c));
    json taus = json::array();
    for (const auto& t : run.taus) taus.push_back(apnum::tau_to_json(t));
    json summary = {{"scenario", args.scenario_name},
                    {"checks", checks},
                    {"taus", taus},
                    {"thetaSt", s.deterministic ? json() : json(run.ensemble.theta_st)},
                    {"contractionOk",
                     s.deterministic ? json() : json(run.ensemble.contraction_ok)}};
    out.write("summary.json", summary.dump(2) + "\n");
    out.write_manifest(
        {{"command", "solve"}, {"scenario", apnum::scenario_to_json(s)}, {"taus", args.taus}});

    bool all_pass = true;
    for (const auto& c : run.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.check << " expected "
                  << format_double(c.expected) << " observed " << format_double(c.observed)
                  << " tol " << format_double(c.tolerance) << "\n";
        all_pass = all_pass && c.pass;
    }
    for (const auto& t : run.taus)
        std::cout << (t.accepted ? "ACCEPT" : "REJECT") << " tau " << format_double(t.tau)
                  << " supW " << format_double(t.sup_distance) << "\n";
    if (!s.deterministic && !run.ensemble.contraction_ok)
        std::cout << "warning: theta_st = " << format_double(run.ensemble.theta_st)
                  << " >= 1 (contraction not certified; solver ran to its iteration cap)\n";
    return all_pass ? 0 : kExitCheckFailed;
}

int run_report(const std::string& out_dir) {
    const json summary = load_json_file((fs::path(out_dir) / "summary.json").string());
    bool all_pass = true;
    if (summary.contains("checks")) {
        for (const auto& c : summary["checks"]) {
            const bool pass = c.value("pass", false);
            all_pass = all_pass && pass;
            std::cout << (pass ? "PASS " : "FAIL ") << c.value("check", "?") << " expected "
                      << format_double(c.value("expected", 0.0)) << " observed "
                      << format_double(c.value("observed", 0.0)) << "\n";
        }
    }
    if (summary.contains("scan")) {
        const auto& scan = summary["scan"];
        std::cout << "periods " << scan.value("periods", json::array()).size() << " maxGap "
                  << scan["maxGap"].dump() << "\n";
    }
    return all_pass ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stepanov almost-periodicity toolkit"};
    app.require_subcommand(1);

    AnalyzeArgs aa;
    CLI::App* analyze = app.add_subcommand("analyze", "metric scans on a function spec");
    analyze->add_option("--spec", aa.spec_file, "FunctionSpec JSON file")->required();
    analyze->add_option("--metric", aa.metric, "uniform | sp:<p> | smeasure");
    analyze->add_option("--eps", aa.eps);
    analyze->add_option("--tau-min", aa.tau_min);
    analyze->add_option("--tau-max", aa.tau_max);
    analyze->add_option("--tau-step", aa.tau_step);
    analyze->add_option("--t0", aa.t0);
    analyze->add_option("--t1", aa.t1);
    analyze->add_option("--dt", aa.dt);
    analyze->add_option("--defect-p", aa.defect_p);
    analyze->add_option("--defect-mass", aa.defect_mass);
    analyze->add_option("--out", aa.out);

    SolveArgs sa;
    CLI::App* solve = app.add_subcommand("solve", "run a registry scenario");
    solve->add_option("--scenario", sa.scenario_name, "scenario name")->required();
    std::uint64_t n_opt = 0, seed_opt = 0;
    double dt_opt = 0, t0_opt = 0, t1_opt = 0;
    auto* n_flag = solve->add_option("--n", n_opt, "ensemble size");
    auto* seed_flag = solve->add_option("--seed", seed_opt);
    auto* dt_flag = solve->add_option("--dt", dt_opt);
    auto* t0_flag = solve->add_option("--t0", t0_opt);
    auto* t1_flag = solve->add_option("--t1", t1_opt);
    solve->add_option("--tau", sa.taus, "almost-period candidates for apd_test");
    solve->add_option("--out", sa.out);

    std::string report_dir = "apnum-out";
    CLI::App* report = app.add_subcommand("report", "re-print a written summary");
    report->add_option("--out", report_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(aa);
        if (solve->parsed()) {
            if (*n_flag) sa.n = n_opt;
            if (*seed_flag) sa.seed = seed_opt;
            if (*dt_flag) sa.dt = dt_opt;
            if (*t0_flag) sa.t0 = t0_opt;
            if (*t1_flag) sa.t1 = t1_opt;
            return run_solve(sa);
        }
        return run_report(report_dir);
    } catch (const apnum::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const apnum::UnknownScenario& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const apnum::UnknownPrimitive& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const apnum::NoConvergence& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const apnum::NonFinite& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const apnum::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
