#include "apnum/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "apnum/errors.hpp"
#include "apnum/metrics.hpp"

namespace apnum {

FunctionSpec levitan(LevitanKind kind) {
    switch (kind) {
        case LevitanKind::g: return fspec::primitive("levitan_g");
        case LevitanKind::H: return fspec::primitive("levitan_H");
        case LevitanKind::h: return fspec::primitive("levitan_h");
    }
    throw Error("unreachable levitan kind");
}

FunctionSpec spike_train(int n_max) {
    return fspec::parametric("spike_train", {static_cast<double>(n_max)});
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

SdeProblem periodic_problem() {
    SdeProblem p;
    p.dim = 1;
    p.decay = {1.0};
    p.drift = AffineField::scalar(fspec::trig({{0.5, 1.0, 0.0}}), fspec::constant(-0.5));
    p.diffusion = AffineField::additive(fspec::affine(1.0, 0.1, fspec::trig({{0.05, 1.0, 0.0}})));
    p.noise_dim = 1;
    p.q_diag = {1.0};
    p.lipschitz_k = fspec::constant(0.55);
    p.growth_m = 0.65;
    return p;
}

ExpectedCheck upper(std::string name, double bound, double tol) {
    return {std::move(name), ExpectedCheck::Kind::UpperBound, bound, tol};
}
ExpectedCheck lower(std::string name, double bound, double tol) {
    return {std::move(name), ExpectedCheck::Kind::LowerBound, bound, tol};
}
ExpectedCheck close(std::string name, double value, double tol) {
    return {std::move(name), ExpectedCheck::Kind::AbsoluteError, value, tol};
}

CheckResult judge(const ExpectedCheck& c, double observed) {
    CheckResult r{c.name, c.expected, observed, c.tolerance, false};
    switch (c.kind) {
        case ExpectedCheck::Kind::AbsoluteError:
            r.pass = std::abs(observed - c.expected) <= c.tolerance;
            break;
        case ExpectedCheck::Kind::UpperBound:
            r.pass = observed <= c.expected + c.tolerance;
            break;
        case ExpectedCheck::Kind::LowerBound:
            r.pass = observed >= c.expected - c.tolerance;
            break;
    }
    return r;
}

const ExpectedCheck& find_check(const Scenario& s, const std::string& name) {
    for (const auto& c : s.expected)
        if (c.name == name) return c;
    throw Error("scenario is missing expected check " + name);
}

double member_variance(const Ensemble& e, std::size_t k) {
    double mean = 0.0;
    for (std::size_t m = 0; m < e.ensemble_n; ++m) mean += e.state(m, k);
    mean /= static_cast<double>(e.ensemble_n);
    double var = 0.0;
    for (std::size_t m = 0; m < e.ensemble_n; ++m) {
        const double d = e.state(m, k) - mean;
        var += d * d;
    }
    return var / static_cast<double>(e.ensemble_n - 1);
}

double lag_autocov(const Ensemble& e, std::size_t k1, std::size_t k2) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t m = 0; m < e.ensemble_n; ++m) {
        m1 += e.state(m, k1);
        m2 += e.state(m, k2);
    }
    m1 /= static_cast<double>(e.ensemble_n);
    m2 /= static_cast<double>(e.ensemble_n);
    double c = 0.0;
    for (std::size_t m = 0; m < e.ensemble_n; ++m)
        c += (e.state(m, k1) - m1) * (e.state(m, k2) - m2);
    return c / static_cast<double>(e.ensemble_n - 1);
}

double max_second_moment(const Ensemble& e) {
    double worst = 0.0;
    for (std::size_t k = 0; k < e.node_count(); ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < e.ensemble_n; ++m) {
            double n2 = 0.0;
            for (std::size_t i = 0; i < e.dim; ++i) {
                const double v = e.state(m, k, i);
                n2 += v * v;
            }
            s += n2;
        }
        worst = std::max(worst, s / static_cast<double>(e.ensemble_n));
    }
    return worst;
}

}  // namespace

Scenario scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "affine_levitan") {
        s.deterministic = true;
        s.delta = 1.0;
        s.forcing = levitan(LevitanKind::h);
        s.config.window = GridWindow(-100.0, 100.0, 1e-3);
        s.config.memory_t = 40.0;
        s.expected = {upper("max_abs_x", 2.0, 1e-3)};
        return s;
    }
    if (name == "ou") {
        s.problem.dim = 1;
        s.problem.decay = {1.0};
        s.problem.drift = AffineField::zero(1);
        s.problem.diffusion = AffineField::additive(fspec::constant(1.0));  // sigma = 1
        s.problem.noise_dim = 1;
        s.problem.q_diag = {1.0};
        s.problem.lipschitz_k = fspec::constant(0.0);
        s.problem.growth_m = 1.0;
        s.config.window = GridWindow(0.0, 20.0, 1e-2);
        s.config.memory_t = 20.0;
        s.config.ensemble_n = 10000;
        s.config.seed = 9122;
        // stationaryVar = trQ sigma^2 / (2 delta); MC slack = 3 standard errors
        s.expected = {close("stationary_var", 0.5, 0.0213),
                      close("lag1_autocov", 0.5 * std::exp(-1.0), 0.0160)};
        return s;
    }
    if (name == "periodic_sde") {
        s.problem = periodic_problem();
        s.config.window = GridWindow(0.0, 8.0 * M_PI, M_PI / 320.0);
        s.config.memory_t = 20.0;
        s.config.ensemble_n = 5000;
        s.config.seed = 9123;
        s.expected = {close("theta_st", theta_st(0.55, 1.0, 1.0), 1e-6),
                      upper("apd_2pi", 0.05, 0.0),
                      lower("apd_pi", 0.05, 0.0),
                      upper("ui_defect_25x", 0.01, 0.0)};
        return s;
    }
    if (name == "pseudo_ap") {
        s.problem = periodic_problem();
        s.problem.drift.offset[0] = fspec::sum(
            {fspec::trig({{0.5, 1.0, 0.0}}), fspec::parametric("exp_abs_decay", {0.2, 10.0})});
        s.problem.growth_m = 0.85;
        s.companion = periodic_problem();
        s.has_companion = true;
        s.config.window = GridWindow(-200.0, 200.0, 1e-2);
        s.config.memory_t = 20.0;
        s.config.ensemble_n = 2000;
        s.config.seed = 9124;
        s.config.store_stride = 10;
        // ergodic decay of the remainder: mean(200) < 0.5 mean(25)
        s.expected = {upper("ergodic_ratio", 0.5, 0.0)};
        return s;
    }
    throw UnknownScenario("unknown scenario: " + name);
}

ScenarioRun run_scenario(const Scenario& s, const std::vector<double>& taus) {
    ScenarioRun run;
    run.scenario = s;

    if (s.deterministic) {
        run.path = deterministic_mild_solve(s.delta, s.forcing, s.config.window,
                                            s.config.memory_t);
        double worst = 0.0;
        for (double v : run.path.values) worst = std::max(worst, std::abs(v));
        run.checks.push_back(judge(find_check(s, "max_abs_x"), worst));
        return run;
    }

    run.ensemble = picard_solve(s.problem, s.config);
    const Ensemble& e = run.ensemble;

    if (s.name == "ou") {
        run.checks.push_back(
            judge(find_check(s, "stationary_var"), member_variance(e, e.node_count() - 1)));
        run.checks.push_back(judge(find_check(s, "lag1_autocov"),
                                   lag_autocov(e, e.grid.index_of(10.0), e.grid.index_of(11.0))));
    } else if (s.name == "periodic_sde") {
        run.checks.push_back(judge(find_check(s, "theta_st"), e.theta_st));
        std::vector<double> all_taus = {kTwoPi, M_PI};
        for (double t : taus) all_taus.push_back(t);
        run.taus = apd_test(e, all_taus, 0.05, 2.0);
        run.checks.push_back(judge(find_check(s, "apd_2pi"), run.taus[0].sup_distance));
        run.checks.push_back(judge(find_check(s, "apd_pi"), run.taus[1].sup_distance));
        const double scale = max_second_moment(e);
        run.checks.push_back(
            judge(find_check(s, "ui_defect_25x"), ui_defect(e, 2.0, 25.0 * scale)));
    } else if (s.name == "pseudo_ap") {
        const Ensemble y = picard_solve(s.companion, s.config);
        run.path = SampledPath(e.grid, 1);
        for (std::size_t k = 0; k < e.node_count(); ++k) {
            double s2 = 0.0;
            for (std::size_t m = 0; m < e.ensemble_n; ++m) {
                const double z = e.state(m, k) - y.state(m, k);
                s2 += z * z;
            }
            run.path.values[k] = std::sqrt(s2 / static_cast<double>(e.ensemble_n));
        }
        const auto profile =
            ergodic_profile(run.path, WeightMeasure::lebesgue(), {25.0, 200.0});
        run.checks.push_back(
            judge(find_check(s, "ergodic_ratio"), profile[1].second / profile[0].second));
    }
    if (!taus.empty() && run.taus.empty()) run.taus = apd_test(e, taus, 0.05, 2.0);
    return run;
}

}  // namespace apnum
