#pragma once

#include <string>
#include <vector>

#include "apnum/function_spec.hpp"
#include "apnum/law.hpp"
#include "apnum/sde.hpp"

namespace apnum {

enum class LevitanKind { g, H, h };

/// g(t) = 2 + cos t + cos(sqrt2 t); H = sin(1/g); h = H'.
FunctionSpec levitan(LevitanKind kind);

/// exp of the summed 4n-periodic triangular spikes, truncated at n_max
/// (the inner sum overflows exp beyond n ~ 8).
FunctionSpec spike_train(int n_max);

struct ExpectedCheck {
    enum class Kind { AbsoluteError, UpperBound, LowerBound };
    std::string name;
    Kind kind = Kind::AbsoluteError;
    double expected = 0.0;
    double tolerance = 0.0;
};

/// A ready-made experiment: either a deterministic convolution problem or a
/// stochastic SdeProblem (pseudo_ap carries a companion problem so the
/// difference path Z = X - Y can be ergodic-profiled).
struct Scenario {
    std::string name;
    bool deterministic = false;
    double delta = 1.0;        // deterministic variant
    FunctionSpec forcing;      // deterministic variant
    SdeProblem problem;
    SdeProblem companion;
    bool has_companion = false;
    SolverConfig config;
    std::vector<ExpectedCheck> expected;
};

/// Registry: affine_levitan, ou, periodic_sde, pseudo_ap.
Scenario scenario(const std::string& name);

struct CheckResult {
    std::string check;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ScenarioRun {
    Scenario scenario;
    SampledPath path;          // deterministic solution, or E-norm path for pseudo_ap Z
    Ensemble ensemble;
    std::vector<CheckResult> checks;
    std::vector<TauReport> taus;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Executes the scenario's solver and evaluates every expected check.
/// `taus` adds distribution-level almost-period reports for stochastic
/// scenarios (ignored for deterministic ones).
ScenarioRun run_scenario(const Scenario& s, const std::vector<double>& taus = {});

}  // namespace apnum
