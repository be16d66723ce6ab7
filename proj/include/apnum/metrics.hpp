#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "apnum/function_spec.hpp"
#include "apnum/grid.hpp"

namespace apnum {

/// The three metric families on sampled paths.
///  - Uniform: max over nodes of the pointwise distance.
///  - Stepanov(p, L): sup over window starts xi of
///      ( int_xi^{xi+L} |f-g|^p dt )^{1/p}  (unnormalized; L=1 gives the
///    classical windowed metric).
///  - StepanovMeasure(L): same with p=1 and integrand min(|f-g|, 1).
struct MetricKind {
    enum class Kind { Uniform, Stepanov, StepanovMeasure };
    Kind kind = Kind::Uniform;
    double p = 1.0;
    double window_len = 1.0;

    static MetricKind uniform() { return {Kind::Uniform, 1.0, 0.0}; }
    static MetricKind stepanov(double p, double window_len = 1.0);
    static MetricKind stepanov_measure(double window_len = 1.0);
};

double distance(const SampledPath& f, const SampledPath& g, const MetricKind& metric);

/// Restriction f(t + .) on [0, window_len]; t must be a grid node and
/// [t, t+window_len] must lie inside f's window.
SampledPath bochner_slice(const SampledPath& f, double t, double window_len);

struct AlmostPeriodSet {
    MetricKind metric;
    double epsilon = 0.0;
    double tau_min = 0.0;
    double tau_max = 0.0;
    double step_tau = 0.0;
    std::vector<double> periods;   // sorted, accepted shifts
    double max_gap = 0.0;          // +inf sentinel when empty
};

/// Scans shifts tau = k*step_tau inside [tau_min, tau_max]; each tau is
/// snapped to the nearest grid multiple of f's dt, and the comparison window
/// shrinks to the overlap [t0, t1-tau]. The overlap must keep at least one
/// full metric window.
AlmostPeriodSet scan_almost_periods(const SampledPath& f, double epsilon,
                                    const MetricKind& metric, double tau_min,
                                    double tau_max, double step_tau);

/// Largest inclusion length: every subinterval of the scan range of this
/// length contains an accepted shift. +inf when the set is empty.
double max_gap(const AlmostPeriodSet& set);

/// Windowed uniform-integrability defect: approximates
///   sup_xi sup_{T in [xi, xi+1], |T| <= delta_mass} int_T |f|^p dt
/// by greedily collecting the largest node contributions per unit window.
/// xi_stride > 0 thins the window-start grid (0 picks a default that keeps
/// the number of windows bounded).
double mp_prime_defect(const SampledPath& f, double p, double delta_mass,
                       std::size_t xi_stride = 0);

struct WeightMeasure {
    enum class Kind { Lebesgue, PowerWeight, CustomDensity };
    Kind kind = Kind::Lebesgue;
    double alpha = 0.0;            // PowerWeight density |t|^alpha
    FunctionSpec density;          // CustomDensity (nonnegative)

    static WeightMeasure lebesgue() { return {}; }
    static WeightMeasure power(double alpha);
    static WeightMeasure custom(FunctionSpec density);

    double rho(double t) const;
};

/// Weighted ergodic means: for each radius r,
///   mean(r) = int_{-r}^{r} |f| rho dt / int_{-r}^{r} rho dt   (trapezoid).
/// Decay toward 0 as r grows is the caller's ergodicity evidence.
std::vector<std::pair<double, double>> ergodic_profile(const SampledPath& f,
                                                       const WeightMeasure& mu,
                                                       const std::vector<double>& radii);

}  // namespace apnum
