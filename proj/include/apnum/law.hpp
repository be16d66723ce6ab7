#pragma once

#include <cstdint>
#include <vector>

#include "apnum/sde.hpp"

namespace apnum {

/// Finite sample of state vectors observed at one time point.
struct EmpiricalLaw {
    std::size_t dim = 1;
    std::vector<double> samples;  // [s*dim + i]
    double timestamp = 0.0;

    std::size_t size() const { return dim == 0 ? 0 : samples.size() / dim; }
    double at(std::size_t s, std::size_t i = 0) const { return samples[s * dim + i]; }
};

struct LawDistanceReport {
    enum class Metric { Wasserstein, BoundedLipschitz };
    enum class Method { Quantile1d, ExactAssignment, DualLP };
    Metric metric = Metric::Wasserstein;
    double p = 1.0;
    double value = 0.0;
    Method method = Method::Quantile1d;
};

EmpiricalLaw law_at(const Ensemble& ensemble, double t);

/// W_p between empirical laws. d=1 uses the quantile coupling (order
/// statistics; unequal sample counts are first interpolated to a common
/// quantile grid). d>1 solves the exact minimum-cost assignment and requires
/// equal sample counts <= 512.
LawDistanceReport wasserstein(const EmpiricalLaw& a, const EmpiricalLaw& b, double p);

/// Bounded-Lipschitz distance sup { mean_a(phi) - mean_b(phi) } over
/// |phi| <= 1, Lip(phi) <= 1, evaluated exactly as the optimal-transport
/// linear program with cost min(|x - y|, 2) (Kantorovich-Rubinstein form),
/// solved by successive-shortest-path min-cost flow. Pooled sample count
/// capped at 2000.
LawDistanceReport dbl(const EmpiricalLaw& a, const EmpiricalLaw& b);

/// max over stored grid nodes t of mean( |X(t)|^p ; |X(t)|^p > c ).
double ui_defect(const Ensemble& ensemble, double p, double c);

struct TauReport {
    double tau = 0.0;
    double sup_distance = 0.0;  // sup over overlapping grid t of W_p
    bool accepted = false;
    double sup_dbl = 0.0;       // NaN when pooled samples exceed the LP cap
};

/// Distribution-level almost-period test: for each tau (a grid multiple),
/// the sup over overlapping grid t of W_p(law(t), law(t+tau)); accepted when
/// the sup is <= epsilon. The grid max is marginal evidence only — it lower
/// bounds the path-space distance.
std::vector<TauReport> apd_test(const Ensemble& ensemble, const std::vector<double>& taus,
                                double epsilon, double p);

}  // namespace apnum
