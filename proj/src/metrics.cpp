#include "apnum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "apnum/errors.hpp"

namespace apnum {

MetricKind MetricKind::stepanov(double p, double window_len) {
    if (!(p >= 1.0)) throw Error("Stepanov metric requires p >= 1");
    if (!(window_len > 0.0)) throw Error("Stepanov metric requires window_len > 0");
    return {Kind::Stepanov, p, window_len};
}

MetricKind MetricKind::stepanov_measure(double window_len) {
    if (!(window_len > 0.0)) throw Error("Stepanov metric requires window_len > 0");
    return {Kind::StepanovMeasure, 1.0, window_len};
}

namespace {

// Pointwise Euclidean distances |f_k - g_k|.
std::vector<double> node_distances(const SampledPath& f, const SampledPath& g) {
    require_same_grid(f, g);
    const std::size_t n = f.node_count();
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.dim; ++i) {
            const double v = f.at(k, i) - g.at(k, i);
            s += v * v;
        }
        d[k] = std::sqrt(s);
    }
    return d;
}

// sup over window starts of the trapezoid integral of u over [xi, xi+L],
// where u is sampled on a grid with step dt and L = m*dt.
double max_window_integral(const std::vector<double>& u, double dt, std::size_t m) {
    const std::size_t n = u.size();
    if (n < m + 1) throw WindowTooShort("path shorter than the metric window");
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + u[k];
    double best = 0.0;
    for (std::size_t k = 0; k + m < n; ++k) {
        const double integral =
            dt * (prefix[k + m + 1] - prefix[k]) - 0.5 * dt * (u[k] + u[k + m]);
        best = std::max(best, integral);
    }
    return best;
}

double metric_value(const std::vector<double>& d, double dt, const MetricKind& metric) {
    switch (metric.kind) {
        case MetricKind::Kind::Uniform:
            return *std::max_element(d.begin(), d.end());
        case MetricKind::Kind::Stepanov: {
            const std::size_t m = static_cast<std::size_t>(std::llround(metric.window_len / dt));
            if (m == 0) throw WindowTooShort("metric window shorter than the grid step");
            std::vector<double> u(d.size());
            if (metric.p == 1.0) {
                u = d;
            } else if (metric.p == 2.0) {
                for (std::size_t k = 0; k < d.size(); ++k) u[k] = d[k] * d[k];
            } else {
                for (std::size_t k = 0; k < d.size(); ++k) u[k] = std::pow(d[k], metric.p);
            }
            return std::pow(max_window_integral(u, dt, m), 1.0 / metric.p);
        }
        case MetricKind::Kind::StepanovMeasure: {
            const std::size_t m = static_cast<std::size_t>(std::llround(metric.window_len / dt));
            if (m == 0) throw WindowTooShort("metric window shorter than the grid step");
            std::vector<double> u(d.size());
            for (std::size_t k = 0; k < d.size(); ++k) u[k] = std::min(d[k], 1.0);
            return max_window_integral(u, dt, m);
        }
    }
    throw Error("unreachable metric kind");
}

}  // namespace

double distance(const SampledPath& f, const SampledPath& g, const MetricKind& metric) {
    const auto d = node_distances(f, g);
    return metric_value(d, f.window.dt, metric);
}

SampledPath bochner_slice(const SampledPath& f, double t, double window_len) {
    const double dt = f.window.dt;
    const std::size_t k0 = f.window.index_of(t);
    const std::size_t m = static_cast<std::size_t>(std::llround(window_len / dt));
    if (k0 + m >= f.node_count()) throw OutOfRange("slice extends past the sampled window");
    SampledPath slice(GridWindow(0.0, window_len, dt), f.dim);
    for (std::size_t k = 0; k <= m; ++k)
        for (std::size_t i = 0; i < f.dim; ++i) slice.at(k, i) = f.at(k0 + k, i);
    return slice;
}

AlmostPeriodSet scan_almost_periods(const SampledPath& f, double epsilon,
                                    const MetricKind& metric, double tau_min,
                                    double tau_max, double step_tau) {
    if (!(step_tau > 0.0)) throw Error("step_tau must be positive");
    const double dt = f.window.dt;
    const std::size_t n = f.node_count();
    const std::size_t m =
        metric.kind == MetricKind::Kind::Uniform
            ? 1
            : static_cast<std::size_t>(std::llround(metric.window_len / dt));

    AlmostPeriodSet set;
    set.metric = metric;
    set.epsilon = epsilon;
    set.tau_min = tau_min;
    set.tau_max = tau_max;
    set.step_tau = step_tau;

    const long long k_lo = static_cast<long long>(std::ceil(tau_min / step_tau - 1e-9));
    const long long k_hi = static_cast<long long>(std::floor(tau_max / step_tau + 1e-9));
    bool any_valid = false;
    for (long long k = std::max<long long>(k_lo, 0); k <= k_hi; ++k) {
        const double tau = static_cast<double>(k) * step_tau;
        const std::size_t shift = static_cast<std::size_t>(std::llround(tau / dt));
        if (shift + m + 1 > n) continue;  // overlap too short for one metric window
        any_valid = true;
        const double tau_eff = static_cast<double>(shift) * dt;
        const std::size_t overlap = n - shift;
        std::vector<double> d(overlap);
        if (f.dim == 1) {
            for (std::size_t j = 0; j < overlap; ++j)
                d[j] = std::abs(f.values[j + shift] - f.values[j]);
        } else {
            for (std::size_t j = 0; j < overlap; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < f.dim; ++i) {
                    const double v = f.at(j + shift, i) - f.at(j, i);
                    s += v * v;
                }
                d[j] = std::sqrt(s);
            }
        }
        if (metric_value(d, dt, metric) <= epsilon) set.periods.push_back(tau_eff);
    }
    if (!any_valid)
        throw EmptyComparisonWindow("no shift in range leaves a usable comparison window");
    set.max_gap = max_gap(set);
    return set;
}

double max_gap(const AlmostPeriodSet& set) {
    if (set.periods.empty()) return std::numeric_limits<double>::infinity();
    double gap = set.periods.front() - set.tau_min;
    for (std::size_t i = 0; i + 1 < set.periods.size(); ++i)
        gap = std::max(gap, set.periods[i + 1] - set.periods[i]);
    gap = std::max(gap, set.tau_max - set.periods.back());
    return gap;
}

double mp_prime_defect(const SampledPath& f, double p, double delta_mass,
                       std::size_t xi_stride) {
    if (!(delta_mass > 0.0 && delta_mass <= 1.0)) throw Error("delta_mass must be in (0, 1]");
    const double dt = f.window.dt;
    const std::size_t n = f.node_count();
    const std::size_t m = static_cast<std::size_t>(std::llround(1.0 / dt));
    if (n < m + 1) throw WindowTooShort("need at least one unit window");
    if (xi_stride == 0) xi_stride = std::max<std::size_t>(1, (n - m) / 512);

    // nodes fully covered by the mass budget, plus a fractional remainder
    const std::size_t full = static_cast<std::size_t>(delta_mass / dt);
    const double frac = (delta_mass - static_cast<double>(full) * dt) / dt;

    std::vector<double> a(m + 1);
    double best = 0.0;
    for (std::size_t k = 0; k + m < n; k += xi_stride) {
        for (std::size_t j = 0; j <= m; ++j) a[j] = std::pow(f.norm_at(k + j), p);
        const std::size_t keep = std::min(full + 1, a.size());
        std::nth_element(a.begin(), a.begin() + (keep - 1), a.end(), std::greater<double>());
        double s = 0.0;
        std::size_t count = std::min(full, a.size());
        // top `full` nodes at weight dt each
        std::vector<double> top(a.begin(), a.begin() + keep);
        std::sort(top.begin(), top.end(), std::greater<double>());
        for (std::size_t j = 0; j < count; ++j) s += top[j] * dt;
        if (full < a.size() && frac > 0.0) s += top[count] * dt * frac;
        best = std::max(best, s);
    }
    return best;
}

WeightMeasure WeightMeasure::power(double alpha) {
    if (!(alpha >= 0.0)) throw Error("power weight requires alpha >= 0");
    WeightMeasure mu;
    mu.kind = Kind::PowerWeight;
    mu.alpha = alpha;
    return mu;
}

WeightMeasure WeightMeasure::custom(FunctionSpec density) {
    WeightMeasure mu;
    mu.kind = Kind::CustomDensity;
    mu.density = std::move(density);
    return mu;
}

double WeightMeasure::rho(double t) const {
    switch (kind) {
        case Kind::Lebesgue:
            return 1.0;
        case Kind::PowerWeight:
            return std::pow(std::abs(t), alpha);
        case Kind::CustomDensity: {
            const double v = eval(density, t);
            if (v < 0.0) throw Error("custom density must be nonnegative");
            return v;
        }
    }
    throw Error("unreachable weight kind");
}

std::vector<std::pair<double, double>> ergodic_profile(const SampledPath& f,
                                                       const WeightMeasure& mu,
                                                       const std::vector<double>& radii) {
    const double dt = f.window.dt;
    std::vector<std::pair<double, double>> out;
    out.reserve(radii.size());
    for (double r : radii) {
        const std::size_t lo = f.window.index_of(-r);
        const std::size_t hi = f.window.index_of(r);
        double num = 0.0, den = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) {
            const double w = (k == lo || k == hi) ? 0.5 : 1.0;
            const double rho = mu.rho(f.window.node(k));
            num += w * f.norm_at(k) * rho * dt;
            den += w * rho * dt;
        }
        if (!(den > 0.0)) throw ZeroMass("weight measure has zero mass on [-r, r]");
        out.emplace_back(r, num / den);
    }
    return out;
}

}  // namespace apnum
