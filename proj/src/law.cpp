#include "apnum/law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "apnum/errors.hpp"

namespace apnum {

EmpiricalLaw law_at(const Ensemble& ensemble, double t) {
    const std::size_t k = ensemble.grid.index_of(t);  // throws OffGrid
    EmpiricalLaw law;
    law.dim = ensemble.dim;
    law.timestamp = ensemble.grid.node(k);
    law.samples.resize(ensemble.ensemble_n * ensemble.dim);
    for (std::size_t m = 0; m < ensemble.ensemble_n; ++m)
        for (std::size_t i = 0; i < ensemble.dim; ++i)
            law.samples[m * ensemble.dim + i] = ensemble.state(m, k, i);
    return law;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Empirical quantiles at levels (i + 1/2)/n of a sorted sample, by linear
// interpolation between order statistics.
std::vector<double> quantile_resample(const std::vector<double>& sorted, std::size_t n) {
    const std::size_t m = sorted.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double pos = u * static_cast<double>(m) - 0.5;
        if (pos <= 0.0) {
            out[i] = sorted.front();
        } else if (pos >= static_cast<double>(m - 1)) {
            out[i] = sorted.back();
        } else {
            const std::size_t lo = static_cast<std::size_t>(pos);
            const double w = pos - static_cast<double>(lo);
            out[i] = (1.0 - w) * sorted[lo] + w * sorted[lo + 1];
        }
    }
    return out;
}

double quantile_wasserstein(std::vector<double> x, std::vector<double> y, double p) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x.size() != y.size()) {
        const std::size_t n = std::max(x.size(), y.size());
        x = quantile_resample(x, n);
        y = quantile_resample(y, n);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), p);
    return std::pow(s / static_cast<double>(x.size()), 1.0 / p);
}

// O(n^3) exact assignment (Kuhn-Munkres with potentials) on an n x n cost
// matrix; returns the minimum total cost.
double assignment_cost(const std::vector<double>& cost, std::size_t n) {
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, n);  // match[j] = row assigned to column j
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> minv(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        std::vector<std::size_t> way(n + 1, n);
        std::size_t j0 = n;
        match[n] = i;
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 * n + j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != n);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != n);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        if (match[j] < n) total += cost[match[j] * n + j];
    return total;
}

double euclid(const EmpiricalLaw& a, std::size_t s, const EmpiricalLaw& b, std::size_t r) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.dim; ++i) {
        const double d = a.at(s, i) - b.at(r, i);
        d2 += d * d;
    }
    return std::sqrt(d2);
}

// Exact uniform-marginal transport with the given cost matrix, by
// successive shortest augmenting paths with Johnson potentials. Supplies
// are integers (M/g per source, N/g per sink); returns mean cost per unit
// of probability mass.
double transport_lp(const std::vector<double>& cost, std::size_t n_src, std::size_t n_snk) {
    const long long g = std::gcd(static_cast<long long>(n_src), static_cast<long long>(n_snk));
    const long long supply_each = static_cast<long long>(n_snk) / g;
    const long long demand_each = static_cast<long long>(n_src) / g;
    const long long total = supply_each * static_cast<long long>(n_src);

    std::vector<long long> supply(n_src, supply_each), demand(n_snk, demand_each);
    std::vector<long long> flow(n_src * n_snk, 0);
    std::vector<double> pot_src(n_src, 0.0), pot_snk(n_snk, 0.0);

    long long shipped = 0;
    double total_cost = 0.0;
    while (shipped < total) {
        // Dijkstra over the bipartite residual graph with reduced costs.
        std::vector<double> dist_src(n_src, kInf), dist_snk(n_snk, kInf);
        std::vector<std::size_t> par_snk(n_snk, n_src);   // source feeding the sink
        std::vector<std::size_t> par_src(n_src, n_snk);   // sink feeding back the source
        std::vector<bool> done_src(n_src, false), done_snk(n_snk, false);
        for (std::size_t i = 0; i < n_src; ++i)
            if (supply[i] > 0) dist_src[i] = 0.0;

        while (true) {
            double best = kInf;
            bool is_src = true;
            std::size_t node = 0;
            for (std::size_t i = 0; i < n_src; ++i)
                if (!done_src[i] && dist_src[i] < best) { best = dist_src[i]; node = i; }
            for (std::size_t j = 0; j < n_snk; ++j)
                if (!done_snk[j] && dist_snk[j] < best) { best = dist_snk[j]; node = j; is_src = false; }
            if (best == kInf) break;
            if (is_src) {
                done_src[node] = true;
                for (std::size_t j = 0; j < n_snk; ++j) {
                    if (done_snk[j]) continue;
                    const double rc = cost[node * n_snk + j] - pot_src[node] + pot_snk[j];
                    if (best + rc < dist_snk[j] - 1e-15) {
                        dist_snk[j] = best + rc;
                        par_snk[j] = node;
                    }
                }
            } else {
                done_snk[node] = true;
                for (std::size_t i = 0; i < n_src; ++i) {
                    if (done_src[i] || flow[i * n_snk + node] <= 0) continue;
                    const double rc = -(cost[i * n_snk + node] - pot_src[i] + pot_snk[node]);
                    if (best + rc < dist_src[i] - 1e-15) {
                        dist_src[i] = best + rc;
                        par_src[i] = node;
                    }
                }
            }
        }

        std::size_t target = n_snk;
        double best = kInf;
        for (std::size_t j = 0; j < n_snk; ++j)
            if (demand[j] > 0 && dist_snk[j] < best) { best = dist_snk[j]; target = j; }
        if (target == n_snk) throw Error("transport_lp: no augmenting path (internal)");

        // Johnson potential update, capped at the target distance so edges
        // into unreached nodes keep nonnegative reduced cost.
        for (std::size_t i = 0; i < n_src; ++i) pot_src[i] -= std::min(dist_src[i], best);
        for (std::size_t j = 0; j < n_snk; ++j) pot_snk[j] -= std::min(dist_snk[j], best);

        // bottleneck along the alternating path
        long long push = demand[target];
        {
            std::size_t j = target;
            while (true) {
                const std::size_t i = par_snk[j];
                if (par_src[i] == n_snk) { push = std::min(push, supply[i]); break; }
                j = par_src[i];
                push = std::min(push, flow[i * n_snk + j]);
            }
        }
        demand[target] -= push;
        {
            std::size_t j = target;
            while (true) {
                const std::size_t i = par_snk[j];
                flow[i * n_snk + j] += push;
                if (par_src[i] == n_snk) { supply[i] -= push; break; }
                j = par_src[i];
                flow[i * n_snk + j] -= push;
            }
        }
        shipped += push;
    }

    for (std::size_t i = 0; i < n_src; ++i)
        for (std::size_t j = 0; j < n_snk; ++j)
            if (flow[i * n_snk + j] > 0)
                total_cost += static_cast<double>(flow[i * n_snk + j]) * cost[i * n_snk + j];
    return total_cost / static_cast<double>(total);
}

}  // namespace

LawDistanceReport wasserstein(const EmpiricalLaw& a, const EmpiricalLaw& b, double p) {
    if (a.dim != b.dim) throw DimensionMismatch("wasserstein: sample dimensions differ");
    if (!(p >= 1.0)) throw InvalidExponent("wasserstein requires p >= 1");
    LawDistanceReport report;
    report.metric = LawDistanceReport::Metric::Wasserstein;
    report.p = p;
    if (a.dim == 1) {
        report.method = LawDistanceReport::Method::Quantile1d;
        report.value = quantile_wasserstein(a.samples, b.samples, p);
        return report;
    }
    const std::size_t n = a.size();
    if (n != b.size()) throw TooManySamples("wasserstein d>1 requires equal sample counts");
    if (n > 512) throw TooManySamples("wasserstein d>1 capped at 512 samples");
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i * n + j] = std::pow(euclid(a, i, b, j), p);
    report.method = LawDistanceReport::Method::ExactAssignment;
    report.value = std::pow(assignment_cost(cost, n) / static_cast<double>(n), 1.0 / p);
    return report;
}

LawDistanceReport dbl(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    if (a.dim != b.dim) throw DimensionMismatch("dbl: sample dimensions differ");
    const std::size_t n = a.size(), m = b.size();
    if (n + m > 2000) throw TooManySamples("dbl pooled sample count capped at 2000");
    std::vector<double> cost(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            cost[i * m + j] = std::min(euclid(a, i, b, j), 2.0);
    LawDistanceReport report;
    report.metric = LawDistanceReport::Metric::BoundedLipschitz;
    report.method = LawDistanceReport::Method::DualLP;
    report.value = transport_lp(cost, n, m);
    return report;
}

double ui_defect(const Ensemble& ensemble, double p, double c) {
    if (!(c > 0.0)) throw Error("ui_defect requires c > 0");
    const std::size_t nodes = ensemble.node_count();
    double worst = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < ensemble.ensemble_n; ++m) {
            double norm2 = 0.0;
            for (std::size_t i = 0; i < ensemble.dim; ++i) {
                const double v = ensemble.state(m, k, i);
                norm2 += v * v;
            }
            const double np = std::pow(norm2, 0.5 * p);
            if (np > c) s += np;
        }
        worst = std::max(worst, s / static_cast<double>(ensemble.ensemble_n));
    }
    return worst;
}

std::vector<TauReport> apd_test(const Ensemble& ensemble, const std::vector<double>& taus,
                                double epsilon, double p) {
    const double dt = ensemble.grid.dt;
    const std::size_t nodes = ensemble.node_count();
    const std::size_t n_members = ensemble.ensemble_n;
    const bool scalar = ensemble.dim == 1;

    // Pre-sorted per-node samples make each (t, tau) comparison linear.
    std::vector<std::vector<double>> sorted;
    if (scalar) {
        sorted.resize(nodes);
        for (std::size_t k = 0; k < nodes; ++k) {
            sorted[k].resize(n_members);
            for (std::size_t m = 0; m < n_members; ++m) sorted[k][m] = ensemble.state(m, k);
            std::sort(sorted[k].begin(), sorted[k].end());
        }
    }

    std::vector<TauReport> out;
    out.reserve(taus.size());
    for (double tau : taus) {
        const long long shift = std::llround(tau / dt);
        if (std::abs(tau - static_cast<double>(shift) * dt) > 1e-6 * std::max(1.0, std::abs(tau)))
            throw OffGrid("apd_test: tau is not a grid multiple");
        if (shift < 0 || static_cast<std::size_t>(shift) >= nodes)
            throw EmptyOverlap("apd_test: tau leaves no overlapping window");
        const std::size_t overlap = nodes - static_cast<std::size_t>(shift);

        TauReport report;
        report.tau = static_cast<double>(shift) * dt;
        double sup = 0.0;
        for (std::size_t k = 0; k < overlap; ++k) {
            const std::size_t k2 = k + static_cast<std::size_t>(shift);
            double w;
            if (scalar) {
                double s = 0.0;
                for (std::size_t m = 0; m < n_members; ++m)
                    s += std::pow(std::abs(sorted[k][m] - sorted[k2][m]), p);
                w = std::pow(s / static_cast<double>(n_members), 1.0 / p);
            } else {
                w = wasserstein(law_at(ensemble, ensemble.grid.node(k)),
                                law_at(ensemble, ensemble.grid.node(k2)), p)
                        .value;
            }
            sup = std::max(sup, w);
        }
        report.sup_distance = sup;
        report.accepted = sup <= epsilon;
        report.sup_dbl = std::numeric_limits<double>::quiet_NaN();
        if (2 * n_members <= 2000) {
            // The LP is cubic-ish per node pair; thin the time grid for the
            // companion d_BL figure.
            const std::size_t stride = std::max<std::size_t>(1, overlap / 16);
            double sup_bl = 0.0;
            for (std::size_t k = 0; k < overlap; k += stride) {
                const std::size_t k2 = k + static_cast<std::size_t>(shift);
                sup_bl = std::max(sup_bl,
                                  dbl(law_at(ensemble, ensemble.grid.node(k)),
                                      law_at(ensemble, ensemble.grid.node(k2)))
                                      .value);
            }
            report.sup_dbl = sup_bl;
        }
        out.push_back(report);
    }
    return out;
}

}  // namespace apnum
