#include "apnum/sde.hpp"

#include <algorithm>
#include <cmath>

#include "apnum/errors.hpp"

namespace apnum {

AffineField AffineField::zero(std::size_t rows, std::size_t cols) {
    AffineField f;
    f.rows = rows;
    f.cols = cols;
    for (std::size_t e = 0; e < rows * cols; ++e) {
        f.offset.push_back(fspec::constant(0.0));
        f.slope.push_back(fspec::constant(0.0));
    }
    return f;
}

AffineField AffineField::additive(FunctionSpec g) {
    AffineField f;
    f.rows = f.cols = 1;
    f.offset.push_back(std::move(g));
    f.slope.push_back(fspec::constant(0.0));
    return f;
}

AffineField AffineField::scalar(FunctionSpec offset, FunctionSpec slope) {
    AffineField f;
    f.rows = f.cols = 1;
    f.offset.push_back(std::move(offset));
    f.slope.push_back(std::move(slope));
    return f;
}

double SdeProblem::min_decay() const {
    double m = decay.empty() ? 0.0 : decay.front();
    for (double d : decay) m = std::min(m, d);
    return m;
}

double SdeProblem::trace_q() const {
    double s = 0.0;
    for (double q : q_diag) s += q;
    return s;
}

void SdeProblem::validate(std::uint64_t seed, int trials) const {
    if (dim == 0 || decay.size() != dim) throw Error("SdeProblem: bad decay vector");
    if (min_decay() <= 0.0) throw Error("SdeProblem: decay entries must be positive");
    if (drift.rows != dim || diffusion.rows != dim || diffusion.cols != noise_dim)
        throw DimensionMismatch("SdeProblem: field shapes do not match dim/noise_dim");
    for (int trial = 0; trial < trials; ++trial) {
        const double t = 20.0 * counter_gaussian(seed, 1, trial, 0);
        const double x = 5.0 * counter_gaussian(seed, 2, trial, 0);
        const double y = 5.0 * counter_gaussian(seed, 3, trial, 0);
        double f_norm = 0.0, g_norm = 0.0, df = 0.0, dg = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double fi = drift.value(i, 0, t, x);
            f_norm += fi * fi;
            const double d = drift.value(i, 0, t, x) - drift.value(i, 0, t, y);
            df += d * d;
            for (std::size_t j = 0; j < noise_dim; ++j) {
                const double gij = diffusion.value(i, j, t, x);
                g_norm += gij * gij;
                const double dd = gij - diffusion.value(i, j, t, y);
                dg += dd * dd;
            }
        }
        const double growth = std::sqrt(f_norm) + std::sqrt(g_norm);
        if (growth > growth_m * (1.0 + std::abs(x)) + 1e-9)
            throw Error("SdeProblem: growth bound violated on sampled (t, x)");
        const double lip = std::sqrt(df) + std::sqrt(dg);
        if (lip > eval(lipschitz_k, t) * std::abs(x - y) + 1e-9)
            throw Error("SdeProblem: Lipschitz bound violated on sampled (t, x, y)");
    }
}

bool SolverConfig::memory_long_enough(const SdeProblem& problem) const {
    const double tail = std::exp(-problem.min_decay() * memory_t) * problem.growth_m;
    return tail < picard_tol / 10.0;
}

namespace {

double max_unit_window_integral(const std::vector<double>& u, double dt) {
    const std::size_t m = static_cast<std::size_t>(std::llround(1.0 / dt));
    if (u.size() < m + 1) throw WindowTooShort("need at least one unit window");
    std::vector<double> prefix(u.size() + 1, 0.0);
    for (std::size_t k = 0; k < u.size(); ++k) prefix[k + 1] = prefix[k] + u[k];
    double best = 0.0;
    for (std::size_t k = 0; k + m < u.size(); ++k) {
        const double integral =
            dt * (prefix[k + m + 1] - prefix[k]) - 0.5 * dt * (u[k] + u[k + m]);
        best = std::max(best, integral);
    }
    return best;
}

}  // namespace

double stepanov_norm(const FunctionSpec& k, double p, double t_lo, double t_hi,
                     double dt) {
    if (!(p >= 1.0)) throw Error("stepanov_norm requires p >= 1");
    const std::size_t n = static_cast<std::size_t>(std::llround((t_hi - t_lo) / dt)) + 1;
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double v = eval(k, t_lo + static_cast<double>(j) * dt);
        if (!std::isfinite(v)) throw NonFinite("stepanov_norm: K evaluation not finite");
        u[j] = std::pow(std::abs(v), p);
    }
    return std::pow(max_unit_window_integral(u, dt), 1.0 / p);
}

double theta_st(double k_norm_s2, double delta, double trace_q) {
    if (!(delta > 0.0)) throw Error("theta_st requires delta > 0");
    const double k2 = k_norm_s2 * k_norm_s2;
    return 2.0 * k2 / (delta * (1.0 - std::exp(-delta))) +
           2.0 * k2 * trace_q / (1.0 - std::exp(-2.0 * delta));
}

ThetaPrime theta_prime_st(double k_norm_sp, double delta, double p, double trace_q) {
    if (!(p > 2.0)) throw InvalidExponent("theta_prime_st requires p > 2");
    if (!(delta > 0.0)) throw Error("theta_prime_st requires delta > 0");
    const double q = 2.0 * p / (p - 2.0);  // 1/2 = 1/q + 1/p
    const double kp = std::pow(k_norm_sp, p);
    ThetaPrime out;
    out.beta1 = (4.0 / delta) * std::pow(kp / (1.0 - std::exp(-p * delta / 4.0)), 2.0 / p);
    out.beta2 = 4.0 * trace_q * std::pow(kp / (1.0 - std::exp(-p * delta / 2.0)), 2.0 / p);
    out.theta_prime = (4.0 / (3.0 * q * delta)) *
                      (std::pow(3.0 * out.beta1, q / 2.0) + std::pow(3.0 * out.beta2, q / 2.0));
    return out;
}

KappaProfile kappa_profile(const FunctionSpec& k, double delta, double p,
                           const GridWindow& grid, double slack) {
    if (!(delta > 0.0)) throw Error("kappa_profile requires delta > 0");
    const double dt = grid.dt;
    const double memory = 40.0 / delta;  // e^{-40} tail
    const std::size_t burn = static_cast<std::size_t>(std::llround(memory / dt));
    const std::size_t n = grid.node_count();
    const double decay_step = std::exp(-delta * dt);
    const double start = grid.t0 - static_cast<double>(burn) * dt;

    double kappa = 0.0;
    double prev = std::pow(std::abs(eval(k, start)), p);
    double max_kappa = 0.0;
    for (std::size_t j = 1; j < burn + n; ++j) {
        const double t = start + static_cast<double>(j) * dt;
        const double cur = std::pow(std::abs(eval(k, t)), p);
        kappa = decay_step * kappa + 0.5 * dt * (decay_step * prev + cur);
        prev = cur;
        if (j >= burn) max_kappa = std::max(max_kappa, kappa);
    }

    KappaProfile out;
    out.max_kappa = max_kappa;
    const double norm = stepanov_norm(k, p, start, grid.t1, std::min(dt, 1e-3));
    out.bound = std::pow(norm, p) / (1.0 - std::exp(-delta));
    out.bound_ok = max_kappa <= out.bound * (1.0 + slack);
    return out;
}

std::vector<double> semigroup_apply(std::span<const double> decay, double t,
                                    std::span<const double> x) {
    if (t < 0.0) throw NegativeTime("semigroup_apply requires t >= 0");
    if (decay.size() != x.size()) throw DimensionMismatch("decay/state size mismatch");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(-decay[i] * t) * x[i];
    return out;
}

namespace {

// Coefficient tables on the extended grid: the fields depend on x only
// through an affine slope, so everything in t can be evaluated once.
struct CoefficientTables {
    std::size_t dim = 1, noise_dim = 1, nodes = 0;
    std::vector<double> drift_off, drift_slp;  // [i*nodes + k]
    std::vector<double> diff_off, diff_slp;    // [(i*noise_dim + j)*nodes + k]

    CoefficientTables(const SdeProblem& problem, double start, double dt, std::size_t n)
        : dim(problem.dim), noise_dim(problem.noise_dim), nodes(n) {
        drift_off.resize(dim * n);
        drift_slp.resize(dim * n);
        diff_off.resize(dim * noise_dim * n);
        diff_slp.resize(dim * noise_dim * n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = start + static_cast<double>(k) * dt;
            for (std::size_t i = 0; i < dim; ++i) {
                drift_off[i * n + k] = eval(problem.drift.offset[i], t);
                drift_slp[i * n + k] = eval(problem.drift.slope[i], t);
                for (std::size_t j = 0; j < noise_dim; ++j) {
                    const std::size_t e = i * noise_dim + j;
                    diff_off[e * n + k] = eval(problem.diffusion.offset[e], t);
                    diff_slp[e * n + k] = eval(problem.diffusion.slope[e], t);
                }
            }
        }
    }

    double drift(std::size_t i, std::size_t k, double x) const {
        return drift_off[i * nodes + k] + drift_slp[i * nodes + k] * x;
    }
    double diffusion(std::size_t i, std::size_t j, std::size_t k, double x) const {
        const std::size_t e = i * noise_dim + j;
        return diff_off[e * nodes + k] + diff_slp[e * nodes + k] * x;
    }
};

struct SolveLayout {
    double start = 0.0;
    double dt = 0.0;
    std::size_t n_ext = 0;    // extended grid nodes
    std::size_t burn = 0;     // nodes before t0
    std::size_t stride = 1;
    GridWindow stored;

    SolveLayout(const SolverConfig& config) {
        dt = config.window.dt;
        burn = static_cast<std::size_t>(std::llround(config.memory_t / dt));
        start = config.window.t0 - static_cast<double>(burn) * dt;
        n_ext = burn + config.window.node_count();
        stride = std::max<std::size_t>(1, config.store_stride);
        const std::size_t out_nodes = (config.window.node_count() - 1) / stride + 1;
        stored = GridWindow(config.window.t0,
                            config.window.t0 + static_cast<double>((out_nodes - 1) * stride) * dt,
                            dt * static_cast<double>(stride));
    }

    std::size_t stored_nodes() const { return stored.node_count(); }
};

Ensemble make_ensemble(const SdeProblem& problem, const SolverConfig& config,
                       const SolveLayout& layout) {
    Ensemble e;
    e.config = config;
    e.dim = problem.dim;
    e.grid = layout.stored;
    e.ensemble_n = config.ensemble_n;
    e.values.assign(config.ensemble_n * layout.stored_nodes() * problem.dim, 0.0);
    e.driver_seed = config.seed;
    const double k2 = stepanov_norm(problem.lipschitz_k, 2.0, layout.start,
                                    std::max(config.window.t1, layout.start + 1.0));
    e.theta_st = theta_st(k2, problem.min_decay(), problem.trace_q());
    e.contraction_ok = e.theta_st < 1.0;
    return e;
}

// One Picard sweep for one member: from the current iterate `cur` (on the
// extended grid), build the next iterate into `nxt`. Deterministic integral
// by trapezoid, stochastic by left-point Ito sums, both via exact
// exponential recursions truncated at the extended-grid start.
void picard_sweep(const SdeProblem& problem, const CoefficientTables& coef,
                  const BrownianDriver& driver, const SolveLayout& layout,
                  std::uint64_t member, const std::vector<double>& cur,
                  std::vector<double>& nxt) {
    const std::size_t dim = problem.dim, m_noise = problem.noise_dim, n = layout.n_ext;
    const double dt = layout.dt;
    std::vector<double> det(dim, 0.0), sto(dim, 0.0), decay_step(dim);
    for (std::size_t i = 0; i < dim; ++i) decay_step[i] = std::exp(-problem.decay[i] * dt);

    for (std::size_t i = 0; i < dim; ++i) nxt[i] = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double f_left = coef.drift(i, k, cur[k * dim + i]);
            const double f_right = coef.drift(i, k + 1, cur[(k + 1) * dim + i]);
            det[i] = decay_step[i] * det[i] + 0.5 * dt * (decay_step[i] * f_left + f_right);
            double g_dw = 0.0;
            for (std::size_t j = 0; j < m_noise; ++j)
                g_dw += coef.diffusion(i, j, k, cur[k * dim + i]) * driver.increment(member, k, j);
            sto[i] = decay_step[i] * (sto[i] + g_dw);
            nxt[(k + 1) * dim + i] = det[i] + sto[i];
        }
    }
}

}  // namespace

Ensemble picard_solve(const SdeProblem& problem, const SolverConfig& config) {
    const SolveLayout layout(config);
    const std::size_t dim = problem.dim, n = layout.n_ext;
    const CoefficientTables coef(problem, layout.start, layout.dt, n);
    const BrownianDriver driver(config.seed, layout.dt, problem.q_diag);
    Ensemble ensemble = make_ensemble(problem, config, layout);

    // Pilot pass on a slice of the ensemble fixes the iteration count, so the
    // full pass can stream member by member with O(nodes) memory.
    const std::size_t pilot_n = std::min<std::size_t>(config.ensemble_n, 128);
    std::size_t iters = 0;
    {
        std::vector<std::vector<double>> paths(pilot_n, std::vector<double>(n * dim, 0.0));
        std::vector<double> nxt(n * dim, 0.0);
        std::vector<double> acc(n, 0.0);
        for (int it = 0; it < config.picard_max_iter; ++it) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t m = 0; m < pilot_n; ++m) {
                picard_sweep(problem, coef, driver, layout, m, paths[m], nxt);
                for (std::size_t k = 0; k < n; ++k) {
                    double d2 = 0.0;
                    for (std::size_t i = 0; i < dim; ++i) {
                        const double d = nxt[k * dim + i] - paths[m][k * dim + i];
                        d2 += d * d;
                    }
                    acc[k] += d2;
                }
                paths[m].swap(nxt);
            }
            ++iters;
            double sup = 0.0;
            for (std::size_t k = layout.burn; k < n; ++k)
                sup = std::max(sup, acc[k] / static_cast<double>(pilot_n));
            if (sup < config.picard_tol) break;
        }
    }

    // Full pass, synchronized at `iters` sweeps for every member.
    std::vector<double> diag_acc(iters * n, 0.0);
    std::vector<double> cur(n * dim), nxt(n * dim);
    const std::size_t stored = layout.stored_nodes();
    for (std::size_t m = 0; m < config.ensemble_n; ++m) {
        std::fill(cur.begin(), cur.end(), 0.0);
        for (std::size_t it = 0; it < iters; ++it) {
            picard_sweep(problem, coef, driver, layout, m, cur, nxt);
            double* acc = diag_acc.data() + it * n;
            for (std::size_t k = 0; k < n; ++k) {
                double d2 = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    const double d = nxt[k * dim + i] - cur[k * dim + i];
                    d2 += d * d;
                }
                acc[k] += d2;
            }
            cur.swap(nxt);
        }
        for (double v : cur)
            if (!std::isfinite(v)) throw NonFinite("picard_solve produced non-finite state");
        for (std::size_t s = 0; s < stored; ++s) {
            const std::size_t k = layout.burn + s * layout.stride;
            for (std::size_t i = 0; i < dim; ++i)
                ensemble.values[(m * stored + s) * dim + i] = cur[k * dim + i];
        }
    }

    ensemble.diagnostics.resize(iters);
    for (std::size_t it = 0; it < iters; ++it) {
        double sup = 0.0;
        for (std::size_t k = layout.burn; k < n; ++k)
            sup = std::max(sup, diag_acc[it * n + k] / static_cast<double>(config.ensemble_n));
        ensemble.diagnostics[it] = sup;
    }
    if (!ensemble.diagnostics.empty() && ensemble.diagnostics.back() >= config.picard_tol &&
        ensemble.contraction_ok && iters == static_cast<std::size_t>(config.picard_max_iter))
        throw NoConvergence("picard_solve: tolerance unmet at picard_max_iter");
    return ensemble;
}

Ensemble exponential_euler_solve(const SdeProblem& problem, const SolverConfig& config) {
    const SolveLayout layout(config);
    const std::size_t dim = problem.dim, m_noise = problem.noise_dim, n = layout.n_ext;
    const double dt = layout.dt;
    const CoefficientTables coef(problem, layout.start, dt, n);
    const BrownianDriver driver(config.seed, dt, problem.q_diag);
    Ensemble ensemble = make_ensemble(problem, config, layout);

    std::vector<double> decay_step(dim);
    for (std::size_t i = 0; i < dim; ++i) decay_step[i] = std::exp(-problem.decay[i] * dt);

    const std::size_t stored = layout.stored_nodes();
    std::vector<double> x(dim);
    for (std::size_t m = 0; m < config.ensemble_n; ++m) {
        std::fill(x.begin(), x.end(), 0.0);
        std::size_t next_store = 0;
        if (layout.burn == 0) {
            for (std::size_t i = 0; i < dim; ++i) ensemble.values[(m * stored) * dim + i] = x[i];
            next_store = 1;
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            for (std::size_t i = 0; i < dim; ++i) {
                double g_dw = 0.0;
                for (std::size_t j = 0; j < m_noise; ++j)
                    g_dw += coef.diffusion(i, j, k, x[i]) * driver.increment(m, k, j);
                x[i] = decay_step[i] * (x[i] + coef.drift(i, k, x[i]) * dt + g_dw);
            }
            const std::size_t k1 = k + 1;
            if (k1 >= layout.burn && (k1 - layout.burn) % layout.stride == 0) {
                const std::size_t s = (k1 - layout.burn) / layout.stride;
                if (s < stored && s == next_store) {
                    for (std::size_t i = 0; i < dim; ++i) {
                        if (!std::isfinite(x[i]))
                            throw NonFinite("exponential_euler_solve produced non-finite state");
                        ensemble.values[(m * stored + s) * dim + i] = x[i];
                    }
                    ++next_store;
                }
            }
        }
    }
    return ensemble;
}

OuExact ou_exact(double delta, double sigma, double trace_q, const GridWindow& grid,
                 std::uint64_t seed) {
    if (!(delta > 0.0)) throw Error("ou_exact requires delta > 0");
    OuExact out;
    out.stationary_var = sigma * sigma * trace_q / (2.0 * delta);
    out.path = SampledPath(grid, 1);
    const double rho = std::exp(-delta * grid.dt);
    const double step_sd = std::sqrt(out.stationary_var * (1.0 - rho * rho));
    double x = std::sqrt(out.stationary_var) * counter_gaussian(seed, 0, 0, 0);
    out.path.values[0] = x;
    for (std::size_t k = 1; k < grid.node_count(); ++k) {
        x = rho * x + step_sd * counter_gaussian(seed, 0, k, 0);
        out.path.values[k] = x;
    }
    return out;
}

SampledPath deterministic_mild_solve(double delta, const FunctionSpec& forcing,
                                     const GridWindow& grid, double memory_t,
                                     double cell_tol) {
    if (!(delta > 0.0)) throw Error("deterministic_mild_solve requires delta > 0");
    const double dt = grid.dt;
    const std::size_t burn = static_cast<std::size_t>(std::llround(memory_t / dt));
    const double start = grid.t0 - static_cast<double>(burn) * dt;
    const std::size_t n = burn + grid.node_count();
    const double decay_step = std::exp(-delta * dt);

    SampledPath out(grid, 1);
    double x = 0.0;
    double f_left = eval(forcing, start);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double a = start + static_cast<double>(k) * dt;
        const double b = a + dt;
        const double f_right = eval(forcing, b);
        // adaptive doubling of the trapezoid cell integral
        //   int_a^b e^{-delta (b - s)} f(s) ds
        double cell = 0.5 * dt * (decay_step * f_left + f_right);
        std::size_t m = 1;
        while (m < (std::size_t{1} << 16)) {
            const std::size_t m2 = 2 * m;
            double mid_sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double s = a + static_cast<double>(2 * j + 1) * dt / static_cast<double>(m2);
                mid_sum += std::exp(-delta * (b - s)) * eval(forcing, s);
            }
            const double refined = 0.5 * cell + (dt / static_cast<double>(m2)) * mid_sum;
            const bool converged =
                std::abs(refined - cell) < cell_tol * std::max(1.0, std::abs(refined));
            cell = refined;
            m = m2;
            if (converged && m >= 8) break;
        }
        x = decay_step * x + cell;
        if (!std::isfinite(x)) throw NonFinite("deterministic_mild_solve diverged");
        if (k + 1 >= burn) out.values[k + 1 - burn] = x;
        f_left = f_right;
    }
    return out;
}

}  // namespace apnum
