#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "apnum/brownian.hpp"
#include "apnum/function_spec.hpp"
#include "apnum/grid.hpp"

namespace apnum {

/// A (t, x)-map affine in the state, with diagonal state coupling:
///   field_i(t, x) = offset_i(t) + slope_i(t) * x_{row(i)}.
/// Drift uses rows = dim entries; a diffusion uses dim * noise_dim entries
/// stored row-major, entry (i, j) coupling to x_i.
struct AffineField {
    std::size_t rows = 1;
    std::size_t cols = 1;
    std::vector<FunctionSpec> offset;  // rows*cols entries
    std::vector<FunctionSpec> slope;   // rows*cols entries

    static AffineField zero(std::size_t rows, std::size_t cols = 1);
    static AffineField additive(FunctionSpec g);                     // scalar, x-free
    static AffineField scalar(FunctionSpec offset, FunctionSpec slope);

    double value(std::size_t i, std::size_t j, double t, double x_row) const {
        const std::size_t e = i * cols + j;
        return eval(offset[e], t) + eval(slope[e], t) * x_row;
    }
};

/// Semilinear problem dX = (A X + F(t, X))dt + G(t, X)dW with
/// A = diag(-decay_i), decay_i > 0.
struct SdeProblem {
    std::size_t dim = 1;
    std::vector<double> decay;     // delta_i > 0
    AffineField drift;             // dim x 1
    AffineField diffusion;         // dim x noise_dim
    std::size_t noise_dim = 1;
    std::vector<double> q_diag;    // noise covariance diagonal
    FunctionSpec lipschitz_k;      // scalar modulus K(t) >= 0
    double growth_m = 1.0;

    double min_decay() const;
    double trace_q() const;

    /// Sampled-check of the growth and Lipschitz bounds on random (t, x).
    void validate(std::uint64_t seed = 0, int trials = 256) const;
};

struct SolverConfig {
    GridWindow window;
    double memory_t = 10.0;    // truncation horizon for the mild convolution
    std::size_t ensemble_n = 1;
    std::uint64_t seed = 0;
    double picard_tol = 1e-6;  // on sup_t E|dX|^2
    int picard_max_iter = 40;
    std::size_t store_stride = 1;  // keep every stride-th grid node in the output

    /// Warns (returns false) when the truncation tail bound
    /// e^{-delta*memory_t} * growth_m exceeds picard_tol / 10.
    bool memory_long_enough(const SdeProblem& problem) const;
};

struct Ensemble {
    SolverConfig config;
    std::size_t dim = 1;
    GridWindow grid;                  // stored grid (window thinned by store_stride)
    std::size_t ensemble_n = 0;
    std::vector<double> values;       // [(member*nodes + k)*dim + i]
    std::vector<double> diagnostics;  // per Picard iteration: sup_t E|X_{n+1}-X_n|^2
    std::uint64_t driver_seed = 0;
    double theta_st = 0.0;            // contraction constant evaluated for the run
    bool contraction_ok = true;       // theta_st < 1

    std::size_t node_count() const { return grid.node_count(); }
    double state(std::size_t member, std::size_t k, std::size_t i = 0) const {
        return values[(member * node_count() + k) * dim + i];
    }
};

/// sup over window starts xi in [t_lo, t_hi - 1] of (int_xi^{xi+1} K^p dt)^{1/p}.
double stepanov_norm(const FunctionSpec& k, double p, double t_lo, double t_hi,
                     double dt = 1e-3);

/// Contraction constant for existence/uniqueness:
///   2 k2^2 / (delta (1 - e^{-delta})) + 2 k2^2 trQ / (1 - e^{-2 delta}).
double theta_st(double k_norm_s2, double delta, double trace_q);

struct ThetaPrime {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double theta_prime = 0.0;
};

/// Constants for almost periodicity in 2-UI distribution; requires p > 2,
/// with q from 1/2 = 1/q + 1/p.
ThetaPrime theta_prime_st(double k_norm_sp, double delta, double p, double trace_q);

struct KappaProfile {
    double max_kappa = 0.0;
    double bound = 0.0;    // |K|_{S^p}^p / (1 - e^{-delta})
    bool bound_ok = false; // max_kappa <= bound within quadrature slack
};

/// kappa(t) = int_{t-memory}^{t} e^{-delta (t-s)} K^p(s) ds on the grid.
KappaProfile kappa_profile(const FunctionSpec& k, double delta, double p,
                           const GridWindow& grid, double slack = 0.01);

/// Component-wise e^{-decay_i t} x_i.
std::vector<double> semigroup_apply(std::span<const double> decay, double t,
                                    std::span<const double> x);

/// Picard iteration on the truncated mild-solution map, shared Brownian
/// increments per member, X_0 = 0.
Ensemble picard_solve(const SdeProblem& problem, const SolverConfig& config);

/// One-step exponential integrator on the same driver streams:
///   X_{k+1} = S(dt)(X_k + F(t_k, X_k) dt + G(t_k, X_k) dW_k),
/// burn-in from t0 - memory_t with X = 0.
Ensemble exponential_euler_solve(const SdeProblem& problem, const SolverConfig& config);

struct OuExact {
    SampledPath path;
    double stationary_var = 0.0;
};

/// Exact-discretization Ornstein-Uhlenbeck sample: Gaussian transition with
/// mean e^{-delta dt} x and variance stationary_var (1 - e^{-2 delta dt}),
/// started from the stationary law.
OuExact ou_exact(double delta, double sigma, double trace_q, const GridWindow& grid,
                 std::uint64_t seed);

/// x(t) = int_{t-memory_t}^{t} e^{-delta (t-s)} forcing(s) ds.
/// The per-step trapezoid cells are refined adaptively (interval doubling)
/// until the cell integral converges, so narrow forcing spikes are resolved
/// without a finer output grid.
SampledPath deterministic_mild_solve(double delta, const FunctionSpec& forcing,
                                     const GridWindow& grid, double memory_t,
                                     double cell_tol = 1e-8);

}  // namespace apnum
