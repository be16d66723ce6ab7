#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "apnum/errors.hpp"

namespace apnum {

/// Uniform time grid on [t0, t1] with step dt. Nodes are t0 + k*dt.
struct GridWindow {
    double t0 = 0.0;
    double t1 = 1.0;
    double dt = 1e-3;

    GridWindow() = default;
    GridWindow(double t0_, double t1_, double dt_) : t0(t0_), t1(t1_), dt(dt_) {
        if (!(t1 > t0)) throw Error("GridWindow: t1 must exceed t0");
        if (!(dt > 0.0)) throw Error("GridWindow: dt must be positive");
    }

    std::size_t node_count() const {
        return static_cast<std::size_t>(std::llround((t1 - t0) / dt)) + 1;
    }

    double node(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }

    double length() const { return t1 - t0; }

    /// Index of the grid node nearest to t; throws OffGrid if t is not
    /// within half a step of a node, or outside the window.
    std::size_t index_of(double t) const {
        const double x = (t - t0) / dt;
        const long long k = std::llround(x);
        if (k < 0 || static_cast<std::size_t>(k) >= node_count())
            throw OffGrid("time outside grid window");
        if (std::abs(x - static_cast<double>(k)) > 1e-6)
            throw OffGrid("time not on grid");
        return static_cast<std::size_t>(k);
    }

    bool contains(double t) const { return t >= t0 - 1e-12 && t <= t1 + 1e-12; }
};

/// Trajectory values on a uniform grid; dim >= 1 components per node,
/// stored node-major: values[k*dim + i].
struct SampledPath {
    GridWindow window;
    std::size_t dim = 1;
    std::vector<double> values;

    SampledPath() = default;
    SampledPath(GridWindow w, std::size_t d) : window(w), dim(d), values(w.node_count() * d, 0.0) {}

    std::size_t node_count() const { return window.node_count(); }

    double& at(std::size_t k, std::size_t i = 0) { return values[k * dim + i]; }
    double at(std::size_t k, std::size_t i = 0) const { return values[k * dim + i]; }

    /// Euclidean norm of the state at node k.
    double norm_at(std::size_t k) const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double v = values[k * dim + i];
            s += v * v;
        }
        return std::sqrt(s);
    }

    void check_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) throw NonFinite("SampledPath contains non-finite values");
    }
};

inline void require_same_grid(const SampledPath& f, const SampledPath& g) {
    if (f.dim != g.dim) throw DimensionMismatch("paths have different state dimensions");
    const auto &a = f.window, &b = g.window;
    if (std::abs(a.t0 - b.t0) > 1e-12 || std::abs(a.t1 - b.t1) > 1e-12 ||
        std::abs(a.dt - b.dt) > 1e-15 || f.node_count() != g.node_count())
        throw GridMismatch("paths do not share a grid");
}

}  // namespace apnum
