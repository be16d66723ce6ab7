#include "apnum/function_spec.hpp"

#include <cmath>

#include "apnum/errors.hpp"

namespace apnum {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Overflow guard on the spike-train inner sum: exp() of anything above this
// would leave double range once integrated against |.|^p weights.
constexpr double kSpikeExpGuard = 700.0;

// Largest series index whose peak beta_n = n^3 stays below the guard.
constexpr int kSpikeDefaultMax = 8;

double levitan_g(double t) { return 2.0 + std::cos(t) + std::cos(kSqrt2 * t); }

double levitan_H(double t) { return std::sin(1.0 / levitan_g(t)); }

double levitan_h(double t) {
    const double g = levitan_g(t);
    return std::cos(1.0 / g) * (std::sin(t) + kSqrt2 * std::sin(kSqrt2 * t)) / (g * g);
}

// Spike train of Remark-style 4n-periodic triangular bumps:
//   f(t) = exp( sum_{n=2}^{n_max} g_n(t) ),
//   g_n(t) = n^3 * max(0, 1 - 2 n^5 |t~ - n|),  t~ = t reduced mod 4n into [-2n, 2n).
// The inner sum is guarded: values whose exponent exceeds the double range
// raise NonFinite instead of silently saturating.
double spike_train_eval(double t, int n_max) {
    double total = 0.0;
    for (int n = 2; n <= n_max; ++n) {
        const double period = 4.0 * n;
        double tr = std::fmod(t + 2.0 * n, period);
        if (tr < 0.0) tr += period;
        tr -= 2.0 * n;
        const double alpha = 1.0 / std::pow(static_cast<double>(n), 5);
        const double bump = 1.0 - (2.0 / alpha) * std::abs(tr - n);
        if (bump > 0.0) total += static_cast<double>(n) * n * n * bump;
    }
    if (total > kSpikeExpGuard)
        throw NonFinite("spike_train: inner sum exceeds overflow guard");
    return std::exp(total);
}

double apply_pointwise(const std::string& name, double v) {
    if (name == "sin") return std::sin(v);
    if (name == "cos") return std::cos(v);
    if (name == "abs") return std::abs(v);
    if (name == "exp") return std::exp(v);
    if (name == "neg") return -v;
    if (name == "square") return v * v;
    if (name == "reciprocal") {
        if (v == 0.0) throw NonFinite("reciprocal of zero");
        return 1.0 / v;
    }
    throw UnknownPrimitive("unknown pointwise map: " + name);
}

}  // namespace

double eval(const FunctionSpec& spec, double t) {
    struct Visitor {
        double t;

        double operator()(const TrigPolynomial& p) const {
            double s = 0.0;
            for (const auto& term : p.terms)
                s += term.amplitude * std::sin(term.frequency * t + term.phase);
            return s;
        }
        double operator()(const CorpusPrimitive& p) const {
            if (p.name == "levitan_g") return levitan_g(t);
            if (p.name == "levitan_H") return levitan_H(t);
            if (p.name == "levitan_h") return levitan_h(t);
            if (p.name == "spike_train") return spike_train_eval(t, kSpikeDefaultMax);
            throw UnknownPrimitive("unknown corpus primitive: " + p.name);
        }
        double operator()(const AffineNode& a) const {
            return a.scale * eval(*a.inner, t) + a.offset;
        }
        double operator()(const ComposeNode& c) const {
            return apply_pointwise(c.outer, eval(*c.inner, t));
        }
        double operator()(const SumNode& s) const {
            double acc = 0.0;
            for (const auto& term : s.terms) acc += eval(*term, t);
            return acc;
        }
        double operator()(const ProductNode& p) const {
            double acc = 1.0;
            for (const auto& f : p.factors) acc *= eval(*f, t);
            return acc;
        }
        double operator()(const ParametricNode& p) const {
            if (p.form == "exp_abs_decay") {
                if (p.params.size() != 2) throw SchemaError("exp_abs_decay needs 2 params");
                return p.params[0] * std::exp(-std::abs(t) / p.params[1]);
            }
            if (p.form == "power_abs") {
                if (p.params.size() != 1) throw SchemaError("power_abs needs 1 param");
                return std::pow(std::abs(t), p.params[0]);
            }
            if (p.form == "spike_train") {
                if (p.params.size() != 1) throw SchemaError("spike_train needs 1 param");
                const int n_max = static_cast<int>(p.params[0]);
                if (n_max < 2 || n_max > kSpikeDefaultMax)
                    throw SchemaError("spike_train n_max out of supported range");
                return spike_train_eval(t, n_max);
            }
            throw UnknownPrimitive("unknown parametric form: " + p.form);
        }
    };
    const double v = std::visit(Visitor{t}, spec.node);
    if (!std::isfinite(v)) throw NonFinite("function evaluation is not finite");
    return v;
}

SampledPath sample(const FunctionSpec& spec, const GridWindow& window) {
    SampledPath path(window, 1);
    const std::size_t n = window.node_count();
    for (std::size_t k = 0; k < n; ++k) path.values[k] = eval(spec, window.node(k));
    return path;
}

namespace fspec {

FunctionSpec trig(std::vector<TrigTerm> terms) {
    return FunctionSpec{TrigPolynomial{std::move(terms)}};
}

FunctionSpec constant(double c) {
    return FunctionSpec{AffineNode{0.0, c, std::make_shared<FunctionSpec>(trig({}))}};
}

FunctionSpec primitive(const std::string& name) { return FunctionSpec{CorpusPrimitive{name}}; }

FunctionSpec affine(double scale, double offset, FunctionSpec inner) {
    return FunctionSpec{AffineNode{scale, offset, std::make_shared<FunctionSpec>(std::move(inner))}};
}

FunctionSpec compose(const std::string& outer, FunctionSpec inner) {
    return FunctionSpec{ComposeNode{outer, std::make_shared<FunctionSpec>(std::move(inner))}};
}

FunctionSpec sum(std::vector<FunctionSpec> terms) {
    SumNode node;
    for (auto& t : terms) node.terms.push_back(std::make_shared<FunctionSpec>(std::move(t)));
    return FunctionSpec{std::move(node)};
}

FunctionSpec product(std::vector<FunctionSpec> factors) {
    ProductNode node;
    for (auto& f : factors) node.factors.push_back(std::make_shared<FunctionSpec>(std::move(f)));
    return FunctionSpec{std::move(node)};
}

FunctionSpec parametric(const std::string& form, std::vector<double> params) {
    return FunctionSpec{ParametricNode{form, std::move(params)}};
}

}  // namespace fspec

FunctionSpec compose_with_state(const ParametricFunction& fparam, const FunctionSpec& u) {
    return fspec::sum({fparam.offset, fspec::product({fparam.slope, u})});
}

}  // namespace apnum
