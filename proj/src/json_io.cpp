#include "apnum/json_io.hpp"

#include "apnum/errors.hpp"

namespace apnum {

using nlohmann::json;

namespace {

json ptr_to_json(const SpecPtr& p) {
    if (!p) throw Error("null spec child");
    return spec_to_json(*p);
}

}  // namespace

json spec_to_json(const FunctionSpec& spec) {
    return std::visit(
        [](const auto& node) -> json {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, TrigPolynomial>) {
                json terms = json::array();
                for (const auto& t : node.terms)
                    terms.push_back({t.amplitude, t.frequency, t.phase});
                return {{"kind", "TrigPolynomial"}, {"terms", terms}};
            } else if constexpr (std::is_same_v<T, CorpusPrimitive>) {
                return {{"kind", "CorpusPrimitive"}, {"name", node.name}};
            } else if constexpr (std::is_same_v<T, AffineNode>) {
                return {{"kind", "Affine"},
                        {"scale", node.scale},
                        {"offset", node.offset},
                        {"inner", ptr_to_json(node.inner)}};
            } else if constexpr (std::is_same_v<T, ComposeNode>) {
                return {{"kind", "Compose"},
                        {"outer", node.outer},
                        {"inner", ptr_to_json(node.inner)}};
            } else if constexpr (std::is_same_v<T, SumNode>) {
                json terms = json::array();
                for (const auto& t : node.terms) terms.push_back(ptr_to_json(t));
                return {{"kind", "Sum"}, {"terms", terms}};
            } else if constexpr (std::is_same_v<T, ProductNode>) {
                json factors = json::array();
                for (const auto& f : node.factors) factors.push_back(ptr_to_json(f));
                return {{"kind", "Product"}, {"factors", factors}};
            } else {
                return {{"kind", "Parametric"}, {"form", node.form}, {"params", node.params}};
            }
        },
        spec.node);
}

FunctionSpec spec_from_json(const json& j) {
    try {
        if (!j.is_object() || !j.contains("kind"))
            throw SchemaError("spec JSON must be an object with a \"kind\" field");
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "TrigPolynomial") {
            std::vector<TrigTerm> terms;
            for (const auto& t : j.at("terms")) {
                if (!t.is_array() || t.size() != 3)
                    throw SchemaError("trig term must be [amplitude, frequency, phase]");
                terms.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
            }
            return fspec::trig(std::move(terms));
        }
        if (kind == "CorpusPrimitive")
            return fspec::primitive(j.at("name").get<std::string>());
        if (kind == "Affine")
            return fspec::affine(j.at("scale").get<double>(), j.at("offset").get<double>(),
                                 spec_from_json(j.at("inner")));
        if (kind == "Compose")
            return fspec::compose(j.at("outer").get<std::string>(),
                                  spec_from_json(j.at("inner")));
        if (kind == "Sum") {
            std::vector<FunctionSpec> terms;
            for (const auto& t : j.at("terms")) terms.push_back(spec_from_json(t));
            return fspec::sum(std::move(terms));
        }
        if (kind == "Product") {
            std::vector<FunctionSpec> factors;
            for (const auto& f : j.at("factors")) factors.push_back(spec_from_json(f));
            return fspec::product(std::move(factors));
        }
        if (kind == "Parametric")
            return fspec::parametric(j.at("form").get<std::string>(),
                                     j.at("params").get<std::vector<double>>());
        throw SchemaError("unknown spec kind: " + kind);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed spec JSON: ") + e.what());
    }
}

json metric_to_json(const MetricKind& m) {
    switch (m.kind) {
        case MetricKind::Kind::Uniform:
            return {{"kind", "Uniform"}};
        case MetricKind::Kind::Stepanov:
            return {{"kind", "Stepanov"}, {"p", m.p}, {"windowLen", m.window_len}};
        case MetricKind::Kind::StepanovMeasure:
            return {{"kind", "StepanovMeasure"}, {"windowLen", m.window_len}};
    }
    throw Error("unreachable metric kind");
}

MetricKind metric_from_json(const json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "Uniform") return MetricKind::uniform();
        if (kind == "Stepanov")
            return MetricKind::stepanov(j.at("p").get<double>(),
                                        j.value("windowLen", 1.0));
        if (kind == "StepanovMeasure")
            return MetricKind::stepanov_measure(j.value("windowLen", 1.0));
        throw SchemaError("unknown metric kind: " + kind);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed metric JSON: ") + e.what());
    }
}

json scan_to_json(const AlmostPeriodSet& set) {
    return {{"metric", metric_to_json(set.metric)},
            {"epsilon", set.epsilon},
            {"tauMin", set.tau_min},
            {"tauMax", set.tau_max},
            {"stepTau", set.step_tau},
            {"periods", set.periods},
            {"maxGap", std::isfinite(set.max_gap) ? json(set.max_gap) : json("inf")}};
}

json check_to_json(const CheckResult& c) {
    return {{"check", c.check},
            {"expected", c.expected},
            {"observed", c.observed},
            {"tolerance", c.tolerance},
            {"pass", c.pass}};
}

json tau_to_json(const TauReport& r) {
    json j = {{"tau", r.tau}, {"supDistance", r.sup_distance}, {"accepted", r.accepted}};
    if (std::isfinite(r.sup_dbl)) j["supDbl"] = r.sup_dbl;
    return j;
}

json law_report_to_json(const LawDistanceReport& r) {
    const char* metric =
        r.metric == LawDistanceReport::Metric::Wasserstein ? "Wasserstein" : "BoundedLipschitz";
    const char* method = r.method == LawDistanceReport::Method::Quantile1d ? "quantile1d"
                         : r.method == LawDistanceReport::Method::ExactAssignment
                             ? "exactAssignment"
                             : "dualLP";
    json j = {{"metric", metric}, {"value", r.value}, {"method", method}};
    if (r.metric == LawDistanceReport::Metric::Wasserstein) j["p"] = r.p;
    return j;
}

namespace {

json field_to_json(const AffineField& f) {
    json offsets = json::array(), slopes = json::array();
    for (const auto& o : f.offset) offsets.push_back(spec_to_json(o));
    for (const auto& s : f.slope) slopes.push_back(spec_to_json(s));
    return {{"rows", f.rows}, {"cols", f.cols}, {"offset", offsets}, {"slope", slopes}};
}

json problem_to_json(const SdeProblem& p) {
    return {{"dim", p.dim},
            {"decay", p.decay},
            {"drift", field_to_json(p.drift)},
            {"diffusion", field_to_json(p.diffusion)},
            {"noiseDim", p.noise_dim},
            {"qDiag", p.q_diag},
            {"lipschitzK", spec_to_json(p.lipschitz_k)},
            {"growthM", p.growth_m}};
}

json config_to_json(const SolverConfig& c) {
    return {{"t0", c.window.t0},       {"t1", c.window.t1},
            {"dt", c.window.dt},       {"memoryT", c.memory_t},
            {"ensembleN", c.ensemble_n}, {"seed", c.seed},
            {"picardTol", c.picard_tol}, {"picardMaxIter", c.picard_max_iter},
            {"storeStride", c.store_stride}};
}

}  // namespace

json scenario_to_json(const Scenario& s) {
    json j = {{"name", s.name}, {"deterministic", s.deterministic},
              {"config", config_to_json(s.config)}};
    if (s.deterministic) {
        j["delta"] = s.delta;
        j["forcing"] = spec_to_json(s.forcing);
    } else {
        j["problem"] = problem_to_json(s.problem);
        if (s.has_companion) j["companion"] = problem_to_json(s.companion);
    }
    json expected = json::array();
    for (const auto& c : s.expected) {
        const char* kind = c.kind == ExpectedCheck::Kind::AbsoluteError ? "absoluteError"
                           : c.kind == ExpectedCheck::Kind::UpperBound  ? "upperBound"
                                                                        : "lowerBound";
        expected.push_back({{"name", c.name},
                            {"kind", kind},
                            {"expected", c.expected},
                            {"tolerance", c.tolerance}});
    }
    j["expected"] = expected;
    return j;
}

}  // namespace apnum
