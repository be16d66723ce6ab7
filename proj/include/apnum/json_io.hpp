#pragma once

#include <string>

#include "apnum/corpus.hpp"
#include "apnum/function_spec.hpp"
#include "json.hpp"
#include "apnum/law.hpp"
#include "apnum/metrics.hpp"

namespace apnum {

/// FunctionSpec schema: {"kind": <node kind>, ...node fields...}; nested
/// specs appear inline. Round-trip stable.
nlohmann::json spec_to_json(const FunctionSpec& spec);
FunctionSpec spec_from_json(const nlohmann::json& j);  // throws SchemaError

nlohmann::json metric_to_json(const MetricKind& m);
MetricKind metric_from_json(const nlohmann::json& j);

nlohmann::json scan_to_json(const AlmostPeriodSet& set);
nlohmann::json check_to_json(const CheckResult& c);
nlohmann::json tau_to_json(const TauReport& r);
nlohmann::json law_report_to_json(const LawDistanceReport& r);
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace apnum
