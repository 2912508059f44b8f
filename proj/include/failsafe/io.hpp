#pragma once

// JSON and CSV forms of the library types.

#include <string>

#include <json.hpp>

#include "failsafe/fitlab.hpp"
#include "failsafe/generators.hpp"
#include "failsafe/models.hpp"
#include "failsafe/ordering.hpp"
#include "failsafe/preorders.hpp"
#include "failsafe/systems.hpp"

namespace failsafe::io {

using nlohmann::json;

Generator generator_from_json(const json& j);
json to_json(const Generator& g);

Baseline baseline_from_json(const json& j);
json to_json(const Baseline& b);

SemiParamModel model_from_json(const json& j);
json to_json(const SemiParamModel& m);

// {"n": int, "generator": {...}, "model": {...}, "theta": [...]}; n is optional
// but must equal len(theta) when present.
SystemSpec system_from_json(const json& j);
json to_json(const SystemSpec& s);
SystemSpec load_system(const std::string& path);

json parse_json(const std::string& text, const std::string& where);

json to_json(const preorders::OrderReport& r);
json to_json(const LogShapeReport& r);
json to_json(const ShapeVerdict& v);
json to_json(const DominanceVerdict& v);
json to_json(const ConditionReport& r);
json to_json(const SchurProbe& p);
json to_json(const fitlab::FitResult& f);
json to_json(const fitlab::GofResult& g);
json to_json(const fitlab::SubsetRecommendation& s);

// Curve CSV: `x,survival`.
std::string curve_csv(const SurvivalCurve& c);
// Paired curve CSV: `x,survival_x,survival_y,gap`.
std::string paired_curve_csv(const SurvivalCurve& cx, const SurvivalCurve& cy);

} // namespace failsafe::io
