#pragma once

#include <json.hpp>

#include "nssapprox/cost_model.hpp"
#include "nssapprox/weighted_model.hpp"

namespace nssapprox {

using Json = nlohmann::json;

/// {"kind": K, "params": {...}} with K and params one of
///   power        {"exponent", "coefficient" = 1}
///   power_log    {"exponent", "log_exponent", "coefficient" = 1}
///   geometric    {"ratio", "coefficient" = 1}
///   remark_block {"power" = 1}
///   table        {"values"}
/// Optional on every kind: "name", "envelope": {"coefficient", "exponent"},
/// "decay": {"low", "up"}. Unknown keys are rejected.
DecreasingSequence sequence_from_json(const Json& j);

/// {"gamma": seq, "lambda": seq, "include_empty_term": bool}
ProblemModel model_from_json(const Json& j);

/// {"kind": "poly", "s": s} or {"kind": "table", "values": [...]}
CostFunction cost_from_json(const Json& j);

}  // namespace nssapprox
