#include "nssapprox/descriptors.hpp"

#include <initializer_list>
#include <string>

#include "nssapprox/error.hpp"

namespace nssapprox {

namespace {

void require_object(const Json& j, const std::string& what) {
  if (!j.is_object()) {
    fail(ErrorKind::schema_violation, what + " must be a JSON object");
  }
}

void allow_keys(const Json& j, const std::string& what,
                std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) {
      fail(ErrorKind::schema_violation, what + ": unknown key '" + key + "'");
    }
  }
}

double number(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) {
    fail(ErrorKind::schema_violation, what + ": missing '" + key + "'");
  }
  const Json& v = j.at(key);
  if (!v.is_number()) {
    fail(ErrorKind::schema_violation, what + ": '" + key + "' must be a number");
  }
  return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback,
                 const std::string& what) {
  return j.contains(key) ? number(j, key, what) : fallback;
}

std::vector<double> numbers(const Json& j, const char* key,
                            const std::string& what) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    fail(ErrorKind::schema_violation, what + ": '" + key + "' must be an array");
  }
  std::vector<double> out;
  for (const Json& v : j.at(key)) {
    if (!v.is_number()) {
      fail(ErrorKind::schema_violation, what + ": '" + key + "' holds a non-number");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string kind_of(const Json& j, const std::string& what) {
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    fail(ErrorKind::schema_violation, what + ": missing string 'kind'");
  }
  return j.at("kind").get<std::string>();
}

DecreasingSequence decorate(DecreasingSequence s, const Json& j,
                            const std::string& what) {
  if (j.contains("name")) {
    if (!j.at("name").is_string()) {
      fail(ErrorKind::schema_violation, what + ": 'name' must be a string");
    }
    s = s.with_name(j.at("name").get<std::string>());
  }
  if (j.contains("envelope")) {
    const Json& e = j.at("envelope");
    require_object(e, what + ".envelope");
    allow_keys(e, what + ".envelope", {"coefficient", "exponent"});
    s = s.with_envelope({number(e, "coefficient", what + ".envelope"),
                         number(e, "exponent", what + ".envelope")});
  }
  if (j.contains("decay")) {
    const Json& d = j.at("decay");
    require_object(d, what + ".decay");
    allow_keys(d, what + ".decay", {"low", "up"});
    std::optional<double> low, up;
    if (d.contains("low")) low = number(d, "low", what + ".decay");
    if (d.contains("up")) up = number(d, "up", what + ".decay");
    s = s.with_claimed_decay(low, up);
  }
  return s;
}

}  // namespace

DecreasingSequence sequence_from_json(const Json& j) {
  const std::string what = "sequence";
  require_object(j, what);
  allow_keys(j, what, {"kind", "params", "name", "envelope", "decay"});
  const std::string kind = kind_of(j, what);
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  const std::string where = what + "." + kind + ".params";
  require_object(params, where);
  DecreasingSequence s = [&] {
    if (kind == "power") {
      allow_keys(params, where, {"exponent", "coefficient"});
      return DecreasingSequence::power(number(params, "exponent", where),
                                       number_or(params, "coefficient", 1.0, where));
    }
    if (kind == "power_log") {
      allow_keys(params, where, {"exponent", "log_exponent", "coefficient"});
      return DecreasingSequence::power_log(
          number(params, "exponent", where), number(params, "log_exponent", where),
          number_or(params, "coefficient", 1.0, where));
    }
    if (kind == "geometric") {
      allow_keys(params, where, {"ratio", "coefficient"});
      return DecreasingSequence::geometric(number(params, "ratio", where),
                                           number_or(params, "coefficient", 1.0, where));
    }
    if (kind == "remark_block") {
      allow_keys(params, where, {"power"});
      const double p = number_or(params, "power", 1.0, where);
      const auto base = DecreasingSequence::remark_block();
      return p == 1.0 ? base : base.powered(p);
    }
    if (kind == "table") {
      allow_keys(params, where, {"values"});
      return DecreasingSequence::table(numbers(params, "values", where));
    }
    fail(ErrorKind::schema_violation, "unknown sequence kind '" + kind + "'");
  }();
  return decorate(std::move(s), j, what);
}

ProblemModel model_from_json(const Json& j) {
  require_object(j, "model");
  allow_keys(j, "model", {"gamma", "lambda", "include_empty_term"});
  if (!j.contains("gamma") || !j.contains("lambda")) {
    fail(ErrorKind::schema_violation, "model needs 'gamma' and 'lambda'");
  }
  bool include_empty = true;
  if (j.contains("include_empty_term")) {
    if (!j.at("include_empty_term").is_boolean()) {
      fail(ErrorKind::schema_violation, "model: 'include_empty_term' must be a bool");
    }
    include_empty = j.at("include_empty_term").get<bool>();
  }
  return ProblemModel(sequence_from_json(j.at("gamma")),
                      sequence_from_json(j.at("lambda")), true, include_empty);
}

CostFunction cost_from_json(const Json& j) {
  require_object(j, "cost");
  const std::string kind = kind_of(j, "cost");
  if (kind == "poly") {
    allow_keys(j, "cost", {"kind", "s"});
    return CostFunction::polynomial(number(j, "s", "cost"));
  }
  if (kind == "table") {
    allow_keys(j, "cost", {"kind", "values"});
    return CostFunction::table(numbers(j, "values", "cost"));
  }
  fail(ErrorKind::schema_violation, "unknown cost kind '" + kind + "'");
}

}  // namespace nssapprox
