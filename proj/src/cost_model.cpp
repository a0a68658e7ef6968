#include "nssapprox/cost_model.hpp"

#include <cmath>

#include "nssapprox/error.hpp"

namespace nssapprox {

const char* cost_mode_name(CostMode mode) noexcept {
  return mode == CostMode::nss ? "nss" : "unrestricted";
}

CostMode parse_cost_mode(const std::string& name) {
  if (name == "nss") return CostMode::nss;
  if (name == "unrestricted") return CostMode::unrestricted;
  fail(ErrorKind::invalid_argument, "unknown cost mode '" + name + "'");
}

CostFunction CostFunction::polynomial(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    fail(ErrorKind::invalid_argument, "cost exponent must be finite and >= 0");
  }
  CostFunction c;
  c.s_ = s;
  return c;
}

CostFunction CostFunction::table(std::vector<double> values) {
  if (values.empty()) fail(ErrorKind::invalid_argument, "cost table is empty");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] >= 1.0) || !std::isfinite(values[k])) {
      fail(ErrorKind::invalid_argument, "cost table entries must be >= 1");
    }
    if (k > 0 && values[k] < values[k - 1]) {
      fail(ErrorKind::invalid_argument, "cost table must be non-decreasing");
    }
  }
  CostFunction c;
  c.table_ = std::move(values);
  return c;
}

double CostFunction::operator()(Index k) const {
  if (table_.empty()) {
    return k <= 1 ? 1.0 : std::pow(static_cast<double>(k), s_);
  }
  if (k >= table_.size()) {
    fail(ErrorKind::out_of_range,
         "cost table has no entry for level " + std::to_string(k));
  }
  return table_[k];
}

double term_cost(const CostFunction& cost, const Term& t, CostMode mode) {
  return cost(mode == CostMode::nss ? t.max_coordinate() : t.size());
}

double algorithm_cost(const ActiveSet& set, const CostFunction& cost,
                      CostMode mode) {
  CompensatedSum total;
  if (mode == CostMode::nss) {
    if (set.includes_empty_term && set.total_terms > 0) total.add(cost(0));
    for (const auto& [k, n] : set.level_counts) {
      total.add(static_cast<double>(n) * cost(k));
    }
  } else {
    for (const auto& [size, n] : set.size_counts) {
      total.add(static_cast<double>(n) * cost(size));
    }
  }
  return total.value();
}

Index budget_to_level(const CostFunction& cost, double budget) {
  if (!(budget >= cost(0))) {
    fail(ErrorKind::invalid_argument, "budget is below $(0)");
  }
  if (cost.is_polynomial()) {
    if (cost.exponent() == 0.0) {
      fail(ErrorKind::invalid_argument, "constant cost has no largest level");
    }
    Index k = static_cast<Index>(
        std::floor(std::pow(budget, 1.0 / cost.exponent())));
    while (k > 0 && cost(k) > budget) --k;
    while (cost(k + 1) <= budget) ++k;
    return k;
  }
  Index k = 0;
  while (k + 1 < cost.values().size() && cost(k + 1) <= budget) ++k;
  if (k + 1 == cost.values().size()) {
    fail(ErrorKind::out_of_range, "budget reaches past the cost table");
  }
  return k;
}

}  // namespace nssapprox
