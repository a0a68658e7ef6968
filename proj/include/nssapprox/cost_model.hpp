#pragma once

#include <string>
#include <vector>

#include "nssapprox/active_set.hpp"

namespace nssapprox {

enum class CostMode { nss, unrestricted };

const char* cost_mode_name(CostMode mode) noexcept;
CostMode parse_cost_mode(const std::string& name);

/// Non-decreasing $ : N_0 -> [1, inf), either max(1, k)^s or an explicit table.
class CostFunction {
 public:
  static CostFunction polynomial(double s);
  /// values[k] = $(k); indices past the table throw out-of-range.
  static CostFunction table(std::vector<double> values);

  double operator()(Index k) const;

  bool is_polynomial() const noexcept { return table_.empty(); }
  double exponent() const noexcept { return s_; }
  const std::vector<double>& values() const noexcept { return table_; }

 private:
  CostFunction() = default;
  double s_ = 0.0;
  std::vector<double> table_;
};

/// $(max u) under nested subspace sampling, $(|u|) otherwise.
double term_cost(const CostFunction& cost, const Term& t, CostMode mode);

/// Sum of term costs, accumulated level by level in ascending order.
double algorithm_cost(const ActiveSet& set, const CostFunction& cost,
                      CostMode mode);

/// sup{k : $(k) <= budget}; requires budget >= $(0).
Index budget_to_level(const CostFunction& cost, double budget);

}  // namespace nssapprox
