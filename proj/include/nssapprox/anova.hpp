#pragma once

#include <map>
#include <span>
#include <vector>

#include "nssapprox/active_set.hpp"
#include "nssapprox/cost_model.hpp"

namespace nssapprox {

/// Coefficients c_{u,j} against the H_gamma-orthonormal eigensystem.
using CoefficientFunction = std::map<Term, double>;

/// sum c^2, the H_gamma norm squared.
double squared_norm(const CoefficientFunction& f);

/// Keep the coefficients of terms with score > eps^2.
CoefficientFunction apply_optimal(const ProblemModel& model, Threshold eps,
                                  const CoefficientFunction& f);

/// Keep the coefficients of terms stored in an enumerated set.
CoefficientFunction apply_optimal(const ActiveSet& set,
                                  const CoefficientFunction& f);

/// sum over excluded terms of score * c^2, term by term.
double exact_l2_error_sq(const ProblemModel& model, Threshold eps,
                         const CoefficientFunction& f);

/// Same quantity grouped by coordinate set: sum_u gamma_u sum_j lambda_{u,j} c^2.
double exact_l2_error_sq_blockwise(const ProblemModel& model, Threshold eps,
                                   const CoefficientFunction& f);

/// sqrt of the largest excluded score; 1 for eps >= 1.
double worst_case_error(const ProblemModel& model, Threshold eps,
                        const EnumerationOptions& options = {});

struct TradeoffPoint {
  double epsilon = 0.0;
  double cost_nss = 0.0;
  double cost_unrestricted = 0.0;
  double exact_error = 0.0;
  Index total_terms = 0;
  Index m_eps = 0;
};

/// One point per eps of a strictly decreasing grid in (0, 1). Points may be
/// evaluated on several threads; the result order is the grid order.
std::vector<TradeoffPoint> tradeoff_curve(const ProblemModel& model,
                                          const CostFunction& cost,
                                          std::span<const double> eps_grid,
                                          unsigned threads = 1,
                                          Index term_budget = 10'000'000);

struct BudgetOptimum {
  double eps_sq = 1.0;  ///< threshold realizing the optimum
  double error = 1.0;
  double cost = 0.0;
  Index total_terms = 0;
};

/// Smallest worst-case error over the threshold family with cost <= budget.
BudgetOptimum minimal_error_for_budget(const ProblemModel& model,
                                       const CostFunction& cost, double budget,
                                       CostMode mode,
                                       Index term_budget = 10'000'000);

struct RateBounds {
  double lower = 0.0;
  double upper = 0.0;
  double p_lower = 0.0;  ///< 1 / lower
  double p_upper = 0.0;  ///< 1 / upper
};

/// min{d_lambda/2, d_gamma/(2(1+s))} at d_gamma_low and d_gamma_up.
RateBounds anova_rate_bounds(double d_lambda_low, double d_gamma_low,
                             double d_gamma_up, double s);

/// 1/r with r = 0 mapped to +inf.
double exponent_of_rate(double r);

struct RateFit {
  double rate = 0.0;  ///< negated least-squares slope of log error vs log cost
  double intercept = 0.0;
  double max_residual = 0.0;
  std::size_t points_used = 0;
};

/// Points where the error strictly drops, ordered by cost.
std::vector<TradeoffPoint> lower_envelope(std::span<const TradeoffPoint> curve,
                                          CostMode mode);

/// Least-squares rate on the lower envelope; needs at least 4 envelope points.
RateFit estimate_rate(std::span<const TradeoffPoint> curve, CostMode mode);

}  // namespace nssapprox
