#pragma once

#include <optional>

#include "nssapprox/anova.hpp"

namespace nssapprox {

/// Auxiliary weights gamma_hat_j = gamma_j^{1-c} for c in (1/d^low_gamma, 1),
/// with the certified constant C_gamma = prod_j (1 + gamma_j^c).
struct AuxiliaryModel {
  ProblemModel base;
  ProblemModel auxiliary;
  double c = 0.0;
  ConstantBracket c_gamma;
};

/// Midpoint of (1/d^low_gamma, 1).
double default_auxiliary_exponent(const ProblemModel& model);

AuxiliaryModel build_auxiliary(const ProblemModel& model,
                               std::optional<double> c = std::nullopt,
                               double rel_tol = 1e-6);

enum class PhiDirection { forward, inverse };

/// Scale each coefficient on set u by gamma_u^{-c/2} (forward) or
/// gamma_u^{c/2} (inverse).
CoefficientFunction phi_transform(const CoefficientFunction& f,
                                  const ProblemModel& model, double c,
                                  PhiDirection direction);

/// Coefficients of the same function against the gamma_hat-orthonormal
/// eigensystem: c_{u,j} * gamma_u^{c/2}.
CoefficientFunction to_auxiliary_basis(const CoefficientFunction& f,
                                       const ProblemModel& model, double c);

/// Squared H_{gamma_hat} norm of a function given in gamma coefficients.
double auxiliary_norm_sq(const CoefficientFunction& f,
                         const ProblemModel& model, double c);

struct NonAnovaApproximation {
  AuxiliaryModel aux;
  ActiveSet set;  ///< enumerated on (gamma_hat, lambda)
  double nominal_eps = 0.0;
  /// sqrt(C_gamma) * min(eps, 1), bracketed by the C_gamma bracket.
  Interval certified_bound;
  double cost_nss = 0.0;
};

NonAnovaApproximation certified_non_anova_approximation(
    const ProblemModel& model, Threshold eps, const CostFunction& cost,
    std::optional<double> c = std::nullopt, double rel_tol = 1e-6,
    const EnumerationOptions& options = {});

/// lower = min{d_lambda/2, (d_gamma_low - 1)/(2(1+s))},
/// upper = min{d_lambda/2, (d_gamma_up - 1)/(2s)}.
RateBounds non_anova_rate_bounds(double d_lambda_low, double d_gamma_low,
                                 double d_gamma_up, double s);

/// Bracket for (h2 - c1^2) T2/T1 + c1^2 T1 with T_p = sum_{j>L} gamma_j^p,
/// the squared L2 norm of the tail witness built from a univariate h with
/// ||h||^2 = h2 and integral c1.
Interval witness_norm(const ProblemModel& model, double h_l2_norm_sq,
                      double c1, Index L);

struct WitnessBound {
  double budget = 0.0;
  Index L = 0;
  Interval norm_sq;
  double error_lower_bound = 0.0;  ///< sqrt(norm_sq.lo)
  Interval integral;               ///< c1 * sqrt(T1)
};

/// Error lower bound for any algorithm with cost <= budget, via
/// L = sup{k : $(k) <= budget}.
WitnessBound witness_lower_bound(const ProblemModel& model,
                                 const CostFunction& cost, double h_l2_norm_sq,
                                 double c1, double budget);

struct ComparisonGap {
  double anova_rate = 0.0;
  double non_anova_upper = 0.0;
  bool strict = false;
};

/// ANOVA rate against the non-ANOVA upper bound for d_gamma_low = d_gamma_up.
ComparisonGap comparison_gap(double d_gamma, double d_lambda_low, double s);

}  // namespace nssapprox
