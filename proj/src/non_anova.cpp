#include "nssapprox/non_anova.hpp"

#include <algorithm>
#include <cmath>

#include "nssapprox/error.hpp"

namespace nssapprox {

namespace {

double lower_gamma_exponent_bound(const ProblemModel& model) {
  const auto d = model.gamma().claimed_decay_low();
  if (!d) {
    fail(ErrorKind::invalid_argument,
         "weights need a claimed lower decay rate to choose c");
  }
  return 1.0 / *d;
}

CoefficientFunction scale_by_weight(const CoefficientFunction& f,
                                    const ProblemModel& model,
                                    double exponent) {
  CoefficientFunction out;
  for (const auto& [term, c] : f) {
    const double w = product_weight(model, term.u);
    out.emplace(term, c * std::pow(w, exponent));
  }
  return out;
}

}  // namespace

double default_auxiliary_exponent(const ProblemModel& model) {
  return 0.5 * (lower_gamma_exponent_bound(model) + 1.0);
}

AuxiliaryModel build_auxiliary(const ProblemModel& model, std::optional<double> c,
                               double rel_tol) {
  const double lo = lower_gamma_exponent_bound(model);
  const double cc = c ? *c : default_auxiliary_exponent(model);
  if (!(cc > lo && cc < 1.0)) {
    fail(ErrorKind::invalid_argument,
         "c = " + std::to_string(cc) + " outside (" + std::to_string(lo) +
             ", 1)");
  }
  ConstantBracket constant = c_gamma_constant(model, cc, rel_tol);
  ProblemModel aux = model.with_gamma(model.gamma().powered(1.0 - cc));
  return AuxiliaryModel{model, std::move(aux), cc, constant};
}

CoefficientFunction phi_transform(const CoefficientFunction& f,
                                  const ProblemModel& model, double c,
                                  PhiDirection direction) {
  const double e = direction == PhiDirection::forward ? -0.5 * c : 0.5 * c;
  return scale_by_weight(f, model, e);
}

CoefficientFunction to_auxiliary_basis(const CoefficientFunction& f,
                                       const ProblemModel& model, double c) {
  return scale_by_weight(f, model, 0.5 * c);
}

double auxiliary_norm_sq(const CoefficientFunction& f, const ProblemModel& model,
                         double c) {
  return squared_norm(to_auxiliary_basis(f, model, c));
}

NonAnovaApproximation certified_non_anova_approximation(
    const ProblemModel& model, Threshold eps, const CostFunction& cost,
    std::optional<double> c, double rel_tol, const EnumerationOptions& options) {
  NonAnovaApproximation out{build_auxiliary(model, c, rel_tol), {}, eps.eps(),
                            {}, 0.0};
  out.set = enumerate_active_set(out.aux.auxiliary, eps, options);
  const double e = std::min(eps.eps(), 1.0);
  out.certified_bound = {std::sqrt(out.aux.c_gamma.bracket.lo) * e,
                         std::sqrt(out.aux.c_gamma.bracket.hi) * e};
  out.cost_nss = algorithm_cost(out.set, cost, CostMode::nss);
  return out;
}

RateBounds non_anova_rate_bounds(double d_lambda_low, double d_gamma_low,
                                 double d_gamma_up, double s) {
  if (!(d_lambda_low > 1.0)) fail(ErrorKind::invalid_argument, "d_lambda must be > 1");
  if (!(d_gamma_low > 1.0)) fail(ErrorKind::invalid_argument, "d_gamma_low must be > 1");
  if (!(d_gamma_up >= d_gamma_low) || !std::isfinite(d_gamma_up)) {
    fail(ErrorKind::invalid_argument,
         "d_gamma_up must be finite and >= d_gamma_low");
  }
  if (!(s > 0.0)) fail(ErrorKind::invalid_argument, "s must be > 0");
  RateBounds b;
  b.lower = std::min(d_lambda_low / 2.0, (d_gamma_low - 1.0) / (2.0 * (1.0 + s)));
  b.upper = std::min(d_lambda_low / 2.0, (d_gamma_up - 1.0) / (2.0 * s));
  b.p_lower = exponent_of_rate(b.lower);
  b.p_upper = exponent_of_rate(b.upper);
  return b;
}

Interval witness_norm(const ProblemModel& model, double h_l2_norm_sq, double c1,
                      Index L) {
  if (c1 == 0.0 || !std::isfinite(c1)) {
    fail(ErrorKind::invalid_argument,
         "witness needs a function with nonzero integral");
  }
  const double c1_sq = c1 * c1;
  if (!(h_l2_norm_sq >= c1_sq)) {
    fail(ErrorKind::invalid_argument, "need ||h||^2 >= c1^2");
  }
  const Interval t1 = tail_weight_sum(model, L, 1.0);
  const Interval t2 = tail_weight_sum(model, L, 2.0);
  if (t1.hi == 0.0) return {0.0, 0.0};
  const double spread = h_l2_norm_sq - c1_sq;
  const double ratio_lo = t1.lo > 0.0 ? t2.lo / t1.hi : 0.0;
  const double ratio_hi = t1.lo > 0.0 ? t2.hi / t1.lo : t1.hi;
  return {spread * ratio_lo + c1_sq * t1.lo, spread * ratio_hi + c1_sq * t1.hi};
}

WitnessBound witness_lower_bound(const ProblemModel& model,
                                 const CostFunction& cost, double h_l2_norm_sq,
                                 double c1, double budget) {
  WitnessBound w;
  w.budget = budget;
  w.L = budget_to_level(cost, budget);
  w.norm_sq = witness_norm(model, h_l2_norm_sq, c1, w.L);
  w.error_lower_bound = std::sqrt(w.norm_sq.lo);
  const Interval t1 = tail_weight_sum(model, w.L, 1.0);
  const double a = std::abs(c1);
  w.integral = {a * std::sqrt(t1.lo), a * std::sqrt(t1.hi)};
  return w;
}

ComparisonGap comparison_gap(double d_gamma, double d_lambda_low, double s) {
  if (!(d_gamma > 1.0)) fail(ErrorKind::invalid_argument, "d_gamma must be > 1");
  if (!(d_lambda_low > 1.0)) fail(ErrorKind::invalid_argument, "d_lambda must be > 1");
  if (!(s > 0.0)) fail(ErrorKind::invalid_argument, "s must be > 0");
  ComparisonGap g;
  g.anova_rate = std::min(d_lambda_low / 2.0, d_gamma / (2.0 * (1.0 + s)));
  g.non_anova_upper = std::min(d_lambda_low / 2.0, (d_gamma - 1.0) / (2.0 * s));
  g.strict = d_gamma > 1.0 && d_gamma < 1.0 + s;
  return g;
}

}  // namespace nssapprox
