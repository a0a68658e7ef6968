#include "nssapprox/anova.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "nssapprox/error.hpp"

namespace nssapprox {

double squared_norm(const CoefficientFunction& f) {
  CompensatedSum sum;
  for (const auto& [term, c] : f) sum.add(c * c);
  return sum.value();
}

namespace {

bool is_active(const ProblemModel& model, double t, const Term& term) {
  if (!(t < 1.0)) return false;
  if (term.is_empty()) return model.include_empty_term();
  return term_score(model, term) > t;
}

double cost_of(const TradeoffPoint& p, CostMode mode) {
  return mode == CostMode::nss ? p.cost_nss : p.cost_unrestricted;
}

}  // namespace

CoefficientFunction apply_optimal(const ProblemModel& model, Threshold eps,
                                  const CoefficientFunction& f) {
  CoefficientFunction out;
  for (const auto& [term, c] : f) {
    if (is_active(model, eps.eps_sq(), term)) out.emplace(term, c);
  }
  return out;
}

CoefficientFunction apply_optimal(const ActiveSet& set,
                                  const CoefficientFunction& f) {
  CoefficientFunction out;
  for (const auto& [term, c] : f) {
    if (std::binary_search(set.terms.begin(), set.terms.end(), term)) {
      out.emplace(term, c);
    }
  }
  return out;
}

double exact_l2_error_sq(const ProblemModel& model, Threshold eps,
                         const CoefficientFunction& f) {
  CompensatedSum sum;
  for (const auto& [term, c] : f) {
    if (!is_active(model, eps.eps_sq(), term)) {
      sum.add(term_score(model, term) * c * c);
    }
  }
  return sum.value();
}

double exact_l2_error_sq_blockwise(const ProblemModel& model, Threshold eps,
                                   const CoefficientFunction& f) {
  // Map order groups equal u within each level, so blocks are contiguous.
  CompensatedSum total;
  auto it = f.begin();
  while (it != f.end()) {
    const auto& u = it->first.u;
    const double weight = product_weight(model, u);
    CompensatedSum block;
    for (; it != f.end() && it->first.u == u; ++it) {
      const auto& [term, c] = *it;
      if (is_active(model, eps.eps_sq(), term)) continue;
      double lambda = 1.0;
      for (EigenIndex j : term.j) lambda *= model.lambda()(j);
      block.add(lambda * c * c);
    }
    total.add(weight * block.value());
  }
  return total.value();
}

double worst_case_error(const ProblemModel& model, Threshold eps,
                        const EnumerationOptions& options) {
  EnumerationOptions opt = options;
  opt.store_terms = false;
  return std::sqrt(enumerate_active_set(model, eps, opt).largest_excluded_score);
}

std::vector<TradeoffPoint> tradeoff_curve(const ProblemModel& model,
                                          const CostFunction& cost,
                                          std::span<const double> eps_grid,
                                          unsigned threads, Index term_budget) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    const double e = eps_grid[i];
    if (!(e > 0.0 && e < 1.0)) {
      fail(ErrorKind::invalid_argument, "eps grid must lie in (0, 1)");
    }
    if (i > 0 && !(e < eps_grid[i - 1])) {
      fail(ErrorKind::invalid_argument, "eps grid must be strictly decreasing");
    }
  }
  std::vector<TradeoffPoint> points(eps_grid.size());
  std::vector<std::exception_ptr> errors(eps_grid.size());
  const EnumerationOptions opt{term_budget, false};

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < eps_grid.size(); i = next++) {
      try {
        const ActiveSet set = enumerate_active_set(model, eps_grid[i], opt);
        TradeoffPoint& p = points[i];
        p.epsilon = eps_grid[i];
        p.cost_nss = algorithm_cost(set, cost, CostMode::nss);
        p.cost_unrestricted = algorithm_cost(set, cost, CostMode::unrestricted);
        p.exact_error = std::sqrt(set.largest_excluded_score);
        p.total_terms = set.total_terms;
        p.m_eps = set.m_eps;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, eps_grid.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return points;
}

BudgetOptimum minimal_error_for_budget(const ProblemModel& model,
                                       const CostFunction& cost, double budget,
                                       CostMode mode, Index term_budget) {
  BudgetOptimum best;
  if (!(budget >= cost(0))) return best;

  const EnumerationOptions opt{term_budget, false};
  struct Eval {
    double t;
    ActiveSet set;
    double cost;
  };
  const auto eval = [&](double t) {
    ActiveSet set = enumerate_active_set(model, Threshold::squared(t), opt);
    const double c = algorithm_cost(set, cost, mode);
    return Eval{t, std::move(set), c};
  };
  // Extend an affordable set by the next score level while it stays affordable.
  const auto walk = [&](Eval hi) {
    while (hi.set.largest_excluded_score > 0.0) {
      const double below = std::nextafter(hi.set.largest_excluded_score, 0.0);
      if (!(below > 0.0)) break;
      Eval next = eval(below);
      if (next.cost > budget) break;
      hi = std::move(next);
    }
    return hi;
  };

  Eval hi = eval(1.0);
  if (Eval first = eval(std::nextafter(1.0, 0.0)); first.cost <= budget) {
    hi = std::move(first);
  } else {
    return best;
  }
  if (hi.set.largest_excluded_score > 0.0) {
    // Find an unaffordable threshold, then bisect in log space.
    double lo = hi.set.largest_excluded_score;
    bool exhausted = false;
    while (true) {
      lo *= 0.25;
      Eval e = eval(lo);
      if (e.cost > budget) break;
      hi = std::move(e);
      if (hi.set.largest_excluded_score == 0.0) {
        exhausted = true;
        break;
      }
    }
    if (!exhausted) {
      while (hi.t > lo * (1.0 + 1e-9)) {
        const double mid = std::sqrt(lo * hi.t);
        if (!(mid > lo && mid < hi.t)) break;
        Eval e = eval(mid);
        if (e.cost > budget) {
          lo = mid;
        } else {
          hi = std::move(e);
        }
      }
      hi = walk(std::move(hi));
    }
  }
  best.eps_sq = hi.t;
  best.error = std::sqrt(hi.set.largest_excluded_score);
  best.cost = hi.cost;
  best.total_terms = hi.set.total_terms;
  return best;
}

double exponent_of_rate(double r) { return r > 0.0 ? 1.0 / r : infinity; }

RateBounds anova_rate_bounds(double d_lambda_low, double d_gamma_low,
                             double d_gamma_up, double s) {
  if (!(d_lambda_low > 1.0)) fail(ErrorKind::invalid_argument, "d_lambda must be > 1");
  if (!(d_gamma_low > 1.0)) fail(ErrorKind::invalid_argument, "d_gamma_low must be > 1");
  if (!(d_gamma_up >= d_gamma_low)) {
    fail(ErrorKind::invalid_argument, "d_gamma_up must be >= d_gamma_low");
  }
  if (!(s > 0.0)) fail(ErrorKind::invalid_argument, "s must be > 0");
  RateBounds b;
  b.lower = std::min(d_lambda_low / 2.0, d_gamma_low / (2.0 * (1.0 + s)));
  b.upper = std::min(d_lambda_low / 2.0, d_gamma_up / (2.0 * (1.0 + s)));
  b.p_lower = exponent_of_rate(b.lower);
  b.p_upper = exponent_of_rate(b.upper);
  return b;
}

std::vector<TradeoffPoint> lower_envelope(std::span<const TradeoffPoint> curve,
                                          CostMode mode) {
  std::vector<TradeoffPoint> sorted(curve.begin(), curve.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [mode](const TradeoffPoint& a, const TradeoffPoint& b) {
                     return cost_of(a, mode) < cost_of(b, mode);
                   });
  std::vector<TradeoffPoint> out;
  for (const auto& p : sorted) {
    if (out.empty() || p.exact_error < out.back().exact_error) {
      if (!out.empty() && cost_of(p, mode) == cost_of(out.back(), mode)) {
        out.back() = p;
      } else {
        out.push_back(p);
      }
    }
  }
  return out;
}

RateFit estimate_rate(std::span<const TradeoffPoint> curve, CostMode mode) {
  for (const auto& p : curve) {
    if (!(p.exact_error > 0.0) || !(cost_of(p, mode) > 0.0)) {
      fail(ErrorKind::invalid_argument,
           "rate fit needs positive costs and errors");
    }
  }
  const auto env = lower_envelope(curve, mode);
  if (env.size() < 4) {
    fail(ErrorKind::invalid_argument,
         "rate fit needs at least 4 points where the error drops");
  }
  const double n = static_cast<double>(env.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : env) {
    mx += std::log(cost_of(p, mode));
    my += std::log(p.exact_error);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : env) {
    const double dx = std::log(cost_of(p, mode)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.exact_error) - my);
  }
  const double slope = sxy / sxx;
  RateFit fit;
  fit.rate = -slope;
  fit.intercept = my - slope * mx;
  fit.points_used = env.size();
  for (const auto& p : env) {
    const double r = std::log(p.exact_error) -
                     (fit.intercept + slope * std::log(cost_of(p, mode)));
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
  }
  return fit;
}

}  // namespace nssapprox
