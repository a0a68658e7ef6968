#include "nssapprox/weighted_model.hpp"

#include <algorithm>
#include <cmath>

#include "nssapprox/error.hpp"

namespace nssapprox {

namespace {

constexpr Index kModelCheckHorizon = 1024;

// Positivity is judged on -log x_n, so values that underflow in double
// (geometric weights far out) still count as positive.
void check_monotone(const DecreasingSequence& s, const char* label) {
  Index horizon = kModelCheckHorizon;
  if (const auto sup = s.support()) horizon = std::min(horizon, *sup);
  double previous = s(1);
  for (Index n = 1; n <= horizon; ++n) {
    const double v = s(n);
    if (!std::isfinite(s.neg_log(n)) || v < 0.0) {
      fail(ErrorKind::invalid_sequence, std::string(label) + "_" +
                                            std::to_string(n) +
                                            " is not positive");
    }
    if (v > previous) {
      fail(ErrorKind::invalid_sequence, std::string(label) +
                                            " increases at index " +
                                            std::to_string(n));
    }
    previous = v;
  }
}

std::string join(const auto& values) {
  if (values.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

Term Term::make(std::vector<Coordinate> u, std::vector<EigenIndex> j) {
  Term t{std::move(u), std::move(j)};
  if (!t.is_canonical()) {
    fail(ErrorKind::invalid_argument,
         "term needs strictly increasing positive coordinates and one "
         "positive eigen-index per coordinate");
  }
  return t;
}

bool Term::is_canonical() const noexcept {
  if (u.size() != j.size()) return false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0 || j[i] == 0) return false;
    if (i > 0 && u[i] <= u[i - 1]) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.max_coordinate() <=> b.max_coordinate(); c != 0) return c;
  if (auto c = a.u <=> b.u; c != 0) return c;
  return a.j <=> b.j;
}

Term combine(const Term& a, const Term& b) {
  Term out;
  out.u.reserve(a.size() + b.size());
  out.j.reserve(a.size() + b.size());
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() || ib < b.size()) {
    const bool take_a =
        ib == b.size() || (ia < a.size() && a.u[ia] < b.u[ib]);
    if (!take_a && ia < a.size() && a.u[ia] == b.u[ib]) {
      fail(ErrorKind::invalid_argument, "combine needs disjoint coordinate sets");
    }
    if (take_a) {
      out.u.push_back(a.u[ia]);
      out.j.push_back(a.j[ia++]);
    } else {
      out.u.push_back(b.u[ib]);
      out.j.push_back(b.j[ib++]);
    }
  }
  return out;
}

std::string format_coordinates(const Term& t) { return join(t.u); }
std::string format_indices(const Term& t) { return join(t.j); }

ProblemModel::ProblemModel(DecreasingSequence gamma, DecreasingSequence lambda,
                           bool lambda_is_block_spectrum,
                           bool include_empty_term)
    : gamma_(std::move(gamma)),
      lambda_(std::move(lambda)),
      block_spectrum_(lambda_is_block_spectrum),
      include_empty_(include_empty_term) {
  check_monotone(gamma_, "gamma");
  check_monotone(lambda_, "lambda");
  if (gamma_(1) > 1.0) {
    fail(ErrorKind::invalid_argument, "weights must satisfy gamma_1 <= 1");
  }
  if (gamma_(1) * lambda_(1) > 1.0) {
    fail(ErrorKind::invalid_argument,
         "scores must satisfy gamma_1 * lambda_1 <= 1");
  }
  if (const auto d = lambda_.claimed_decay_low(); d && !(*d > 1.0)) {
    fail(ErrorKind::invalid_argument,
         "eigenvalues must have lower decay rate > 1 (trace-class kernel)");
  }
}

ProblemModel ProblemModel::with_gamma(DecreasingSequence gamma) const {
  return ProblemModel(std::move(gamma), lambda_, block_spectrum_,
                      include_empty_);
}

double product_weight(const ProblemModel& model, std::span<const Coordinate> u) {
  double w = 1.0;
  for (Coordinate i : u) w *= model.gamma()(i);
  return w;
}

double term_score(const ProblemModel& model, const Term& t) {
  if (t.size() <= kLogSpaceThreshold) {
    double s = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      s *= model.gamma()(t.u[i]);
      s *= model.lambda()(t.j[i]);
    }
    return s;
  }
  double neg_log = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    neg_log += model.gamma().neg_log(t.u[i]);
    neg_log += model.lambda().neg_log(t.j[i]);
  }
  return std::exp(-neg_log);
}

double weighted_subset_sum(const ProblemModel& model, double tau, double C,
                           Index k) {
  if (!(tau > 0.0)) fail(ErrorKind::invalid_argument, "tau must be > 0");
  if (!(C > 0.0)) fail(ErrorKind::invalid_argument, "C must be > 0");
  if (k < 1) fail(ErrorKind::invalid_argument, "k must be >= 1");
  const double inv = 1.0 / tau;
  double prod = C * std::pow(model.gamma()(k), inv);
  for (Index i = 1; i < k; ++i) {
    prod *= 1.0 + C * std::pow(model.gamma()(i), inv);
  }
  return prod;
}

ConstantBracket c_gamma_constant(const ProblemModel& model, double c,
                                 double rel_tol) {
  if (!(c > 0.0)) fail(ErrorKind::invalid_argument, "c must be > 0");
  if (!(rel_tol > 0.0)) fail(ErrorKind::invalid_argument, "rel_tol must be > 0");
  const auto& gamma = model.gamma();

  if (const auto sup = gamma.support()) {
    double prod = 1.0;
    for (Index j = 1; j <= *sup; ++j) prod *= 1.0 + std::pow(gamma(j), c);
    return {{prod, prod}, prod, *sup};
  }

  // log C = sum_j log1p(x_j), x_j = gamma_j^c. Past K the tail lies in
  // [T1 - T2/2, T1] where T1 = sum x_j and T2 = sum x_j^2.
  constexpr Index kFirstCut = 256;
  constexpr Index kMaxCut = Index{1} << 36;
  CompensatedSum log_prod;
  Index done = 0;
  double best_lo = 0.0;
  double best_hi = infinity;
  for (Index K = kFirstCut; K <= kMaxCut; K *= 2) {
    for (Index j = done + 1; j <= K; ++j) {
      log_prod.add(std::log1p(std::pow(gamma(j), c)));
    }
    done = K;
    const Interval t1 = power_tail_bracket(gamma, K, c, 0);
    const Interval t2 = power_tail_bracket(gamma, K, 2.0 * c, 0);
    const double lp = log_prod.value();
    best_lo = std::max(best_lo, std::exp(lp + t1.lo - 0.5 * t2.hi));
    best_hi = std::min(best_hi, std::exp(lp + t1.hi));
    if (best_hi <= best_lo * (1.0 + rel_tol)) {
      return {{best_lo, best_hi}, 0.5 * (best_lo + best_hi), K};
    }
  }
  fail(ErrorKind::divergent_constant,
       "C_gamma bracket for " + gamma.name() + " does not shrink");
}

Interval tail_weight_sum(const ProblemModel& model, Index L, double power) {
  return power_tail_bracket(model.gamma(), L, power);
}

}  // namespace nssapprox
