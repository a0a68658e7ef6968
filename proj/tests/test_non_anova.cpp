#include <doctest.h>

#include <functional>

#include <cmath>
#include <random>

#include "nssapprox/error.hpp"
#include "nssapprox/non_anova.hpp"
#include "oracles.hpp"

using namespace nssapprox;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::invalid_argument;
}

ProblemModel cubic_model() {
  return ProblemModel(DecreasingSequence::power(3.0), DecreasingSequence::power(2.0));
}

ProblemModel square_model() {
  return ProblemModel(DecreasingSequence::power(2.0), DecreasingSequence::power(2.0));
}

CoefficientFunction random_function(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<int> coin(0, 2), idx(1, 6);
  std::normal_distribution<double> coef(0.0, 1.0);
  CoefficientFunction f;
  for (int i = 0; i < count; ++i) {
    Term t;
    for (Coordinate k = 1; k <= 6; ++k) {
      if (coin(rng) == 0) {
        t.u.push_back(k);
        t.j.push_back(static_cast<EigenIndex>(idx(rng)));
      }
    }
    f[t] = coef(rng);
  }
  return f;
}

}  // namespace

TEST_SUITE("non_anova") {

TEST_CASE("auxiliary weights") {
  const auto aux = build_auxiliary(cubic_model(), 0.5);
  for (Index j = 1; j <= 1000; j += 37) {
    CHECK(aux.auxiliary.gamma()(j) ==
          doctest::Approx(std::pow(static_cast<double>(j), -1.5)).epsilon(1e-14));
  }
  const auto direct = c_gamma_constant(cubic_model(), 0.5, 1e-6);
  CHECK(aux.c_gamma.bracket.lo == direct.bracket.lo);
  CHECK(aux.c_gamma.bracket.hi == direct.bracket.hi);
  CHECK(std::isfinite(aux.c_gamma.value));

  CHECK(default_auxiliary_exponent(cubic_model()) == doctest::Approx(2.0 / 3.0));
  CHECK(kind_of([] { (void)build_auxiliary(square_model(), 0.4); }) ==
        ErrorKind::invalid_argument);
  CHECK(kind_of([] { (void)build_auxiliary(square_model(), 1.0); }) ==
        ErrorKind::invalid_argument);

  const ProblemModel finite(DecreasingSequence::table({0.25}), DecreasingSequence::power(2.0));
  const auto fa = build_auxiliary(finite, 0.5);
  CHECK(fa.c_gamma.bracket.lo == 1.5);
  CHECK(fa.c_gamma.bracket.hi == 1.5);
  CHECK(fa.auxiliary.gamma()(1) == 0.5);
}

TEST_CASE("phi transform") {
  const ProblemModel m(DecreasingSequence::geometric(0.25), DecreasingSequence::power(2.0));
  const Term t = Term::make({1}, {1});
  const auto g = phi_transform({{t, 2.0}}, m, 0.5, PhiDirection::forward);
  CHECK(g.at(t) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));

  std::mt19937_64 rng(21);
  const auto model = cubic_model();
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_function(rng, 25);
    const auto fwd = phi_transform(f, model, 0.6, PhiDirection::forward);
    const auto back = phi_transform(fwd, model, 0.6, PhiDirection::inverse);
    const auto iso = to_auxiliary_basis(fwd, model, 0.6);
    for (const auto& [k, v] : f) {
      CHECK(back.at(k) == doctest::Approx(v).epsilon(1e-12));
      CHECK(iso.at(k) == doctest::Approx(v).epsilon(1e-12));
    }
    CHECK(auxiliary_norm_sq(f, model, 0.6) <= squared_norm(f) * (1.0 + 1e-14));
  }
}

TEST_CASE("certified approximation") {
  const auto cost = CostFunction::polynomial(1.0);
  const auto r = certified_non_anova_approximation(cubic_model(), 0.1, cost, 0.5);
  const auto direct = enumerate_active_set(r.aux.auxiliary, 0.1);
  CHECK(r.set.terms == direct.terms);
  CHECK(r.set.largest_excluded_score == direct.largest_excluded_score);
  CHECK(r.cost_nss == algorithm_cost(direct, cost, CostMode::nss));
  CHECK(r.nominal_eps == 0.1);
  CHECK(r.certified_bound.lo == doctest::Approx(0.1 * std::sqrt(r.aux.c_gamma.bracket.lo)));
  CHECK(r.certified_bound.hi == doctest::Approx(0.1 * std::sqrt(r.aux.c_gamma.bracket.hi)));
  CHECK(r.certified_bound.width() <= 1e-6 * r.certified_bound.hi);

  const auto none = certified_non_anova_approximation(cubic_model(), 1.5, cost, 0.5);
  CHECK(none.set.terms.empty());
  CHECK(none.certified_bound.hi == doctest::Approx(std::sqrt(none.aux.c_gamma.bracket.hi)));

  const ProblemModel finite(DecreasingSequence::table({0.25, 0.0625}),
                            DecreasingSequence::power(2.0));
  const auto f = certified_non_anova_approximation(finite, 0.1, cost, 0.5);
  CHECK(f.certified_bound.lo == f.certified_bound.hi);
  CHECK(f.certified_bound.lo == doctest::Approx(0.1 * std::sqrt(1.5 * 1.25)));
}

TEST_CASE("non-ANOVA rate bounds") {
  const auto a = non_anova_rate_bounds(2, 2, 2, 2);
  CHECK(a.lower == doctest::Approx(1.0 / 6.0));
  CHECK(a.upper == doctest::Approx(0.25));
  const auto b = non_anova_rate_bounds(2, 6, 6, 1);
  CHECK(b.lower == 1.0);
  CHECK(b.upper == 1.0);
  const auto c = non_anova_rate_bounds(4, 3, 3, 1);
  CHECK(c.lower == 0.5);
  CHECK(c.upper == 1.0);
  CHECK(kind_of([] { (void)non_anova_rate_bounds(2, 3, INFINITY, 1); }) ==
        ErrorKind::invalid_argument);
  CHECK(kind_of([] { (void)non_anova_rate_bounds(2, 3, 3, 0); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("witness norm") {
  const auto m = square_model();
  const auto w = witness_norm(m, 1.0, 0.5, 10);
  const auto t1 = oracle::zeta_tail(2.0, 10, 100000);
  const auto t2 = oracle::zeta_tail(4.0, 10, 100000);
  const double lo = static_cast<double>(0.75L * t2.lo / t1.hi + 0.25L * t1.lo);
  const double hi = static_cast<double>(0.75L * t2.hi / t1.lo + 0.25L * t1.hi);
  CHECK(w.lo <= hi * (1.0 + 1e-12));
  CHECK(w.hi >= lo * (1.0 - 1e-12));
  CHECK(w.width() <= 1e-6 * w.hi);
  const double second_lo = 0.25 / 11.0, second_hi = 0.25 / 10.0;
  CHECK(w.lo > second_lo);
  CHECK(w.lo - 0.75 * t2.hi / t1.lo < second_hi);

  const auto degenerate = witness_norm(m, 0.25, 0.5, 10);
  CHECK(degenerate.lo == doctest::Approx(0.25 * static_cast<double>(t1.lo)).epsilon(1e-6));
  CHECK(degenerate.hi == doctest::Approx(0.25 * static_cast<double>(t1.hi)).epsilon(1e-6));

  const ProblemModel finite(DecreasingSequence::table({0.5, 0.25, 0.125}),
                            DecreasingSequence::power(2.0));
  const auto empty = witness_norm(finite, 1.0, 0.5, 3);
  CHECK(empty.lo == 0.0);
  CHECK(empty.hi == 0.0);

  CHECK(kind_of([&] { (void)witness_norm(m, 1.0, 0.0, 10); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { (void)witness_norm(m, 0.1, 0.5, 10); }) == ErrorKind::invalid_argument);
}

TEST_CASE("witness lower bound decays at the non-ANOVA rate") {
  const auto m = square_model();
  const auto cost = CostFunction::polynomial(1.0);
  std::vector<double> x, y;
  for (double budget = 100.0; budget <= 1e5; budget *= 10.0) {
    const auto w = witness_lower_bound(m, cost, 1.0, 0.5, budget);
    CHECK(w.L == static_cast<Index>(budget));
    CHECK(w.error_lower_bound == doctest::Approx(std::sqrt(w.norm_sq.lo)));
    CHECK(w.integral.lo > 0.5 * std::sqrt(1.0 / (budget + 1.0)));
    CHECK(w.integral.hi < 0.5 * std::sqrt(1.0 / budget));
    x.push_back(std::log(budget));
    y.push_back(std::log(w.error_lower_bound));
  }
  // (d_gamma - 1) / (2 s) = 1/2.
  CHECK(-oracle::slope(x, y) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("ANOVA and non-ANOVA comparison") {
  const auto a = comparison_gap(2, 2, 2);
  CHECK(a.anova_rate == doctest::Approx(1.0 / 3.0));
  CHECK(a.non_anova_upper == doctest::Approx(0.25));
  CHECK(a.strict);
  CHECK_FALSE(comparison_gap(4, 2, 2).strict);
  const auto c = comparison_gap(1.5, 10, 1);
  CHECK(c.anova_rate == doctest::Approx(0.375));
  CHECK(c.non_anova_upper == doctest::Approx(0.25));
  CHECK(c.strict);
}

}  // TEST_SUITE
