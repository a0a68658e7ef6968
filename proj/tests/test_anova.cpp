#include <doctest.h>

#include <functional>

#include <algorithm>
#include <cmath>
#include <random>

#include "nssapprox/anova.hpp"
#include "nssapprox/error.hpp"
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

ProblemModel geometric_model() {
  return ProblemModel(DecreasingSequence::geometric(0.25), DecreasingSequence::power(2.0));
}

ProblemModel cubic_model() {
  return ProblemModel(DecreasingSequence::power(3.0), DecreasingSequence::power(2.0));
}

const Threshold kTenth = Threshold::squared(0.1);

// Random coefficients on terms with coordinates <= 6 and indices <= 6.
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

TEST_SUITE("anova") {

TEST_CASE("apply_optimal keeps exactly the active coefficients") {
  const auto m = geometric_model();
  CoefficientFunction only_empty{{Term::empty(), 3.0}};
  CHECK(apply_optimal(m, kTenth, only_empty) == only_empty);
  CHECK(apply_optimal(m, 0.999, only_empty) == only_empty);

  const Term a = Term::make({1}, {1});
  const Term b = Term::make({1}, {2});
  const CoefficientFunction f{{a, 1.0}, {b, 1.0}};
  const auto kept = apply_optimal(m, kTenth, f);
  CHECK(kept.size() == 1);
  CHECK(kept.count(a) == 1);

  CHECK(apply_optimal(m, 1.0, f).empty());
  CHECK(apply_optimal(m, 1.0, only_empty).empty());

  const auto set = enumerate_active_set(m, kTenth);
  CHECK(apply_optimal(set, f) == kept);
}

TEST_CASE("exact L2 error examples") {
  const auto m = geometric_model();
  const Term a = Term::make({1}, {1});
  const Term b = Term::make({1}, {2});
  CHECK(exact_l2_error_sq(m, kTenth, {{Term::empty(), 2.0}, {a, 5.0}}) == 0.0);
  CHECK(exact_l2_error_sq(m, kTenth, {{b, 2.0}}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(worst_case_error(m, kTenth) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(worst_case_error(m, 1.0) == 1.0);
  CHECK(worst_case_error(m, 2.0) == 1.0);
}

TEST_CASE("unit mass on the largest excluded term attains the worst case") {
  const auto m = cubic_model();
  for (double eps_sq : {0.05, 0.01, 0.002}) {
    const Threshold t = Threshold::squared(eps_sq);
    const auto set = enumerate_active_set(m, t);
    const double lex = set.largest_excluded_score;
    // Just below lex the brute-force set gains exactly the terms scoring lex.
    const Threshold below = Threshold::squared(lex * (1.0 - 1e-12));
    const auto wider = brute_force_active_set(m, below, max_level(m, below),
                                              single_coordinate_count(m, below, 1));
    const auto same = brute_force_active_set(m, Threshold::squared(lex * (1.0 + 1e-12)),
                                             max_level(m, t), single_coordinate_count(m, t, 1));
    CHECK(same == set.terms);
    REQUIRE(wider.size() > set.terms.size());
    for (const Term& c : wider) {
      if (std::binary_search(set.terms.begin(), set.terms.end(), c)) continue;
      CHECK(term_score(m, c) == lex);
      CHECK(exact_l2_error_sq(m, t, {{c, 1.0}}) == lex);
    }
    CHECK(worst_case_error(m, t) == std::sqrt(lex));
  }
}

TEST_CASE("blockwise and termwise errors agree on random functions") {
  std::mt19937_64 rng(11);
  const auto m = cubic_model();
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_function(rng, 40);
    for (double eps_sq : {0.2, 0.01, 1e-4}) {
      const Threshold t = Threshold::squared(eps_sq);
      const double a = exact_l2_error_sq(m, t, f);
      const double b = exact_l2_error_sq_blockwise(m, t, f);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("the optimal algorithm is a linear orthogonal projection") {
  std::mt19937_64 rng(12);
  const auto m = cubic_model();
  const Threshold t = Threshold::squared(0.01);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_function(rng, 30);
    const auto g = random_function(rng, 30);
    const auto af = apply_optimal(m, t, f);
    CHECK(apply_optimal(m, t, af) == af);

    CoefficientFunction sum = f;
    for (const auto& [k, v] : g) sum[k] += 2.0 * v;
    const auto asum = apply_optimal(m, t, sum);
    const auto ag = apply_optimal(m, t, g);
    for (const auto& [k, v] : asum) {
      const double expect = (af.count(k) ? af.at(k) : 0.0) + 2.0 * (ag.count(k) ? ag.at(k) : 0.0);
      CHECK(v == doctest::Approx(expect).epsilon(1e-14));
    }

    CoefficientFunction residual;
    for (const auto& [k, v] : f) {
      if (!af.count(k)) residual[k] = v;
    }
    CHECK(squared_norm(af) + squared_norm(residual) ==
          doctest::Approx(squared_norm(f)).epsilon(1e-13));
  }
}

TEST_CASE("tradeoff curve is a staircase and does not depend on threads") {
  const auto m = cubic_model();
  const auto cost = CostFunction::polynomial(1.0);
  std::vector<double> grid;
  for (int k = 1; k <= 10; ++k) grid.push_back(std::ldexp(1.0, -k));
  const auto one = tradeoff_curve(m, cost, grid, 1);
  const auto many = tradeoff_curve(m, cost, grid, 4);
  REQUIRE(one.size() == grid.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].epsilon == grid[i]);
    CHECK(one[i].exact_error <= grid[i]);
    CHECK(one[i].cost_nss >= one[i].cost_unrestricted);
    CHECK(one[i].cost_nss == many[i].cost_nss);
    CHECK(one[i].exact_error == many[i].exact_error);
    CHECK(one[i].total_terms == many[i].total_terms);
    if (i > 0) {
      CHECK(one[i].cost_nss >= one[i - 1].cost_nss);
      CHECK(one[i].exact_error <= one[i - 1].exact_error);
    }
  }
  const std::vector<double> ascending{0.1, 0.2};
  CHECK(kind_of([&] { (void)tradeoff_curve(m, cost, ascending); }) ==
        ErrorKind::invalid_argument);
  const std::vector<double> outside{1.5, 0.1};
  CHECK(kind_of([&] { (void)tradeoff_curve(m, cost, outside); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("minimal error for a budget") {
  const auto m = geometric_model();
  const auto lin = CostFunction::polynomial(1.0);
  CHECK(minimal_error_for_budget(m, lin, 0.5, CostMode::nss).error == 1.0);
  const auto one = minimal_error_for_budget(m, lin, 1.0, CostMode::nss);
  CHECK(one.error == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(one.total_terms == 1);
  const auto two = minimal_error_for_budget(m, lin, 2.0, CostMode::nss);
  CHECK(two.error == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(two.total_terms == 2);
  CHECK(two.cost == 2.0);

  const ProblemModel finite(DecreasingSequence::table({0.5, 0.25}),
                            DecreasingSequence::table({1.0, 0.5}));
  double previous = 2.0;
  for (double budget : {1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
    const auto r = minimal_error_for_budget(finite, lin, budget, CostMode::nss);
    CHECK(r.cost <= budget);
    CHECK(r.error <= previous);
    previous = r.error;
  }
  CHECK(previous == 0.0);
}

TEST_CASE("minimal error is monotone in the budget and matches the curve") {
  const auto m = cubic_model();
  const auto lin = CostFunction::polynomial(1.0);
  double previous = 2.0;
  for (double budget = 1.0; budget < 5000.0; budget *= 1.7) {
    const auto r = minimal_error_for_budget(m, lin, budget, CostMode::nss);
    CHECK(r.cost <= budget);
    CHECK(r.error <= previous);
    previous = r.error;
    const auto set = enumerate_active_set(m, Threshold::squared(r.eps_sq));
    CHECK(algorithm_cost(set, lin, CostMode::nss) == r.cost);
    CHECK(std::sqrt(set.largest_excluded_score) == r.error);
  }
}

TEST_CASE("ANOVA rate bounds") {
  const auto a = anova_rate_bounds(2, 3, 3, 1);
  CHECK(a.lower == 0.75);
  CHECK(a.upper == 0.75);
  CHECK(a.p_lower == doctest::Approx(4.0 / 3.0));
  CHECK(anova_rate_bounds(2, 6, 6, 1).lower == 1.0);
  const auto c = anova_rate_bounds(2, 2, 4, 1);
  CHECK(c.lower == 0.5);
  CHECK(c.upper == 1.0);
  CHECK(anova_rate_bounds(2, 3, INFINITY, 1).upper == 1.0);
  CHECK(kind_of([] { (void)anova_rate_bounds(1, 3, 3, 1); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { (void)anova_rate_bounds(2, 3, 2, 1); }) == ErrorKind::invalid_argument);
  CHECK(std::isinf(exponent_of_rate(0.0)));
  CHECK(exponent_of_rate(0.5) == 2.0);
}

TEST_CASE("rate estimation") {
  std::vector<TradeoffPoint> synthetic;
  for (int k = 0; k < 10; ++k) {
    TradeoffPoint p;
    p.cost_nss = std::ldexp(1.0, k);
    p.cost_unrestricted = p.cost_nss;
    p.exact_error = std::pow(p.cost_nss, -0.75);
    synthetic.push_back(p);
  }
  const auto fit = estimate_rate(synthetic, CostMode::nss);
  CHECK(fit.rate == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(fit.points_used == 10);
  CHECK(fit.max_residual < 1e-12);

  for (auto& p : synthetic) p.exact_error = 0.3;
  CHECK(kind_of([&] { (void)estimate_rate(synthetic, CostMode::nss); }) ==
        ErrorKind::invalid_argument);

  // Pipeline value on gamma = j^-3, lambda = j^-2, s = 1, eps = 2^-1..2^-14.
  std::vector<double> grid;
  for (int k = 1; k <= 14; ++k) grid.push_back(std::ldexp(1.0, -k));
  const auto curve = tradeoff_curve(cubic_model(), CostFunction::polynomial(1.0), grid);
  const auto pipe = estimate_rate(curve, CostMode::nss);
  CHECK(pipe.rate == doctest::Approx(0.6032).epsilon(2e-3));
  CHECK(pipe.points_used == 14);
}

}  // TEST_SUITE
