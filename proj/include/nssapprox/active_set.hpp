#pragma once

#include <map>
#include <vector>

#include "nssapprox/weighted_model.hpp"

namespace nssapprox {

/// Score threshold eps^2. Built either from eps or directly from eps^2, so
/// that a literal like eps^2 = 0.01 is used without a square-root round trip.
class Threshold {
 public:
  Threshold(double eps);  // NOLINT(google-explicit-constructor)
  static Threshold squared(double eps_sq);

  double eps() const noexcept { return eps_; }
  double eps_sq() const noexcept { return eps_sq_; }

 private:
  Threshold(double eps, double eps_sq) : eps_(eps), eps_sq_(eps_sq) {}
  double eps_;
  double eps_sq_;
};

struct EnumerationOptions {
  Index term_budget = 10'000'000;
  /// When false only counts and the frontier are kept.
  bool store_terms = true;
};

/// The optimal index set {(u, j) : gamma_u lambda_{u,j} > eps^2}.
struct ActiveSet {
  double epsilon = 0.0;
  double eps_sq = 0.0;
  std::vector<Term> terms;             ///< canonical order; empty if not stored
  std::map<Index, Index> level_counts; ///< k -> n_k for k >= 1
  std::map<Index, Index> size_counts;  ///< |u| -> count, empty term included
  Index total_terms = 0;
  Index m_eps = 0;
  double largest_excluded_score = 0.0;
  bool includes_empty_term = false;

  Index level_count(Index k) const;
};

ActiveSet enumerate_active_set(const ProblemModel& model, Threshold eps,
                               const EnumerationOptions& options = {});

enum class SliceMethod { filter, recursive };

/// M(eps, k): active terms with max u = k.
std::vector<Term> level_slice(const ProblemModel& model, Threshold eps, Index k,
                              SliceMethod method = SliceMethod::filter);

/// |M(eps, k)| from the disjoint-union count identity over lower levels.
Index level_count_recursive(const ProblemModel& model, Threshold eps, Index k);

/// #{j : gamma_k lambda_j > eps^2}.
Index single_coordinate_count(const ProblemModel& model, Threshold eps, Index k);

/// Largest k with gamma_k lambda_1 > eps^2, or 0.
Index max_level(const ProblemModel& model, Threshold eps);

/// Exhaustive scan over u in [max_coord], j_i <= max_index. Throws
/// truncation-unsound when the box could hide an active term.
std::vector<Term> brute_force_active_set(const ProblemModel& model,
                                         Threshold eps, Coordinate max_coord,
                                         EigenIndex max_index,
                                         Index budget = 50'000'000);

}  // namespace nssapprox
