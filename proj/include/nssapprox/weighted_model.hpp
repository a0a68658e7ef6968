#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nssapprox/numeric.hpp"
#include "nssapprox/sequence.hpp"

namespace nssapprox {

using Coordinate = std::uint32_t;
using EigenIndex = std::uint32_t;

/// Index pair (u, j): a finite coordinate set u, strictly increasing, with one
/// eigen-index per coordinate. Ordered canonically by (max u, u, j).
struct Term {
  std::vector<Coordinate> u;
  std::vector<EigenIndex> j;

  static Term empty() { return {}; }

  /// Validating constructor; throws invalid-argument for non-canonical input.
  static Term make(std::vector<Coordinate> u, std::vector<EigenIndex> j);

  Coordinate max_coordinate() const noexcept { return u.empty() ? 0 : u.back(); }
  std::size_t size() const noexcept { return u.size(); }
  bool is_empty() const noexcept { return u.empty(); }
  bool is_canonical() const noexcept;

  friend std::strong_ordering operator<=>(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b) = default;
};

/// (u1, j1) x (u2, j2) for disjoint u1, u2.
Term combine(const Term& a, const Term& b);

/// "1-2-7" style rendering of u and j; "-" for the empty term.
std::string format_coordinates(const Term& t);
std::string format_indices(const Term& t);

/// Product-weight model: weights gamma_u = prod gamma_i and per-coordinate
/// spectrum lambda, giving operator eigenvalues gamma_u * lambda_{u,j}.
class ProblemModel {
 public:
  /// Validates gamma_1 <= 1, gamma_1 * lambda_1 <= 1, monotonicity and
  /// positivity on a check horizon, and claimed d^low_lambda > 1.
  ProblemModel(DecreasingSequence gamma, DecreasingSequence lambda,
               bool lambda_is_block_spectrum = true,
               bool include_empty_term = true);

  const DecreasingSequence& gamma() const noexcept { return gamma_; }
  const DecreasingSequence& lambda() const noexcept { return lambda_; }
  bool lambda_is_block_spectrum() const noexcept { return block_spectrum_; }
  bool include_empty_term() const noexcept { return include_empty_; }

  ProblemModel with_gamma(DecreasingSequence gamma) const;

 private:
  DecreasingSequence gamma_;
  DecreasingSequence lambda_;
  bool block_spectrum_;
  bool include_empty_;
};

/// Terms with more coordinates than this are scored in log space.
inline constexpr std::size_t kLogSpaceThreshold = 16;

/// prod_{i in u} gamma_i; 1 for the empty set.
double product_weight(const ProblemModel& model, std::span<const Coordinate> u);

/// gamma_u * lambda_{u,j} as the left-to-right product
/// ((1 * gamma_{u_1}) * lambda_{j_1}) * gamma_{u_2} * ... .
/// The active-set enumerator reproduces this rounding exactly.
double term_score(const ProblemModel& model, const Term& t);

/// Exact closed form of sum_{k in u subset [k]} gamma_u^{1/tau} C^{|u|}:
///   C gamma_k^{1/tau} prod_{i<k} (1 + C gamma_i^{1/tau}).
double weighted_subset_sum(const ProblemModel& model, double tau, double C,
                           Index k);

struct ConstantBracket {
  Interval bracket;
  double value = 0.0;   ///< midpoint of the bracket
  Index truncation = 0; ///< number of explicit factors
};

/// C_gamma = sum_v gamma_v^c = prod_j (1 + gamma_j^c), bracketed to relative
/// width rel_tol. Brackets are nested as rel_tol decreases.
ConstantBracket c_gamma_constant(const ProblemModel& model, double c,
                                 double rel_tol);

/// Certified bracket for sum_{j > L} gamma_j^power.
Interval tail_weight_sum(const ProblemModel& model, Index L, double power);

}  // namespace nssapprox
