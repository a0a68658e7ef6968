#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nssapprox/numeric.hpp"

namespace nssapprox {

using Index = std::uint64_t;

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Upper envelope x_n <= coefficient * n^{-exponent}, valid for all n >= 1.
struct PowerEnvelope {
  double coefficient = 1.0;
  double exponent = 0.0;
};

namespace seq {

/// coefficient * n^{-exponent}
struct Power {
  double coefficient = 1.0;
  double exponent = 1.0;
};

/// coefficient * n^{-exponent} * ln(n+1)^{log_exponent}
struct PowerLog {
  double coefficient = 1.0;
  double exponent = 1.0;
  double log_exponent = 0.0;
};

/// coefficient * ratio^n
struct Geometric {
  double coefficient = 1.0;
  double ratio = 0.5;
};

/// Piecewise-constant 2^{-power * n_k} on [n_k, n_{k+1}), with
/// n_{k+1} = 2^{n_k} + 1.
struct RemarkBlock {
  double power = 1.0;
};

/// Explicit values x_1..x_m; zero beyond the table.
struct Table {
  std::vector<double> values;
};

}  // namespace seq

/// Positive non-increasing null sequence x_1, x_2, ... with lazy evaluation.
///
/// Immutable value type; copies share the underlying descriptor. Evaluation is
/// deterministic. Finite tables are the one kind allowed to vanish, beyond
/// their last entry, which models finitely supported weights.
class DecreasingSequence {
 public:
  using Kind = std::variant<seq::Power, seq::PowerLog, seq::Geometric,
                            seq::RemarkBlock, seq::Table>;

  static DecreasingSequence power(double exponent, double coefficient = 1.0);
  static DecreasingSequence power_log(double exponent, double log_exponent,
                                      double coefficient = 1.0);
  static DecreasingSequence geometric(double ratio, double coefficient = 1.0);
  static DecreasingSequence remark_block();
  static DecreasingSequence table(std::vector<double> values);

  /// x_n for n >= 1.
  double operator()(Index n) const;

  /// -ln x_n, computed without forming x_n where the kind allows it; +inf
  /// when x_n = 0.
  double neg_log(Index n) const;

  /// x_n^power for all n, as a sequence of the same family where possible.
  DecreasingSequence powered(double power) const;

  /// Last index with a positive value, for finitely supported sequences.
  std::optional<Index> support() const;

  /// Analytic envelope used to certify tail sums, if one is known or declared.
  std::optional<PowerEnvelope> envelope() const;

  /// Lower/upper polynomial decay rates, either intrinsic to the family or
  /// declared by the caller. +inf for geometric and finitely supported kinds.
  std::optional<double> claimed_decay_low() const;
  std::optional<double> claimed_decay_up() const;

  const std::string& name() const;
  const Kind& kind() const;

  DecreasingSequence with_name(std::string name) const;
  DecreasingSequence with_envelope(PowerEnvelope env) const;
  DecreasingSequence with_claimed_decay(std::optional<double> low,
                                        std::optional<double> up) const;

 private:
  struct Impl;
  explicit DecreasingSequence(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Block boundaries n_1 = 1 (clipped from 0), n_2 = 2, n_3 = 5, n_4 = 33,
/// n_5 = 2^33 + 1. n_6 is not representable in 64 bits.
std::span<const Index> remark_block_starts() noexcept;

DecreasingSequence remark_block_sequence();

/// 2, 4, 8, ..., largest power of two <= horizon.
std::vector<Index> dyadic_sample_points(Index horizon);

/// min over samples of -ln x_n / ln n.
double estimate_decay_low(const DecreasingSequence& seq, Index horizon,
                          std::span<const Index> sample_points);

/// max over samples of -ln x_n / ln n.
double estimate_decay_up(const DecreasingSequence& seq, Index horizon,
                         std::span<const Index> sample_points);

/// sum_{j <= N} x_j^{1/alpha}, ascending with compensated accumulation.
double partial_power_sum(const DecreasingSequence& seq, double alpha, Index N);

struct SandwichReport {
  double c_low = 0.0;  ///< min_n x_n n^{p1}
  double c_up = 0.0;   ///< max_n x_n n^{p2}
  Index argmin = 1;
  Index argmax = 1;
  bool holds = false;
};

/// Scan [1, horizon] for the constants of n^{-p1} <~ x_n <~ n^{-p2}.
SandwichReport check_sandwich(const DecreasingSequence& seq, double p1,
                              double p2, Index horizon);

/// Certified bracket for sum_{j > L} x_j^power. Partial sums cover a finite
/// stretch; the remainder is bounded by monotone integral comparison against
/// the closed form (power, geometric) or the declared envelope.
Interval power_tail_bracket(const DecreasingSequence& seq, Index L,
                            double power, Index partial_terms = 4096);

}  // namespace nssapprox
