#include "nssapprox/sequence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nssapprox/error.hpp"

namespace nssapprox {

namespace {

constexpr Index kTwoPow33 = Index{1} << 33;

// Starts clip n_1 = 0 to 1; exponents keep the unclipped n_k.
constexpr std::array<Index, 5> kBlockStarts = {1, 2, 5, 33, kTwoPow33 + 1};
constexpr std::array<double, 5> kBlockExponents = {
    0.0, 2.0, 5.0, 33.0, static_cast<double>(kTwoPow33 + 1)};

std::size_t remark_block_of(Index n) {
  std::size_t k = 0;
  while (k + 1 < kBlockStarts.size() && kBlockStarts[k + 1] <= n) ++k;
  return k;
}

std::string format_param(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string default_name(const DecreasingSequence::Kind& kind) {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, seq::Power>) {
          return "power(p=" + format_param(k.exponent) +
                 ",c=" + format_param(k.coefficient) + ")";
        } else if constexpr (std::is_same_v<T, seq::PowerLog>) {
          return "power_log(p=" + format_param(k.exponent) +
                 ",beta=" + format_param(k.log_exponent) +
                 ",c=" + format_param(k.coefficient) + ")";
        } else if constexpr (std::is_same_v<T, seq::Geometric>) {
          return "geometric(r=" + format_param(k.ratio) +
                 ",c=" + format_param(k.coefficient) + ")";
        } else if constexpr (std::is_same_v<T, seq::RemarkBlock>) {
          return k.power == 1.0 ? std::string("remark_block")
                                : "remark_block^" + format_param(k.power);
        } else {
          return "table(" + std::to_string(k.values.size()) + ")";
        }
      },
      kind);
}

void require_index(Index n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "sequence index must be >= 1");
}

}  // namespace

struct DecreasingSequence::Impl {
  Kind kind;
  std::string name;
  std::optional<PowerEnvelope> declared_envelope;
  std::optional<double> declared_low;
  std::optional<double> declared_up;
};

DecreasingSequence::DecreasingSequence(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

DecreasingSequence DecreasingSequence::power(double exponent,
                                             double coefficient) {
  if (!(exponent > 0.0) || !(coefficient > 0.0) || !std::isfinite(exponent) ||
      !std::isfinite(coefficient)) {
    fail(ErrorKind::invalid_argument,
         "power sequence needs positive finite exponent and coefficient");
  }
  Kind kind = seq::Power{coefficient, exponent};
  auto name = default_name(kind);
  return DecreasingSequence(
      std::make_shared<const Impl>(Impl{std::move(kind), std::move(name), {}, {}, {}}));
}

DecreasingSequence DecreasingSequence::power_log(double exponent,
                                                 double log_exponent,
                                                 double coefficient) {
  if (!(exponent > 0.0) || !(coefficient > 0.0) ||
      !std::isfinite(log_exponent)) {
    fail(ErrorKind::invalid_argument,
         "power_log sequence needs positive exponent and coefficient");
  }
  Kind kind = seq::PowerLog{coefficient, exponent, log_exponent};
  auto name = default_name(kind);
  return DecreasingSequence(
      std::make_shared<const Impl>(Impl{std::move(kind), std::move(name), {}, {}, {}}));
}

DecreasingSequence DecreasingSequence::geometric(double ratio,
                                                 double coefficient) {
  if (!(ratio > 0.0 && ratio < 1.0) || !(coefficient > 0.0)) {
    fail(ErrorKind::invalid_argument,
         "geometric sequence needs ratio in (0,1) and positive coefficient");
  }
  Kind kind = seq::Geometric{coefficient, ratio};
  auto name = default_name(kind);
  return DecreasingSequence(
      std::make_shared<const Impl>(Impl{std::move(kind), std::move(name), {}, {}, {}}));
}

DecreasingSequence DecreasingSequence::remark_block() {
  Kind kind = seq::RemarkBlock{};
  auto name = default_name(kind);
  return DecreasingSequence(
      std::make_shared<const Impl>(Impl{std::move(kind), std::move(name), {}, {}, {}}));
}

DecreasingSequence DecreasingSequence::table(std::vector<double> values) {
  if (values.empty()) fail(ErrorKind::invalid_argument, "empty sequence table");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      fail(ErrorKind::invalid_sequence,
           "table entry " + std::to_string(i + 1) + " is not positive");
    }
    if (i > 0 && values[i] > values[i - 1]) {
      fail(ErrorKind::invalid_sequence,
           "table increases at index " + std::to_string(i + 1));
    }
  }
  Kind kind = seq::Table{std::move(values)};
  auto name = default_name(kind);
  return DecreasingSequence(
      std::make_shared<const Impl>(Impl{std::move(kind), std::move(name), {}, {}, {}}));
}

double DecreasingSequence::operator()(Index n) const {
  require_index(n);
  return std::visit(
      [n](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        const double x = static_cast<double>(n);
        if constexpr (std::is_same_v<T, seq::Power>) {
          return k.coefficient * std::pow(x, -k.exponent);
        } else if constexpr (std::is_same_v<T, seq::PowerLog>) {
          return k.coefficient * std::pow(x, -k.exponent) *
                 std::pow(std::log(x + 1.0), k.log_exponent);
        } else if constexpr (std::is_same_v<T, seq::Geometric>) {
          return k.coefficient * std::pow(k.ratio, x);
        } else if constexpr (std::is_same_v<T, seq::RemarkBlock>) {
          const auto b = remark_block_of(n);
          const double v = std::exp2(-k.power * kBlockExponents[b]);
          if (!(v > 0.0)) {
            fail(ErrorKind::out_of_range,
                 "remark_block value at n=" + std::to_string(n) +
                     " is not representable");
          }
          return v;
        } else {
          return n <= k.values.size() ? k.values[n - 1] : 0.0;
        }
      },
      impl_->kind);
}

double DecreasingSequence::neg_log(Index n) const {
  require_index(n);
  return std::visit(
      [this, n](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        const double x = static_cast<double>(n);
        if constexpr (std::is_same_v<T, seq::Power>) {
          return -std::log(k.coefficient) + k.exponent * std::log(x);
        } else if constexpr (std::is_same_v<T, seq::PowerLog>) {
          return -std::log(k.coefficient) + k.exponent * std::log(x) -
                 k.log_exponent * std::log(std::log(x + 1.0));
        } else if constexpr (std::is_same_v<T, seq::Geometric>) {
          return -std::log(k.coefficient) - x * std::log(k.ratio);
        } else if constexpr (std::is_same_v<T, seq::RemarkBlock>) {
          return k.power * kBlockExponents[remark_block_of(n)] *
                 std::numbers::ln2;
        } else {
          const double v = (*this)(n);
          return v > 0.0 ? -std::log(v) : infinity;
        }
      },
      impl_->kind);
}

DecreasingSequence DecreasingSequence::powered(double power) const {
  if (!(power > 0.0) || !std::isfinite(power)) {
    fail(ErrorKind::invalid_argument, "sequence power must be positive");
  }
  Kind kind = std::visit(
      [power](const auto& k) -> Kind {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, seq::Power>) {
          return seq::Power{std::pow(k.coefficient, power), k.exponent * power};
        } else if constexpr (std::is_same_v<T, seq::PowerLog>) {
          return seq::PowerLog{std::pow(k.coefficient, power),
                               k.exponent * power, k.log_exponent * power};
        } else if constexpr (std::is_same_v<T, seq::Geometric>) {
          return seq::Geometric{std::pow(k.coefficient, power),
                                std::pow(k.ratio, power)};
        } else if constexpr (std::is_same_v<T, seq::RemarkBlock>) {
          return seq::RemarkBlock{k.power * power};
        } else {
          std::vector<double> v(k.values);
          for (double& x : v) x = std::pow(x, power);
          return seq::Table{std::move(v)};
        }
      },
      impl_->kind);
  Impl impl{std::move(kind), impl_->name + "^" + format_param(power), {}, {}, {}};
  if (impl_->declared_envelope) {
    impl.declared_envelope =
        PowerEnvelope{std::pow(impl_->declared_envelope->coefficient, power),
                      impl_->declared_envelope->exponent * power};
  }
  if (impl_->declared_low) impl.declared_low = *impl_->declared_low * power;
  if (impl_->declared_up) impl.declared_up = *impl_->declared_up * power;
  return DecreasingSequence(std::make_shared<const Impl>(std::move(impl)));
}

std::optional<Index> DecreasingSequence::support() const {
  if (const auto* t = std::get_if<seq::Table>(&impl_->kind)) {
    return static_cast<Index>(t->values.size());
  }
  return std::nullopt;
}

std::optional<PowerEnvelope> DecreasingSequence::envelope() const {
  if (impl_->declared_envelope) return impl_->declared_envelope;
  return std::visit(
      [](const auto& k) -> std::optional<PowerEnvelope> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, seq::Power>) {
          return PowerEnvelope{k.coefficient, k.exponent};
        } else if constexpr (std::is_same_v<T, seq::PowerLog>) {
          // ln(n+1) >= ln 2, so a non-positive log exponent is bounded there.
          if (k.log_exponent <= 0.0) {
            return PowerEnvelope{
                k.coefficient * std::pow(std::numbers::ln2, k.log_exponent),
                k.exponent};
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, seq::RemarkBlock>) {
          // On [n_k, n_{k+1}) we have n <= 2^{n_k}, hence y_n <= 1/n.
          return PowerEnvelope{1.0, k.power};
        } else {
          return std::nullopt;
        }
      },
      impl_->kind);
}

std::optional<double> DecreasingSequence::claimed_decay_low() const {
  if (impl_->declared_low) return impl_->declared_low;
  return std::visit(
      [](const auto& k) -> std::optional<double> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, seq::Power> ||
                      std::is_same_v<T, seq::PowerLog>) {
          return k.exponent;
        } else if constexpr (std::is_same_v<T, seq::RemarkBlock>) {
          return k.power;
        } else {
          return infinity;
        }
      },
      impl_->kind);
}

std::optional<double> DecreasingSequence::claimed_decay_up() const {
  if (impl_->declared_up) return impl_->declared_up;
  return std::visit(
      [](const auto& k) -> std::optional<double> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, seq::Power> ||
                      std::is_same_v<T, seq::PowerLog>) {
          return k.exponent;
        } else {
          return infinity;
        }
      },
      impl_->kind);
}

const std::string& DecreasingSequence::name() const { return impl_->name; }

const DecreasingSequence::Kind& DecreasingSequence::kind() const {
  return impl_->kind;
}

DecreasingSequence DecreasingSequence::with_name(std::string name) const {
  Impl impl = *impl_;
  impl.name = std::move(name);
  return DecreasingSequence(std::make_shared<const Impl>(std::move(impl)));
}

DecreasingSequence DecreasingSequence::with_envelope(PowerEnvelope env) const {
  if (!(env.coefficient > 0.0) || !(env.exponent > 0.0)) {
    fail(ErrorKind::invalid_argument, "envelope needs positive parameters");
  }
  Impl impl = *impl_;
  impl.declared_envelope = env;
  return DecreasingSequence(std::make_shared<const Impl>(std::move(impl)));
}

DecreasingSequence DecreasingSequence::with_claimed_decay(
    std::optional<double> low, std::optional<double> up) const {
  if ((low && !(*low > 0.0)) || (up && !(*up > 0.0)) ||
      (low && up && *low > *up)) {
    fail(ErrorKind::invalid_argument,
         "claimed decay rates must be positive with low <= up");
  }
  Impl impl = *impl_;
  impl.declared_low = low;
  impl.declared_up = up;
  return DecreasingSequence(std::make_shared<const Impl>(std::move(impl)));
}

std::span<const Index> remark_block_starts() noexcept { return kBlockStarts; }

DecreasingSequence remark_block_sequence() {
  return DecreasingSequence::remark_block();
}

std::vector<Index> dyadic_sample_points(Index horizon) {
  std::vector<Index> points;
  for (Index n = 2; n != 0 && n <= horizon; n <<= 1) points.push_back(n);
  return points;
}

namespace {

std::vector<double> local_slopes(const DecreasingSequence& seq, Index horizon,
                                 std::span<const Index> sample_points) {
  if (sample_points.empty()) {
    fail(ErrorKind::invalid_argument, "empty sample set");
  }
  std::vector<Index> sorted(sample_points.begin(), sample_points.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 2 || sorted.back() > horizon) {
    fail(ErrorKind::invalid_argument, "sample points must lie in [2, horizon]");
  }
  std::vector<double> slopes;
  slopes.reserve(sorted.size());
  double previous = -infinity;
  for (Index n : sorted) {
    const double nl = seq.neg_log(n);
    if (!std::isfinite(nl)) {
      fail(ErrorKind::invalid_sequence,
           "non-positive value at n=" + std::to_string(n));
    }
    if (nl < previous) {
      fail(ErrorKind::invalid_sequence,
           "sequence increases before n=" + std::to_string(n));
    }
    previous = nl;
    slopes.push_back(nl / std::log(static_cast<double>(n)));
  }
  return slopes;
}

}  // namespace

double estimate_decay_low(const DecreasingSequence& seq, Index horizon,
                          std::span<const Index> sample_points) {
  const auto slopes = local_slopes(seq, horizon, sample_points);
  return *std::min_element(slopes.begin(), slopes.end());
}

double estimate_decay_up(const DecreasingSequence& seq, Index horizon,
                         std::span<const Index> sample_points) {
  const auto slopes = local_slopes(seq, horizon, sample_points);
  return *std::max_element(slopes.begin(), slopes.end());
}

double partial_power_sum(const DecreasingSequence& seq, double alpha, Index N) {
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "alpha must be > 0");
  if (N < 1) fail(ErrorKind::invalid_argument, "N must be >= 1");
  const double inv = 1.0 / alpha;
  CompensatedSum sum;
  for (Index n = 1; n <= N; ++n) sum.add(std::pow(seq(n), inv));
  return sum.value();
}

SandwichReport check_sandwich(const DecreasingSequence& seq, double p1,
                              double p2, Index horizon) {
  if (!(p2 > 0.0) || !(p1 > p2)) {
    fail(ErrorKind::invalid_argument, "check_sandwich needs p1 > p2 > 0");
  }
  if (horizon < 1) fail(ErrorKind::invalid_argument, "horizon must be >= 1");
  SandwichReport r;
  r.c_low = infinity;
  r.c_up = 0.0;
  for (Index n = 1; n <= horizon; ++n) {
    const double x = seq(n);
    const double nd = static_cast<double>(n);
    const double lo = x * std::pow(nd, p1);
    const double up = x * std::pow(nd, p2);
    if (lo < r.c_low) {
      r.c_low = lo;
      r.argmin = n;
    }
    if (up > r.c_up) {
      r.c_up = up;
      r.argmax = n;
    }
  }
  r.holds = r.c_low > 0.0 && std::isfinite(r.c_up);
  return r;
}

namespace {

// Integral of (c t^{-p})^power over [from, inf); requires p*power > 1.
double power_tail_integral(double c, double p, double power, double from) {
  const double e = p * power;
  return std::pow(c, power) * std::pow(from, 1.0 - e) / (e - 1.0);
}

constexpr double kRoundingSlack = 1e-14;

Interval widen(Interval iv) {
  return {iv.lo * (1.0 - kRoundingSlack), iv.hi * (1.0 + kRoundingSlack)};
}

}  // namespace

Interval power_tail_bracket(const DecreasingSequence& seq, Index L,
                            double power, Index partial_terms) {
  if (!(power > 0.0)) fail(ErrorKind::invalid_argument, "power must be > 0");

  if (const auto s = seq.support()) {
    if (L >= *s) return {0.0, 0.0};
    CompensatedSum sum;
    for (Index j = L + 1; j <= *s; ++j) sum.add(std::pow(seq(j), power));
    return {sum.value(), sum.value()};
  }

  if (const auto* g = std::get_if<seq::Geometric>(&seq.kind())) {
    const double rp = std::pow(g->ratio, power);
    const double v = std::pow(g->coefficient, power) *
                     std::pow(rp, static_cast<double>(L + 1)) / (1.0 - rp);
    return widen({v, v});
  }

  const Index K = L + partial_terms;
  CompensatedSum partial;
  for (Index j = L + 1; j <= K; ++j) partial.add(std::pow(seq(j), power));

  if (const auto* p = std::get_if<seq::Power>(&seq.kind())) {
    if (!(p->exponent * power > 1.0)) {
      fail(ErrorKind::divergent_constant,
           "sum of x_j^" + format_param(power) + " diverges for " + seq.name());
    }
    const double lo = power_tail_integral(p->coefficient, p->exponent, power,
                                          static_cast<double>(K + 1));
    const double hi = power_tail_integral(p->coefficient, p->exponent, power,
                                          static_cast<double>(K));
    return widen({partial.value() + lo, partial.value() + hi});
  }

  const auto env = seq.envelope();
  if (!env) {
    fail(ErrorKind::divergent_constant,
         "no certified envelope for tail sums of " + seq.name());
  }
  if (!(env->exponent * power > 1.0)) {
    fail(ErrorKind::divergent_constant,
         "envelope of " + seq.name() + " does not certify convergence of x_j^" +
             format_param(power));
  }
  const double hi = power_tail_integral(env->coefficient, env->exponent, power,
                                        static_cast<double>(K));
  return widen({partial.value(), partial.value() + hi});
}

}  // namespace nssapprox
