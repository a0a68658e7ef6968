#include "nssapprox/active_set.hpp"

#include <algorithm>
#include <cmath>

#include "nssapprox/error.hpp"

namespace nssapprox {

Threshold::Threshold(double eps) : eps_(eps), eps_sq_(eps * eps) {
  if (!(eps > 0.0)) fail(ErrorKind::invalid_argument, "eps must be > 0");
}

Threshold Threshold::squared(double eps_sq) {
  if (!(eps_sq > 0.0)) fail(ErrorKind::invalid_argument, "eps^2 must be > 0");
  return Threshold(std::sqrt(eps_sq), eps_sq);
}

Index ActiveSet::level_count(Index k) const {
  const auto it = level_counts.find(k);
  return it == level_counts.end() ? 0 : it->second;
}

namespace {

// Lazily grown caches of gamma_k and lambda_j.
class SequenceCache {
 public:
  explicit SequenceCache(const DecreasingSequence& s) : seq_(s) {}
  double operator()(Index n) {
    if (n > values_.size()) {
      const Index target = std::max<Index>(n, 2 * values_.size());
      values_.reserve(target);
      for (Index i = values_.size() + 1; i <= target; ++i) {
        values_.push_back(seq_(i));
      }
    }
    return values_[n - 1];
  }

 private:
  const DecreasingSequence& seq_;
  std::vector<double> values_;
};

double singleton_score(const ProblemModel& model, Index k, Index j) {
  return (1.0 * model.gamma()(k)) * model.lambda()(j);
}

class Enumerator {
 public:
  Enumerator(const ProblemModel& model, double t, const EnumerationOptions& opt,
             ActiveSet& out)
      : model_(model), t_(t), opt_(opt), out_(out),
        gamma_(model.gamma()), lambda_(model.lambda()) {}

  void run() {
    if (model_.include_empty_term()) accept(1.0);
    extend(1.0);
  }

 private:
  double child_score(double prefix_gamma, Index j) {
    if (current_.size() <= kLogSpaceThreshold) return prefix_gamma * lambda_(j);
    current_.j.back() = static_cast<EigenIndex>(j);
    return term_score(model_, current_);
  }

  void note_excluded(double score) {
    out_.largest_excluded_score = std::max(out_.largest_excluded_score, score);
  }

  void accept(double) {
    if (++out_.total_terms > opt_.term_budget) {
      fail(ErrorKind::budget_exceeded,
           "active set exceeds term budget " + std::to_string(opt_.term_budget) +
               " (eps^2 = " + std::to_string(t_) + ", depth " +
               std::to_string(current_.size()) + ", level " +
               std::to_string(current_.max_coordinate()) + ")");
    }
    if (!current_.is_empty()) ++out_.level_counts[current_.max_coordinate()];
    ++out_.size_counts[current_.size()];
    if (opt_.store_terms) out_.terms.push_back(current_);
  }

  // current_ is an accepted term with the given score; visit its extensions
  // by a new largest coordinate k, then by eigen-index j within k.
  void extend(double score) {
    const Index first = current_.max_coordinate() + 1;
    current_.u.push_back(0);
    current_.j.push_back(0);
    for (Index k = first;; ++k) {
      current_.u.back() = static_cast<Coordinate>(k);
      const double prefix = score * gamma_(k);
      const double head = child_score(prefix, 1);
      if (!(head > t_)) {
        note_excluded(head);
        break;
      }
      for (Index j = 1;; ++j) {
        const double s = j == 1 ? head : child_score(prefix, j);
        if (!(s > t_)) {
          note_excluded(s);
          break;
        }
        current_.j.back() = static_cast<EigenIndex>(j);
        accept(s);
        extend(s);
      }
    }
    current_.u.pop_back();
    current_.j.pop_back();
  }

  const ProblemModel& model_;
  double t_;
  const EnumerationOptions& opt_;
  ActiveSet& out_;
  SequenceCache gamma_;
  SequenceCache lambda_;
  Term current_;
};

}  // namespace

ActiveSet enumerate_active_set(const ProblemModel& model, Threshold eps,
                               const EnumerationOptions& options) {
  ActiveSet out;
  out.epsilon = eps.eps();
  out.eps_sq = eps.eps_sq();
  if (!(eps.eps_sq() < 1.0)) {
    out.largest_excluded_score = 1.0;
    return out;
  }
  Enumerator(model, eps.eps_sq(), options, out).run();
  if (!model.include_empty_term()) out.largest_excluded_score = 1.0;
  out.includes_empty_term = model.include_empty_term();
  out.m_eps = out.level_counts.empty() ? 0 : out.level_counts.rbegin()->first;
  if (options.store_terms) std::sort(out.terms.begin(), out.terms.end());
  return out;
}

std::vector<Term> level_slice(const ProblemModel& model, Threshold eps, Index k,
                              SliceMethod method) {
  if (k == 0) fail(ErrorKind::invalid_argument, "level must be >= 1");
  const double t = eps.eps_sq();
  std::vector<Term> out;
  if (!(t < 1.0)) return out;

  if (method == SliceMethod::filter) {
    const ActiveSet set = enumerate_active_set(model, eps);
    for (const Term& term : set.terms) {
      if (term.max_coordinate() == k) out.push_back(term);
    }
    return out;
  }

  // M(eps, k) = Mbar(eps, k) united with ({k}, j) x M(eps / sqrt(gamma_k
  // lambda_j), l) over l < k. The rescaled threshold gets a little slack and
  // every combined term is re-scored against the original threshold.
  constexpr double kSlack = 1e-9;
  for (Index j = 1;; ++j) {
    const double head = singleton_score(model, k, j);
    if (!(head > t)) break;
    const Term top{{static_cast<Coordinate>(k)}, {static_cast<EigenIndex>(j)}};
    out.push_back(top);
    const Threshold inner = Threshold::squared(t / head * (1.0 - kSlack));
    for (Index l = 1; l < k; ++l) {
      for (const Term& lower :
           level_slice(model, inner, l, SliceMethod::recursive)) {
        Term combined = combine(lower, top);
        if (term_score(model, combined) > t) out.push_back(std::move(combined));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Index level_count_recursive(const ProblemModel& model, Threshold eps, Index k) {
  if (k == 0) fail(ErrorKind::invalid_argument, "level must be >= 1");
  const double t = eps.eps_sq();
  if (!(t < 1.0)) return 0;
  Index count = single_coordinate_count(model, eps, k);
  const double lambda1 = model.lambda()(1);
  for (Index l = 1; l < k; ++l) {
    for (Index j = 1;; ++j) {
      const double head = singleton_score(model, k, j);
      // Level l contributes only while gamma_l lambda_1 clears the rescaled
      // threshold t / head.
      if (!(head * model.gamma()(l) * lambda1 > t)) break;
      count += level_count_recursive(model, Threshold::squared(t / head), l);
    }
  }
  return count;
}

Index single_coordinate_count(const ProblemModel& model, Threshold eps, Index k) {
  if (k == 0) fail(ErrorKind::invalid_argument, "level must be >= 1");
  const double t = eps.eps_sq();
  const auto above = [&](Index j) { return singleton_score(model, k, j) > t; };
  if (!above(1)) return 0;
  Index lo = 1, hi = 2;
  while (above(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    (above(mid) ? lo : hi) = mid;
  }
  return lo;
}

Index max_level(const ProblemModel& model, Threshold eps) {
  const double t = eps.eps_sq();
  const auto above = [&](Index k) { return singleton_score(model, k, 1) > t; };
  if (!above(1)) return 0;
  Index lo = 1, hi = 2;
  while (above(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    (above(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<Term> brute_force_active_set(const ProblemModel& model,
                                         Threshold eps, Coordinate max_coord,
                                         EigenIndex max_index, Index budget) {
  const double t = eps.eps_sq();
  std::vector<Term> out;
  if (!(t < 1.0)) return out;
  if (singleton_score(model, Index{max_coord} + 1, 1) > t) {
    fail(ErrorKind::truncation_unsound,
         "coordinate box " + std::to_string(max_coord) + " below the top level");
  }
  if (singleton_score(model, 1, Index{max_index} + 1) > t) {
    fail(ErrorKind::truncation_unsound,
         "index box " + std::to_string(max_index) + " below the first level");
  }
  if (model.include_empty_term()) out.push_back(Term::empty());

  const double lambda1 = model.lambda()(1);
  const double loose = t * (1.0 - 1e-12);
  Index scanned = 0;

  // Candidate sets u: gamma_u lambda_1^{|u|} bounds every score on u.
  std::vector<Coordinate> u;
  const auto scan_box = [&](double bound_without_last) {
    const std::size_t d = u.size();
    std::vector<EigenIndex> limit(d);
    for (std::size_t i = 0; i < d; ++i) {
      EigenIndex J = 0;
      while (J < max_index &&
             bound_without_last * model.lambda()(J + 1) > loose) {
        ++J;
      }
      limit[i] = J;
      if (J == 0) return;
    }
    Term term{u, std::vector<EigenIndex>(d, 1)};
    while (true) {
      if (++scanned > budget) {
        fail(ErrorKind::budget_exceeded, "brute-force scan exceeds budget");
      }
      if (term_score(model, term) > t) out.push_back(term);
      std::size_t pos = 0;
      while (pos < d && term.j[pos] == limit[pos]) term.j[pos++] = 1;
      if (pos == d) break;
      ++term.j[pos];
    }
  };
  const auto visit = [&](auto&& self, Coordinate next, double weight) -> void {
    for (Coordinate k = next; k <= max_coord; ++k) {
      const double w = weight * model.gamma()(k) * lambda1;
      if (!(w > loose)) break;
      u.push_back(k);
      scan_box(w / lambda1);
      self(self, k + 1, w);
      u.pop_back();
    }
  };
  visit(visit, 1, 1.0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nssapprox
