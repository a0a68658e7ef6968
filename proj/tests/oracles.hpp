#pragma once

// Test-only oracles that share no code path with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "nssapprox/weighted_model.hpp"

namespace oracle {

using nssapprox::Term;

// For gamma_j = lambda_j = j^{-a} and eps^2 = P^{-a}: the score exceeds eps^2
// iff prod u_i j_i < P, an integer condition with no rounding.
inline std::vector<Term> integer_product_set(std::uint64_t P) {
  std::vector<Term> out{Term::empty()};
  Term t;
  std::function<void(std::uint32_t, std::uint64_t)> grow =
      [&](std::uint32_t next, std::uint64_t prod) {
        for (std::uint32_t k = next; prod * k < P; ++k) {
          for (std::uint32_t j = 1; prod * k * j < P; ++j) {
            t.u.push_back(k);
            t.j.push_back(j);
            out.push_back(t);
            grow(k + 1, prod * k * j);
            t.u.pop_back();
            t.j.pop_back();
          }
        }
      };
  grow(1, 1);
  std::sort(out.begin(), out.end());
  return out;
}

// Direct long-double sum of f(j) for j in (L, N], ascending.
inline long double direct_sum(std::uint64_t L, std::uint64_t N,
                              const std::function<long double(std::uint64_t)>& f) {
  long double s = 0.0L;
  for (std::uint64_t j = L + 1; j <= N; ++j) s += f(j);
  return s;
}

// sum_{j > L} j^{-e} bracketed by a direct sum to N and integral tails.
struct Bracket {
  long double lo;
  long double hi;
};

inline Bracket zeta_tail(double e, std::uint64_t L, std::uint64_t N) {
  const long double head = direct_sum(L, N, [e](std::uint64_t j) {
    return std::pow(static_cast<long double>(j), -static_cast<long double>(e));
  });
  const long double lo = std::pow(static_cast<long double>(N + 1), 1.0L - e) / (e - 1.0L);
  const long double hi = std::pow(static_cast<long double>(N), 1.0L - e) / (e - 1.0L);
  return {head + lo, head + hi};
}

// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace oracle
