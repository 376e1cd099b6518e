// SPDX-License-Identifier: Apache-2.0
//
// Closed-form rate bounds (bits per source symbol, logarithms base 2) for the
// random and the arbitrary InDel update problems, with per-term breakdowns.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "indel/error.hpp"

namespace indel {

inline constexpr double kLog2E = 1.4426950408889634;  // log2(e)

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kDomainError, "entropy argument outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

struct RateBound {
  double value = 0;
  // Keys: H_del, H_ins, ins_log_a, c_term, correction.
  std::map<std::string, double> terms;
  double tau = 0;
  double truncation_error = 0;
};

namespace detail {

inline RateBound make_bound(double h_del, double h_ins, double ins_log_a, double c_term,
                            double correction, double tau, double trunc) {
  RateBound b;
  b.terms = {{"H_del", h_del}, {"H_ins", h_ins}, {"ins_log_a", ins_log_a},
             {"c_term", c_term}, {"correction", correction}};
  b.value = h_del + h_ins + ins_log_a + c_term + correction;
  b.tau = tau;
  b.truncation_error = trunc;
  return b;
}

inline void check_rates(double eps, double del) {
  if (!(eps >= 0.0 && eps < 1.0) || !(del >= 0.0 && del < 1.0)) {
    fail(ErrorCode::kDomainError, "edit rates must lie in [0, 1)");
  }
}

inline void check_alphabet_size(double a, double min) {
  if (!(a >= min)) fail(ErrorCode::kDomainError, "alphabet too small for this bound");
}

inline double c_term_l(double q, std::uint64_t l) {
  const double dl = static_cast<double>(l);
  return std::pow(q, dl - 1.0) * (1.0 - q) * (1.0 - q) * dl * std::log2(dl);
}

}  // namespace detail

// Partial sum of C_a = sum_{l>=1} (1/a)^(l-1) (1-1/a)^2 l log2 l up to l = L.
inline double c_constant_partial(std::uint32_t a, std::uint64_t L) {
  detail::check_alphabet_size(a, 2);
  const double q = 1.0 / a;
  double sum = 0;
  for (std::uint64_t l = 1; l <= L; ++l) sum += detail::c_term_l(q, l);
  return sum;
}

struct SeriesValue {
  double value = 0;
  double truncation_error = 0;  // certified upper bound on the omitted tail
  std::uint64_t terms = 0;
};

// The series is summed until its tail is certified below tol: once the term
// ratio t_{l+1}/t_l = q (l+1)log(l+1) / (l log l) is below 1 it is decreasing
// in l, so the tail after L is at most t_{L+1} / (1 - ratio at L+1).
inline SeriesValue c_constant(std::uint32_t a, double tol = 1e-12) {
  detail::check_alphabet_size(a, 2);
  if (!(tol > 0)) fail(ErrorCode::kDomainError, "tolerance must be positive");
  const double q = 1.0 / a;
  SeriesValue s;
  for (std::uint64_t L = 1;; ++L) {
    s.value += detail::c_term_l(q, L);
    s.terms = L;
    const double l1 = static_cast<double>(L + 1);
    const double next = detail::c_term_l(q, L + 1);
    const double ratio = q * ((l1 + 1) * std::log2(l1 + 1)) / (l1 * std::log2(l1));
    if (ratio < 1.0) {
      const double tail = next / (1.0 - ratio);
      if (tail <= tol) {
        s.truncation_error = tail;
        return s;
      }
    }
    if (L > 100000) fail(ErrorCode::kDomainError, "series did not converge");
  }
}

// Lower bound for the random source with left-to-right random edits:
// H(del) + H(eps) + eps log a - (del+eps) C_a - 56 max(eps,del)^(2-tau).
inline RateBound rpes_lower_bound(double eps, double del, std::uint32_t a, double tau = 0.1) {
  detail::check_rates(eps, del);
  detail::check_alphabet_size(a, 2);
  if (!(tau > 0 && tau < 1)) fail(ErrorCode::kDomainError, "tau must lie in (0, 1)");
  const SeriesValue c = c_constant(a);
  const double mx = std::max(eps, del);
  return detail::make_bound(binary_entropy(del), binary_entropy(eps), eps * std::log2(double(a)),
                            -(del + eps) * c.value, -56.0 * std::pow(mx, 2.0 - tau), tau,
                            c.truncation_error);
}

// Lower bound for arbitrary sources and edits (needs a >= 3), in the exact
// counting form (1-del) H(del/(1-del)) + (1-del+eps) H(eps/(1-del+eps))
// + eps log(a-2).
inline RateBound apes_lower_bound(double eps, double del, std::uint32_t a) {
  detail::check_rates(eps, del);
  if (a < 3) fail(ErrorCode::kDomainError, "arbitrary-edit lower bound needs a >= 3");
  if (!(del <= 0.5)) fail(ErrorCode::kDomainError, "deletion rate above 1/2");
  const double h_del = (1.0 - del) * binary_entropy(del / (1.0 - del));
  const double scale = 1.0 - del + eps;
  const double h_ins = scale * binary_entropy(eps / scale);
  return detail::make_bound(h_del, h_ins, eps * std::log2(double(a - 2)), 0.0, 0.0, 0.0, 0.0);
}

// The same bound after second-order expansion:
// H(del) + H(eps) + eps log a + log2(e) (eps^2 - del^2 - eps del - 2 eps / a).
inline RateBound apes_lower_bound_expanded(double eps, double del, std::uint32_t a) {
  detail::check_rates(eps, del);
  if (a < 3) fail(ErrorCode::kDomainError, "arbitrary-edit lower bound needs a >= 3");
  const double corr = kLog2E * (eps * eps - del * del - eps * del - 2.0 * eps / a);
  return detail::make_bound(binary_entropy(del), binary_entropy(eps), eps * std::log2(double(a)),
                            0.0, corr, 0.0, 0.0);
}

// Insertion-only and deletion-only counting rates.
inline double insertion_only_count_rate(double eps, std::uint32_t a) {
  detail::check_rates(eps, 0);
  detail::check_alphabet_size(a, 2);
  return (1.0 + eps) * binary_entropy(eps / (1.0 + eps)) + eps * std::log2(double(a - 1));
}

inline double deletion_only_count_rate(double del) {
  if (!(del >= 0 && del < 0.5)) fail(ErrorCode::kDomainError, "deletion rate must lie in [0, 1/2)");
  return (1.0 - del) * binary_entropy(del / (1.0 - del));
}

enum class EditModel { kRpes, kApes };

// Rate achieved by the DP + entropy-coding scheme.
//   APES: H(del) + H(eps) + eps log a + log2(e) eps^2
//   RPES: H(del) + H(eps) + eps log a + (log a + log e - 2) max(eps,del)^(2-tau)
inline RateBound achievable_upper(double eps, double del, std::uint32_t a, EditModel model,
                                  double tau = 0.1) {
  detail::check_rates(eps, del);
  detail::check_alphabet_size(a, 2);
  const double la = std::log2(double(a));
  double corr;
  if (model == EditModel::kApes) {
    corr = kLog2E * eps * eps;
    tau = 0;
  } else {
    if (!(tau > 0 && tau < 1)) fail(ErrorCode::kDomainError, "tau must lie in (0, 1)");
    corr = (la + kLog2E - 2.0) * std::pow(std::max(eps, del), 2.0 - tau);
  }
  return detail::make_bound(binary_entropy(del), binary_entropy(eps), eps * la, 0.0, corr, tau, 0.0);
}

// log2 of the binomial coefficient C(n, k), via lgamma.
inline double log2_binomial(double n, double k) {
  if (k < 0 || k > n) return -INFINITY;
  return (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) / std::log(2.0);
}

}  // namespace indel
