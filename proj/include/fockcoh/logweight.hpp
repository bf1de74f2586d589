// Signed log-space reals and log-gamma combinatorics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fockcoh/common.hpp"

namespace fockcoh {

/// A real number stored as sign * exp(log_magnitude).
///
/// sign() == 0 iff the value is exactly zero; the magnitude is then
/// meaningless and kept at -inf. Products are exact in this representation;
/// sums use the log-sum-exp merge.
class LogWeight {
 public:
  constexpr LogWeight() = default;

  static LogWeight zero() { return {}; }
  static LogWeight one() { return from_log(0.0); }

  static LogWeight from_log(double log_magnitude, int sign = 1) {
    LogWeight w;
    if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) return w;
    w.sign_ = sign > 0 ? 1 : -1;
    w.log_mag_ = log_magnitude;
    return w;
  }

  static LogWeight from_double(double x) {
    if (x == 0.0) return {};
    return from_log(std::log(std::abs(x)), x > 0 ? 1 : -1);
  }

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  double log_magnitude() const { return log_mag_; }
  double to_double() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_mag_); }

  LogWeight operator-() const {
    LogWeight w = *this;
    w.sign_ = -w.sign_;
    return w;
  }

  friend LogWeight operator*(LogWeight a, LogWeight b) {
    if (a.is_zero() || b.is_zero()) return {};
    return from_log(a.log_mag_ + b.log_mag_, a.sign_ * b.sign_);
  }

  friend LogWeight operator/(LogWeight a, LogWeight b) {
    if (b.is_zero()) throw InvalidArgument("LogWeight division by zero");
    if (a.is_zero()) return {};
    return from_log(a.log_mag_ - b.log_mag_, a.sign_ * b.sign_);
  }

  friend LogWeight operator+(LogWeight a, LogWeight b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.log_mag_ < b.log_mag_) std::swap(a, b);
    const double d = b.log_mag_ - a.log_mag_;
    if (a.sign_ == b.sign_) return from_log(a.log_mag_ + std::log1p(std::exp(d)), a.sign_);
    if (d == 0.0) return {};
    return from_log(a.log_mag_ + std::log1p(-std::exp(d)), a.sign_);
  }

  friend LogWeight operator-(LogWeight a, LogWeight b) { return a + (-b); }

  LogWeight& operator*=(LogWeight o) { return *this = *this * o; }
  LogWeight& operator+=(LogWeight o) { return *this = *this + o; }

  /// |x|^p for real p; sign is dropped.
  LogWeight abs_pow(double p) const {
    if (is_zero()) return p == 0.0 ? one() : LogWeight{};
    return from_log(log_mag_ * p, 1);
  }

 private:
  int sign_ = 0;
  double log_mag_ = -std::numeric_limits<double>::infinity();
};

inline double log_factorial(std::int64_t n) {
  if (n < 0) throw InvalidArgument("log_factorial of a negative integer");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// log(n! / prod counts_i!) with n = sum(counts).
inline double log_multinomial(std::span<const std::int64_t> counts) {
  std::int64_t n = 0;
  KahanSum s;
  for (auto c : counts) {
    if (c < 0) throw InvalidArgument("negative multinomial count");
    n += c;
    s.add(-log_factorial(c));
  }
  s.add(log_factorial(n));
  return s.value();
}

/// log(sum_i exp(x_i)) with the max-shift. Returns -inf for an empty input.
inline double log_sum_exp(std::span<const double> xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (mx == -std::numeric_limits<double>::infinity()) return mx;
  KahanSum s;
  for (double x : xs) s.add(std::exp(x - mx));
  return mx + std::log(s.value());
}

/// Shannon entropy in bits of the distribution p_i = exp(logp_i - logZ),
/// where logZ = log_sum_exp(logp). Zero-probability entries may be -inf.
inline double entropy_bits_from_logs(std::span<const double> logp) {
  const double logz = log_sum_exp(logp);
  if (logz == -std::numeric_limits<double>::infinity()) return 0.0;
  KahanSum h;
  for (double l : logp) {
    if (l == -std::numeric_limits<double>::infinity()) continue;
    const double p = std::exp(l - logz);
    if (p > 0.0) h.add(p * (logz - l));
  }
  return nats_to_bits(h.value());
}

}  // namespace fockcoh
