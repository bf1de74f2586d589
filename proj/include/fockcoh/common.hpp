// Shared tolerances, error types and small numeric helpers.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fockcoh {

inline constexpr const char* kVersion = "0.3.1";

/// Tolerances used across the library. Stated once here and reused everywhere.
namespace tol {
inline constexpr double kNormalization = 1e-12;
inline constexpr double kPsd = 1e-10;
inline constexpr double kBlockEquality = 1e-12;
/// Eigenvalues below this are treated as zero in von Neumann entropies.
inline constexpr double kEigenFloor = 1e-14;
/// Analytic tail mass allowed when truncating indefinite-number states.
inline constexpr double kTailMass = 1e-12;
}  // namespace tol

/// Caller supplied arguments that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed a materialization or sampling guard.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sector-conditional quantity requested for an unoccupied sector.
class UndefinedSector : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Rate requested where the target register is trivial (e.g. N = 0).
class UndefinedRate : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Natural log to bits. All reported entropies are in bits.
inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }
inline double bits_to_nats(double bits) { return bits * std::numbers::ln2; }

/// Neumaier compensated summation.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace fockcoh
