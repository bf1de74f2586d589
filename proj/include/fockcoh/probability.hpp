// Discrete distributions over labelled outcomes, stored in log space.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fockcoh/common.hpp"
#include "fockcoh/logweight.hpp"

namespace fockcoh {

/// Outcome label: an occupation vector, or an abstract symbol as a length-1 vector.
using Label = std::vector<int>;

/// Probability table p over labelled outcomes.
///
/// Probabilities are LogWeights so that very small entries (binomial tails at
/// N in the thousands) keep their magnitude. The total is checked against 1
/// on construction; truncated indefinite-number inputs are allowed to fall
/// short by their recorded tail mass.
class ProbabilityTable {
 public:
  ProbabilityTable() = default;

  ProbabilityTable(std::vector<Label> labels, std::vector<LogWeight> probs, double slack = 1e-10)
      : labels_(std::move(labels)), probs_(std::move(probs)) {
    require(labels_.size() == probs_.size(), "ProbabilityTable: label/probability size mismatch");
    for (const auto& p : probs_) require(p.sign() >= 0, "ProbabilityTable: negative probability");
    const double t = total();
    if (std::abs(t - 1.0) > slack) {
      throw InvalidArgument("ProbabilityTable: probabilities sum to " + std::to_string(t));
    }
  }

  static ProbabilityTable from_doubles(std::vector<Label> labels, const std::vector<double>& probs,
                                       double slack = 1e-10) {
    std::vector<LogWeight> w;
    w.reserve(probs.size());
    for (double p : probs) {
      require(p >= 0.0, "ProbabilityTable: negative probability");
      w.push_back(LogWeight::from_double(p));
    }
    return ProbabilityTable(std::move(labels), std::move(w), slack);
  }

  /// Uniform distribution over symbols 0..n-1.
  static ProbabilityTable uniform(int n) {
    require(n >= 1, "uniform table needs at least one outcome");
    std::vector<Label> labels;
    std::vector<LogWeight> w;
    for (int i = 0; i < n; ++i) {
      labels.push_back({i});
      w.push_back(LogWeight::from_log(-std::log(static_cast<double>(n))));
    }
    return ProbabilityTable(std::move(labels), std::move(w));
  }

  std::size_t size() const { return probs_.size(); }
  const Label& label(std::size_t i) const { return labels_[i]; }
  const std::vector<Label>& labels() const { return labels_; }
  LogWeight weight(std::size_t i) const { return probs_[i]; }
  double probability(std::size_t i) const { return probs_[i].to_double(); }
  double log_probability(std::size_t i) const { return probs_[i].log_magnitude(); }

  std::vector<double> log_probabilities() const {
    std::vector<double> out;
    out.reserve(probs_.size());
    for (const auto& p : probs_) out.push_back(p.log_magnitude());
    return out;
  }

  double total() const {
    const auto logs = log_probabilities();
    return std::exp(log_sum_exp(logs));
  }

  /// Copy rescaled to total exactly 1 (used after tail truncation).
  ProbabilityTable normalized() const {
    const auto logs = log_probabilities();
    const double logz = log_sum_exp(logs);
    std::vector<LogWeight> w;
    w.reserve(probs_.size());
    for (const auto& p : probs_) w.push_back(p.is_zero() ? p : LogWeight::from_log(p.log_magnitude() - logz));
    return ProbabilityTable(labels_, std::move(w));
  }

  /// Index of the label, or size() when absent. Linear scan.
  std::size_t find(const Label& l) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == l) return i;
    }
    return labels_.size();
  }

 private:
  std::vector<Label> labels_;
  std::vector<LogWeight> probs_;
};

}  // namespace fockcoh
