#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fockcoh/common.hpp"
#include "fockcoh/logweight.hpp"
#include "fockcoh/probability.hpp"

using namespace fockcoh;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double exact_factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}
}  // namespace

TEST(LogWeight, ArithmeticMatchesDoubles) {
  const std::vector<double> xs = {3.5, -2.25, 1e-7, -9e5, 0.0, 1.0};
  for (double a : xs) {
    for (double b : xs) {
      const auto la = LogWeight::from_double(a), lb = LogWeight::from_double(b);
      EXPECT_NEAR((la * lb).to_double(), a * b, 1e-12 * std::max(1.0, std::abs(a * b)));
      EXPECT_NEAR((la + lb).to_double(), a + b, 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)));
      EXPECT_NEAR((la - lb).to_double(), a - b, 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)));
      if (b != 0.0) {
        EXPECT_NEAR((la / lb).to_double(), a / b, 1e-12 * std::max(1.0, std::abs(a / b)));
      }
    }
  }
}

TEST(LogWeight, ExactCancellationIsZero) {
  const auto a = LogWeight::from_log(1234.5, -1);
  EXPECT_TRUE((a - a).is_zero());
  EXPECT_TRUE((a + (-a)).is_zero());
}

TEST(LogWeight, ValuesBeyondDoubleRange) {
  const auto big = LogWeight::from_log(5000.0);
  const auto prod = big * big;
  EXPECT_DOUBLE_EQ(prod.log_magnitude(), 10000.0);
  EXPECT_DOUBLE_EQ((prod / big).log_magnitude(), 5000.0);
  EXPECT_NEAR((big + big).log_magnitude(), 5000.0 + std::log(2.0), 1e-12);
}

TEST(LogWeight, DivisionByZeroThrows) {
  EXPECT_THROW(LogWeight::one() / LogWeight::zero(), InvalidArgument);
}

TEST(LogWeight, AbsPow) {
  EXPECT_NEAR(LogWeight::from_double(-4.0).abs_pow(0.5).to_double(), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(LogWeight::zero().abs_pow(0.0).to_double(), 1.0);
  EXPECT_TRUE(LogWeight::zero().abs_pow(2.0).is_zero());
}

TEST(Factorials, SmallValuesExact) {
  for (int n = 0; n <= 20; ++n) {
    EXPECT_NEAR(log_factorial(n), std::log(exact_factorial(n)), 1e-12 * std::max(1.0, log_factorial(n)));
    for (int k = 0; k <= n; ++k) {
      EXPECT_NEAR(std::exp(log_binomial(n, k)), exact_factorial(n) / exact_factorial(k) / exact_factorial(n - k),
                  1e-9 * exact_factorial(n));
    }
  }
  EXPECT_EQ(log_binomial(5, 6), -kInf);
  EXPECT_EQ(log_binomial(5, -1), -kInf);
  EXPECT_THROW(log_factorial(-1), InvalidArgument);
}

TEST(Factorials, Multinomial) {
  const std::int64_t c[] = {2, 1, 3};
  EXPECT_NEAR(std::exp(log_multinomial(c)), 60.0, 1e-10);
  const std::int64_t bad[] = {1, -1};
  EXPECT_THROW(log_multinomial(bad), InvalidArgument);
}

TEST(LogSumExp, ShiftsAndEdgeCases) {
  const double xs[] = {1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(xs), 1000.0 + std::log(2.0), 1e-12);
  const double ys[] = {-kInf, 0.0};
  EXPECT_NEAR(log_sum_exp(ys), 0.0, 1e-15);
  EXPECT_EQ(log_sum_exp(std::span<const double>{}), -kInf);
}

TEST(EntropyFromLogs, MatchesDirect) {
  const std::vector<double> p = {0.5, 0.25, 0.125, 0.125};
  std::vector<double> logs;
  for (double x : p) logs.push_back(std::log(x) + 7.0);  // unnormalized
  logs.push_back(-kInf);
  EXPECT_NEAR(entropy_bits_from_logs(logs), 1.75, 1e-14);
}

TEST(Kahan, RecoversSmallTerms) {
  KahanSum s;
  s.add(1.0);
  for (int i = 0; i < 1000000; ++i) s.add(1e-16);
  EXPECT_NEAR(s.value(), 1.0 + 1e-10, 1e-15);
}

TEST(ProbabilityTable, ChecksTotal) {
  EXPECT_THROW(ProbabilityTable::from_doubles({{0}, {1}}, {0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(ProbabilityTable::from_doubles({{0}}, {-1.0}), InvalidArgument);
  const auto t = ProbabilityTable::from_doubles({{0}, {1}}, {0.5, 0.5 - 1e-11});
  EXPECT_NEAR(t.normalized().total(), 1.0, 1e-15);
  EXPECT_EQ(t.find({1}), 1u);
  EXPECT_EQ(t.find({7}), 2u);
}

TEST(ProbabilityTable, Uniform) {
  const auto u = ProbabilityTable::uniform(4);
  EXPECT_EQ(u.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(u.probability(i), 0.25, 1e-16);
}

TEST(Units, BitsAndNats) {
  EXPECT_NEAR(nats_to_bits(std::log(8.0)), 3.0, 1e-15);
  EXPECT_NEAR(bits_to_nats(1.0), std::log(2.0), 1e-16);
}
