#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "robust_t/experiments.hpp"
#include "robust_t/statistics.hpp"

using namespace robust_t;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("worked statistic values") {
  // sqrt(10/pi) * Phi^{-1}(3/4) * 3 / 1
  CHECK_THAT(t_a({1, 2, 3, 4, 5}, 0.0), WithinRel(3.610120288268063, 1e-14));
  // sqrt(18/pi) * Phi^{-1}(3/4) * 2 / 1, strict pairs
  CHECK_THAT(t_b({1, 2, 3}, 0.0), WithinRel(3.228989748607410, 1e-14));
  // mean 3, S = sqrt(2.5)
  CHECK_THAT(student_t({1, 2, 3, 4, 5}, 0.0), WithinRel(3.0 / std::sqrt(2.5 / 5.0), 1e-14));
}

TEST_CASE("butterfat statistics at mu = 500") {
  const Sample s(butterfat_data());
  CHECK_THAT(student_t(s, 500.0), WithinRel(7.5 / (89.75082465535228 / std::sqrt(20.0)), 1e-12));
  CHECK_THAT(t_a(s, 500.0), WithinRel(NormalConstants::scale_ta(20) * 7.5 / 58.5, 1e-14));
  CHECK_THAT(t_b(s, 500.0), WithinRel(NormalConstants::scale_tb(20) * 9.0 / 89.0, 1e-14));
  CHECK_THAT(t_b(s, 500.0, PairIndexConvention::Inclusive), WithinRel(NormalConstants::scale_tb(20) * 9.0 / 81.5, 1e-14));
}

TEST_CASE("zero scale is reported, never returned as infinity") {
  for (const auto& kind : {StatisticKind::ta(), StatisticKind::tb(), StatisticKind::student()}) {
    try {
      evaluate(kind, Sample{2.0, 2.0, 2.0, 2.0}, 0.0);
      FAIL("expected ZeroScale");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroScale);
    }
  }
  // More than half the values tied: MAD is zero though the sample is not constant.
  CHECK_THROWS_AS(t_a({1, 1, 1, 5, 9}, 0.0), Error);
  CHECK_THROWS_AS(student_t({0.1, 0.1, 0.1}, 0.0), Error);
}

TEST_CASE("statistics need two observations") {
  for (const auto& kind : {StatisticKind::ta(), StatisticKind::tb(), StatisticKind::student()}) {
    try {
      evaluate(kind, Sample{1.0}, 0.0);
      FAIL("expected SampleTooSmall");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SampleTooSmall);
    }
  }
}

TEST_CASE("statistics are pivotal under affine maps", "[property]") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> a_dist(0.05, 50.0), b_dist(-1000.0, 1000.0);
  const StatisticKind kinds[] = {StatisticKind::ta(), StatisticKind::tb(),
                                 StatisticKind::tb(PairIndexConvention::Inclusive), StatisticKind::student()};
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::normal_distribution<double> nd;
    std::vector<double> x(4 + trial % 40);
    for (auto& v : x) v = nd(gen);
    const double a = a_dist(gen), b = b_dist(gen), mu = nd(gen);
    std::vector<double> y;
    for (double v : x) y.push_back(a * v + b);
    for (const auto& k : kinds) {
      const double tx = evaluate(k, Sample(x), mu);
      const double ty = evaluate(k, Sample(y), a * mu + b);
      CHECK_THAT(ty, WithinAbs(tx, 1e-9 * std::max(1.0, std::abs(tx))));
      ++checked;
    }
  }
  CHECK(checked == 1200);
}

TEST_CASE("sign antisymmetry under reflection", "[property]") {
  std::mt19937_64 gen(18);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_sample(gen, 5 + trial % 30);
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    const double mu = 0.25;
    for (const auto& k : {StatisticKind::ta(), StatisticKind::tb(), StatisticKind::student()}) {
      detail::StatisticScratch scratch;
      const auto a = detail::try_evaluate(k, x, mu, scratch);
      const auto b = detail::try_evaluate(k, neg, -mu, scratch);
      REQUIRE(a.has_value() == b.has_value());
      if (a) CHECK_THAT(*b, WithinAbs(-*a, 1e-12 * std::max(1.0, std::abs(*a))));
    }
  }
}

TEST_CASE("statistics decrease strictly in mu", "[property]") {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = oracle::random_sample(gen, 6 + trial);
    for (const auto& k : {StatisticKind::ta(), StatisticKind::tb(), StatisticKind::student()}) {
      detail::StatisticScratch scratch;
      double prev = std::numeric_limits<double>::infinity();
      for (double mu = -5.0; mu <= 5.0; mu += 0.5) {
        const auto t = detail::try_evaluate(k, x, mu, scratch);
        if (!t) break;
        CHECK(*t < prev);
        prev = *t;
      }
    }
  }
}

TEST_CASE("statistic kind helpers") {
  CHECK(parse_statistic("ta") == Statistic::TA);
  CHECK(parse_statistic("tb") == Statistic::TB);
  CHECK(parse_statistic("student") == Statistic::Student);
  CHECK_FALSE(parse_statistic("tc").has_value());
  CHECK(StatisticKind::ta() == StatisticKind{Statistic::TA, PairIndexConvention::Inclusive});
  CHECK_FALSE(StatisticKind::tb() == StatisticKind::tb(PairIndexConvention::Inclusive));
  CHECK(display_name(StatisticKind::tb()) == "T_B");
}
