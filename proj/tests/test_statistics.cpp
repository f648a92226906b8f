// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "zbtest/errors.hpp"
#include "zbtest/numerics.hpp"
#include "zbtest/random.hpp"
#include "zbtest/statistics.hpp"
#include "zbtest/tables.hpp"

namespace st = zbtest::statistics;
namespace nm = zbtest::numerics;

namespace {

Eigen::VectorXd normal_draws(std::uint64_t seed, int n) {
  zbtest::RandomStream s(seed);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = nm::std_normal_quantile(s.unit());
  return x;
}

}  // namespace

TEST_SUITE("statistics") {

TEST_CASE("statistic names round trip") {
  using zbtest::StatisticKind;
  for (auto kind : {StatisticKind::G1, StatisticKind::G2, StatisticKind::BHEP,
                    StatisticKind::HJG, StatisticKind::BCMR}) {
    const auto name = zbtest::statistic_name(kind);
    const auto back = zbtest::parse_statistic(name);
    REQUIRE(back.has_value());
    CHECK(*back == kind);
  }
  CHECK(!zbtest::parse_statistic("nope").has_value());
  CHECK(zbtest::uses_weight_tuning(StatisticKind::G1));
  CHECK(zbtest::uses_weight_tuning(StatisticKind::G2));
  CHECK(!zbtest::uses_weight_tuning(StatisticKind::BHEP));
  CHECK(!zbtest::uses_weight_tuning(StatisticKind::BCMR));
}

TEST_CASE("scaled residuals are centered, unit scale, sorted") {
  Eigen::VectorXd x(4);
  x << 4.0, 1.0, 3.0, 2.0;
  const auto r = st::scaled_residuals(x);
  REQUIRE(r.n() == 4);
  CHECK(r.values.mean() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.values.squaredNorm() / 4.0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::is_sorted(r.values.data(), r.values.data() + 4));

  // residuals are affine invariant
  Eigen::VectorXd y = 5.0 * x.array() - 7.0;
  const auto r2 = st::scaled_residuals(y);
  for (int i = 0; i < 4; ++i) {
    CHECK(r2.values[i] == doctest::Approx(r.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("residual scaling rejects bad input") {
  Eigen::VectorXd one(1);
  one << 2.0;
  CHECK_THROWS_AS((void)st::scaled_residuals(one), zbtest::TooSmallSampleError);

  Eigen::VectorXd flat(3);
  flat << 2.0, 2.0, 2.0;
  CHECK_THROWS_AS((void)st::scaled_residuals(flat),
                  zbtest::DegenerateSampleError);

  Eigen::VectorXd nan(3);
  nan << 1.0, std::nan(""), 2.0;
  CHECK_THROWS_AS((void)st::scaled_residuals(nan), std::invalid_argument);
}

TEST_CASE("two point sample pins") {
  Eigen::VectorXd x(2);
  x << -1.0, 1.0;
  const auto r = st::scaled_residuals(x);
  CHECK(st::g1_closed_form(r, {1.0}) ==
        doctest::Approx(0.099374021549400).epsilon(1e-12));
  CHECK(st::g2_closed_form(r, {1.0}) ==
        doctest::Approx(0.012667146123089).epsilon(1e-12));
}

TEST_CASE("closed forms agree with quadrature") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto x = normal_draws(seed, 20);
    const auto r = st::scaled_residuals(x);
    for (double a : {0.1, 1.0, 3.0}) {
      const double g1c = st::g1_closed_form(r, {a});
      const double g1q = st::g1_quadrature(r, {a});
      CHECK(std::abs(g1c - g1q) / g1q < 1e-9);
      const double g2c = st::g2_closed_form(r, {a});
      const double g2q = st::g2_quadrature(r, {a});
      CHECK(std::abs(g2c - g2q) / g2q < 1e-9);
    }
  }
}

TEST_CASE("statistics are affine and permutation invariant") {
  const auto x = normal_draws(99, 30);
  Eigen::VectorXd shifted = 3.0 * x.array() + 11.0;
  Eigen::VectorXd shuffled = x;
  std::mt19937 g(5);
  std::shuffle(shuffled.data(), shuffled.data() + shuffled.size(), g);

  const auto r0 = st::scaled_residuals(x);
  const auto r1 = st::scaled_residuals(shifted);
  const auto r2 = st::scaled_residuals(shuffled);
  for (double a : {0.5, 1.0}) {
    CHECK(st::g1_closed_form(r1, {a}) ==
          doctest::Approx(st::g1_closed_form(r0, {a})).epsilon(1e-10));
    CHECK(st::g2_closed_form(r1, {a}) ==
          doctest::Approx(st::g2_closed_form(r0, {a})).epsilon(1e-10));
    CHECK(st::g1_closed_form(r2, {a}) ==
          doctest::Approx(st::g1_closed_form(r0, {a})).epsilon(1e-12));
  }
}

TEST_CASE("statistics are positive and need a positive tuning") {
  const auto r = st::scaled_residuals(normal_draws(3, 25));
  CHECK(st::g1_closed_form(r, {1.0}) > 0.0);
  CHECK(st::g2_closed_form(r, {1.0}) > 0.0);
  CHECK_THROWS_AS((void)st::g1_closed_form(r, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)st::g2_closed_form(r, {-1.0}), std::invalid_argument);
}

TEST_CASE("evaluate_statistic dispatches by kind") {
  using zbtest::StatisticKind;
  const auto r = st::scaled_residuals(normal_draws(21, 20));
  CHECK(st::evaluate_statistic(StatisticKind::G1, r, 1.0) ==
        doctest::Approx(st::g1_closed_form(r, {1.0})));
  CHECK(st::evaluate_statistic(StatisticKind::G2, r, 0.5) ==
        doctest::Approx(st::g2_closed_form(r, {0.5})));
}

TEST_CASE("table lookup is exact, never interpolates") {
  zbtest::CriticalValueTable table;
  table.upsert({zbtest::StatisticKind::G2, 1.0, 20, 0.05, 0.315, 1000, 7});
  table.upsert({zbtest::StatisticKind::G2, 1.0, 50, 0.05, 0.342, 1000, 7});

  const auto& hit = table.lookup(zbtest::StatisticKind::G2, 1.0, 20, 0.05);
  CHECK(hit.quantile == doctest::Approx(0.315));

  CHECK_THROWS_AS(
      (void)table.lookup(zbtest::StatisticKind::G2, 1.0, 21, 0.05),
      zbtest::MissingCriticalValueError);
  CHECK_THROWS_AS(
      (void)table.lookup(zbtest::StatisticKind::G2, 2.0, 20, 0.05),
      zbtest::MissingCriticalValueError);
  CHECK_THROWS_AS(
      (void)table.lookup(zbtest::StatisticKind::G1, 1.0, 20, 0.05),
      zbtest::MissingCriticalValueError);
  try {
    (void)table.lookup(zbtest::StatisticKind::G2, 1.0, 21, 0.05);
    FAIL("expected a miss");
  } catch (const zbtest::MissingCriticalValueError& e) {
    CHECK(e.nearest_n == 20);
    CHECK(std::string(e.what()).find("nearest") != std::string::npos);
  }
}

TEST_CASE("upsert replaces matching cells") {
  zbtest::CriticalValueTable table;
  table.upsert({zbtest::StatisticKind::G1, 1.0, 20, 0.05, 0.6, 100, 1});
  table.upsert({zbtest::StatisticKind::G1, 1.0, 20, 0.05, 0.7, 200, 2});
  CHECK(table.entries.size() == 1);
  CHECK(table.lookup(zbtest::StatisticKind::G1, 1.0, 20, 0.05).quantile ==
        doctest::Approx(0.7));
  CHECK(table.lookup(zbtest::StatisticKind::G1, 1.0, 20, 0.05).replications ==
        200);
}

TEST_CASE("run_test decisions follow the strict inequality") {
  Eigen::VectorXd x(2);
  x << -1.0, 1.0;  // G2(a=1) = 0.01266...
  zbtest::CriticalValueTable table;
  table.upsert({zbtest::StatisticKind::G2, 1.0, 2, 0.05, 0.5, 1000, 9});
  table.upsert({zbtest::StatisticKind::G2, 1.0, 2, 0.10, 0.01, 1000, 9});

  const auto accept = st::run_test(x, zbtest::StatisticKind::G2, {1.0}, 0.05,
                                   table);
  CHECK(!accept.reject);
  CHECK(accept.n == 2);
  CHECK(accept.value == doctest::Approx(0.012667146123089).epsilon(1e-10));
  CHECK(accept.critical_value == doctest::Approx(0.5));
  CHECK(accept.table_replications == 1000);
  CHECK(accept.table_seed == 9);
  CHECK(!accept.p_value.has_value());

  const auto reject = st::run_test(x, zbtest::StatisticKind::G2, {1.0}, 0.10,
                                   table);
  CHECK(reject.reject);

  // a value equal to the critical value is not rejected
  zbtest::CriticalValueTable eq;
  eq.upsert({zbtest::StatisticKind::G2, 1.0, 2, 0.05, accept.value, 1000, 9});
  CHECK(!st::run_test(x, zbtest::StatisticKind::G2, {1.0}, 0.05, eq).reject);

  CHECK_THROWS_AS((void)st::run_test(x, zbtest::StatisticKind::G2, {1.0},
                                     1.5, table),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)st::run_test(x, zbtest::StatisticKind::G1, {1.0},
                                     0.05, table),
                  zbtest::MissingCriticalValueError);
}

}  // TEST_SUITE
