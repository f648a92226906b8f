// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "zbtest/errors.hpp"
#include "zbtest/numerics.hpp"
#include "zbtest/zerobias.hpp"

namespace nm = zbtest::numerics;
namespace zb = zbtest::zerobias;

namespace {

zb::DistributionModel normal_model() {
  zb::DistributionModel m;
  m.name = "normal";
  m.density = [](double x) { return nm::std_normal_pdf(x); };
  m.cdf = [](double x) { return nm::std_normal_cdf(x); };
  return m;
}

zb::DistributionModel uniform_model() {
  const double r = std::sqrt(3.0);
  zb::DistributionModel m;
  m.name = "uniform";
  m.density = [r](double x) {
    return (x >= -r && x <= r) ? 1.0 / (2.0 * r) : 0.0;
  };
  m.cdf = [r](double x) {
    return std::clamp((x + r) / (2.0 * r), 0.0, 1.0);
  };
  m.support_lo = -r;
  m.support_hi = r;
  return m;
}

double uniform_zb_cdf(double t) {
  const double r = std::sqrt(3.0);
  if (t <= -r) return 0.0;
  if (t >= r) return 1.0;
  return -t * t * t / (12.0 * r) + (r / 4.0) * t + 0.5;
}

double uniform_zb_density(double t) {
  const double r = std::sqrt(3.0);
  if (t <= -r || t >= r) return 0.0;
  return (3.0 - t * t) / (4.0 * r);
}

}  // namespace

TEST_SUITE("zerobias") {

TEST_CASE("the standard normal is the fixed point") {
  const auto m = normal_model();
  for (double t : {-3.0, -1.2, 0.0, 0.4, 1.0, 2.5}) {
    CHECK(zb::zero_bias_cdf(m, t) ==
          doctest::Approx(nm::std_normal_cdf(t)).epsilon(1e-9));
    CHECK(zb::zero_bias_density(m, t) ==
          doctest::Approx(nm::std_normal_pdf(t)).epsilon(1e-8));
  }
}

TEST_CASE("uniform transform has the closed form") {
  const auto m = uniform_model();
  for (double t : {-1.5, -0.5, 0.0, 0.3, 1.0, 1.6}) {
    CHECK(zb::zero_bias_cdf(m, t) ==
          doctest::Approx(uniform_zb_cdf(t)).epsilon(1e-10));
    CHECK(zb::zero_bias_density(m, t) ==
          doctest::Approx(uniform_zb_density(t)).epsilon(1e-10));
  }
  // outside the support the transform saturates
  CHECK(zb::zero_bias_cdf(m, -5.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zb::zero_bias_cdf(m, 5.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(zb::zero_bias_density(m, 5.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cached law matches direct evaluation") {
  const auto mu = uniform_model();
  const auto lu = zb::zero_bias_law(mu, 1.0);
  for (double t = -1.7; t <= 1.7; t += 0.1) {
    CHECK(lu.cdf(t) == doctest::Approx(uniform_zb_cdf(t)).epsilon(1e-8));
    CHECK(lu.density(t) == doctest::Approx(uniform_zb_density(t)).epsilon(1e-8));
  }
  CHECK(lu.cdf(-10.0) == doctest::Approx(0.0));
  CHECK(lu.cdf(10.0) == doctest::Approx(1.0));

  const auto mn = normal_model();
  const auto ln = zb::zero_bias_law(mn, 1.0);
  for (double t = -4.0; t <= 4.0; t += 0.25) {
    CHECK(ln.cdf(t) == doctest::Approx(nm::std_normal_cdf(t)).epsilon(1e-7));
    CHECK(ln.density(t) ==
          doctest::Approx(nm::std_normal_pdf(t)).epsilon(1e-6));
  }
}

TEST_CASE("law cdf is monotone and bounded") {
  const auto law = zb::zero_bias_law(uniform_model(), 1.0);
  double prev = -1.0;
  for (double t = -3.0; t <= 3.0; t += 0.01) {
    const double v = law.cdf(t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v >= prev - 1e-12);
    CHECK(law.density(t) >= 0.0);
    prev = v;
  }
}

TEST_CASE("standardize produces a unit law") {
  // start from N(3, 4)
  zb::DistributionModel m;
  m.name = "shifted";
  m.density = [](double x) { return nm::std_normal_pdf((x - 3.0) / 2.0) / 2.0; };
  m.cdf = [](double x) { return nm::std_normal_cdf((x - 3.0) / 2.0); };
  m.mean = 3.0;
  m.variance = 4.0;
  const auto s = zb::standardize(m);
  CHECK(s.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  const auto diag = zb::model_diagnostics(s);
  CHECK(diag.mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(diag.variance == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(diag.warnings.empty());

  zb::DistributionModel bad = m;
  bad.variance = 0.0;
  CHECK_THROWS_AS((void)zb::standardize(bad), zbtest::InvalidModelError);
}

TEST_CASE("diagnostics flag inconsistent declarations") {
  zb::DistributionModel m;
  m.name = "mislabeled";
  m.density = [](double x) { return nm::std_normal_pdf(x - 0.5); };
  m.cdf = [](double x) { return nm::std_normal_cdf(x - 0.5); };
  m.mean = 0.0;  // actually 0.5
  m.variance = 1.0;
  const auto diag = zb::model_diagnostics(m);
  CHECK(diag.mean == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(!diag.warnings.empty());
}

TEST_CASE("diagnostics accept a coherent model") {
  const auto diag = zb::model_diagnostics(normal_model());
  CHECK(diag.mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(diag.variance == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(diag.max_cdf_density_mismatch < 1e-5);
  CHECK(diag.warnings.empty());
}

TEST_CASE("empirical transform on a two point sample") {
  Eigen::VectorXd x(2);
  x << -1.0, 1.0;
  CHECK(zb::empirical_zero_bias_cdf(x, -2.0) == doctest::Approx(0.0));
  CHECK(zb::empirical_zero_bias_cdf(x, -1.0) == doctest::Approx(0.0));
  CHECK(zb::empirical_zero_bias_cdf(x, 0.0) == doctest::Approx(0.5));
  CHECK(zb::empirical_zero_bias_cdf(x, 0.5) == doctest::Approx(0.75));
  CHECK(zb::empirical_zero_bias_cdf(x, 1.0) == doctest::Approx(1.0));
  CHECK(zb::empirical_zero_bias_cdf(x, 4.0) == doctest::Approx(1.0));

  // location/scale of the raw data does not matter: residuals are scaled
  Eigen::VectorXd y(2);
  y << 10.0, 30.0;
  CHECK(zb::empirical_zero_bias_cdf(y, 0.5) == doctest::Approx(0.75));

  Eigen::VectorXd one(1);
  one << 0.3;
  CHECK_THROWS_AS((void)zb::empirical_zero_bias_cdf(one, 0.0),
                  zbtest::TooSmallSampleError);
}

TEST_CASE("empirical transform converges to the population transform") {
  // deterministic uniform grid sample standing in for U(-sqrt3, sqrt3)
  const int n = 4000;
  const double r = std::sqrt(3.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -r + 2.0 * r * (i + 0.5) / n;
  }
  for (double s : {-1.0, 0.0, 0.7, 1.3}) {
    CHECK(zb::empirical_zero_bias_cdf(x, s) ==
          doctest::Approx(uniform_zb_cdf(s)).epsilon(5e-3));
  }
}

}  // TEST_SUITE
