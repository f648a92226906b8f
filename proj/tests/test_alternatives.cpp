// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zbtest/alternatives.hpp"
#include "zbtest/numerics.hpp"
#include "zbtest/random.hpp"
#include "zbtest/statistics.hpp"
#include "zbtest/zerobias.hpp"

namespace al = zbtest::alternatives;
namespace nm = zbtest::numerics;

TEST_SUITE("alternatives") {

TEST_CASE("specs parse and format round trip") {
  for (const char* name :
       {"normal(0,1)", "mixn(0.3,1,0.25)", "t(3)", "t(5)", "t(10)", "uniform",
        "chisq(5)", "chisq(15)", "beta(1,4)", "beta(2,5)", "gamma(1,5)",
        "gamma(5,1)", "gumbel(1,2)", "lognormal(0,1)", "weibull(1,0.5)"}) {
    const auto spec = al::parse_alternative(name);
    CHECK(al::format_alternative(spec) == name);
    // reparsing the formatted name gives the same spec
    const auto again = al::parse_alternative(al::format_alternative(spec));
    CHECK(again.family == spec.family);
    CHECK(again.params == spec.params);
  }
  // whitespace and case are tolerated
  CHECK(al::format_alternative(al::parse_alternative(" ChiSq( 5 ) ")) ==
        "chisq(5)");
}

TEST_CASE("unknown alternatives list the catalog") {
  for (const char* bad : {"cauchy(1)", "t(2)", "mixn(1.5,0,1)", "beta(0,1)",
                          "weibull(1,0)", "normal(0,0)", "uniform(1)",
                          "chisq(-3)", "t()", "gamma(1)"}) {
    try {
      (void)al::parse_alternative(bad);
      FAIL("expected a parse failure for ", bad);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("known alternatives") !=
            std::string::npos);
    }
  }
}

TEST_CASE("catalog is complete and parseable") {
  const auto names = al::catalog_names();
  CHECK(names.size() == 15);
  CHECK(std::find(names.begin(), names.end(), "chisq(5)") != names.end());
  CHECK(std::find(names.begin(), names.end(), "uniform") != names.end());
  for (const auto& name : names) {
    (void)al::parse_alternative(name);  // must not throw
  }
}

TEST_CASE("sample moments match declared moments") {
  const int n = 100000;
  for (const auto& name : al::catalog_names()) {
    CAPTURE(name);
    const auto spec = al::parse_alternative(name);
    const double m = al::alt_mean(spec);
    const double v = al::alt_variance(spec);
    zbtest::RandomStream stream(515);
    const auto x = al::sample(spec, stream, n);
    const double mean_hat = x.mean();
    const double var_hat =
        (x.array() - mean_hat).square().sum() / static_cast<double>(n - 1);
    CHECK(std::abs(mean_hat - m) < 0.06 * std::max(1.0, std::sqrt(v)));
    if (name == "t(3)") continue;  // fourth moment diverges
    const double rel_tol = name == "weibull(1,0.5)" ? 0.25 : 0.12;
    CHECK(std::abs(var_hat - v) / v < rel_tol);
  }
}

TEST_CASE("samples follow the declared cdf") {
  const int n = 100000;
  for (const auto& name : al::catalog_names()) {
    CAPTURE(name);
    const auto spec = al::parse_alternative(name);
    zbtest::RandomStream stream(616);
    auto x = al::sample(spec, stream, n);
    std::sort(x.data(), x.data() + n);
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = al::alt_cdf(spec, x[i]);
      ks = std::max(ks, std::abs(f - (i + 1.0) / n));
      ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    }
    CHECK(ks < 0.01);
  }
}

TEST_CASE("density is the derivative of the cdf") {
  for (const auto& name : al::catalog_names()) {
    CAPTURE(name);
    const auto spec = al::parse_alternative(name);
    const double m = al::alt_mean(spec);
    const double sd = std::sqrt(al::alt_variance(spec));
    const double h = 1e-5;
    for (double c : {-0.5, 0.0, 0.8}) {
      const double x = m + c * sd;
      const double p = al::alt_density(spec, x);
      if (p < 1e-8) continue;  // outside or at the edge of the support
      const double slope =
          (al::alt_cdf(spec, x + h) - al::alt_cdf(spec, x - h)) / (2.0 * h);
      CHECK(slope == doctest::Approx(p).epsilon(1e-4));
    }
  }
}

TEST_CASE("sampling is reproducible from the stream state") {
  const auto spec = al::parse_alternative("gamma(5,1)");
  zbtest::RandomStream a(9);
  zbtest::RandomStream b(9);
  const auto xa = al::sample(spec, a, 64);
  const auto xb = al::sample(spec, b, 64);
  CHECK(xa == xb);
}

TEST_CASE("scale families standardize identically") {
  // gamma(1,5) is gamma(1,1) scaled by 5; residual based statistics agree
  const auto g1 = al::parse_alternative("gamma(1,1)");
  const auto g5 = al::parse_alternative("gamma(1,5)");
  zbtest::RandomStream a(12);
  zbtest::RandomStream b(12);
  const auto xa = al::sample(g1, a, 50);
  const auto xb = al::sample(g5, b, 50);
  for (int i = 0; i < 50; ++i) {
    CHECK(xb[i] == doctest::Approx(5.0 * xa[i]).epsilon(1e-12));
  }
  const auto ra = zbtest::statistics::scaled_residuals(xa);
  const auto rb = zbtest::statistics::scaled_residuals(xb);
  CHECK(zbtest::statistics::g2_closed_form(ra, {1.0}) ==
        doctest::Approx(zbtest::statistics::g2_closed_form(rb, {1.0}))
            .epsilon(1e-11));
}

TEST_CASE("specs convert to coherent standardized models") {
  for (const char* name : {"uniform", "chisq(5)", "beta(2,5)"}) {
    CAPTURE(name);
    const auto spec = al::parse_alternative(name);
    const auto model = zbtest::zerobias::standardize(al::to_model(spec));
    const auto diag = zbtest::zerobias::model_diagnostics(model);
    CHECK(diag.mean == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(diag.variance == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(diag.warnings.empty());
  }
  const auto u = al::to_model(al::parse_alternative("uniform"));
  CHECK(u.support_lo == doctest::Approx(-std::sqrt(3.0)));
  CHECK(u.support_hi == doctest::Approx(std::sqrt(3.0)));
  const auto c = al::to_model(al::parse_alternative("chisq(5)"));
  CHECK(c.support_lo == doctest::Approx(0.0));
  CHECK(std::isinf(c.support_hi));
}

}  // TEST_SUITE
