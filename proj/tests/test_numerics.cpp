// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "zbtest/errors.hpp"
#include "zbtest/numerics.hpp"
#include "zbtest/random.hpp"

namespace nm = zbtest::numerics;

TEST_SUITE("numerics") {

TEST_CASE("normal density and derivatives") {
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * M_PI);
  CHECK(nm::std_normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI))
                                       .epsilon(1e-15));
  CHECK(nm::std_normal_pdf_deriv(1.0, 0) == doctest::Approx(phi1).epsilon(1e-15));
  // phi'(x) = -x phi(x), phi''(x) = (x^2-1) phi(x), phi'''(x) = (3x-x^3) phi(x)
  CHECK(nm::std_normal_pdf_deriv(1.0, 1) ==
        doctest::Approx(-phi1).epsilon(1e-14));
  CHECK(nm::std_normal_pdf_deriv(1.0, 2) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(nm::std_normal_pdf_deriv(1.0, 3) ==
        doctest::Approx(2.0 * phi1).epsilon(1e-14));
  CHECK(nm::std_normal_pdf_deriv(0.5, 2) ==
        doctest::Approx((0.25 - 1.0) * nm::std_normal_pdf(0.5)).epsilon(1e-14));
}

TEST_CASE("normal cdf and quantile") {
  CHECK(nm::std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(nm::std_normal_cdf(1.959963984540054) ==
        doctest::Approx(0.975).epsilon(1e-12));
  CHECK(nm::std_normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(nm::std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  // round trips over a wide probability range
  for (double p : {1e-10, 1e-4, 0.2, 0.5, 0.77, 0.9999, 1.0 - 1e-10}) {
    CHECK(nm::std_normal_cdf(nm::std_normal_quantile(p)) ==
          doctest::Approx(p).epsilon(1e-10));
  }
  CHECK_THROWS_AS((void)nm::std_normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)nm::std_normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("weight density") {
  for (double a : {0.1, 1.0, 3.0}) {
    CHECK(nm::weight_pdf(0.0, a) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * a)).epsilon(1e-15));
    CHECK(nm::weight_pdf(0.7, a) ==
          doctest::Approx(std::exp(-0.49 / (2 * a)) /
                          std::sqrt(2.0 * M_PI * a))
              .epsilon(1e-15));
  }
}

TEST_CASE("adaptive quadrature on smooth integrands") {
  auto gauss = [](double x) { return nm::std_normal_pdf(x); };
  const auto whole = nm::integrate(gauss, -std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity());
  CHECK(whole.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(whole.error_bound < 1e-8);

  const auto half = nm::integrate(gauss, 0.0, std::numeric_limits<double>::infinity());
  CHECK(half.value == doctest::Approx(0.5).epsilon(1e-12));

  auto poly = [](double x) { return x * x * x - 2.0 * x + 1.0; };
  const auto fin = nm::integrate(poly, -1.0, 2.0);
  CHECK(fin.value == doctest::Approx(15.0 / 4.0 - 3.0 + 3.0).epsilon(1e-13));
}

TEST_CASE("quadrature honors interior breakpoints") {
  // kinked integrand: |x| * phi(x); exact integral 2(phi(0)-phi(1)) on [-1,1]
  auto kink = [](double x) { return std::abs(x) * nm::std_normal_pdf(x); };
  const double exact = 2.0 * (nm::std_normal_pdf(0.0) - nm::std_normal_pdf(1.0));
  const std::vector<double> bp{0.0};
  const auto got = nm::integrate(kink, -1.0, 1.0, {}, bp);
  CHECK(got.value == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("quadrature failure carries its best estimate") {
  nm::QuadratureConfig tight;
  tight.abs_tol = 1e-16;
  tight.rel_tol = 1e-16;
  tight.max_subdivisions = 4;
  auto rough = [](double x) { return std::sqrt(std::abs(std::sin(40.0 * x))); };
  try {
    (void)nm::integrate(rough, 0.0, 3.0, tight);
    FAIL("expected QuadratureFailureError");
  } catch (const zbtest::QuadratureFailureError& e) {
    CHECK(std::isfinite(e.best_estimate));
    CHECK(e.error_bound > 0.0);
  }
}

TEST_CASE("squared normal cdf weight integral") {
  CHECK(nm::phi_sq_weight_integral(1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(nm::phi_sq_weight_integral(0.1) ==
        doctest::Approx(0.264488634917928).epsilon(1e-12));
  CHECK(nm::phi_sq_weight_integral(3.0) ==
        doctest::Approx(0.384973271918692).epsilon(1e-12));
  // matches direct quadrature of Phi(t)^2 w_a(t)
  for (double a : {0.25, 1.5}) {
    auto f = [a](double t) {
      const double c = nm::std_normal_cdf(t);
      return c * c * nm::weight_pdf(t, a);
    };
    const auto direct =
        nm::integrate(f, -std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity(), {}, {},
                      std::sqrt(a));
    CHECK(nm::phi_sq_weight_integral(a) ==
          doctest::Approx(direct.value).epsilon(1e-11));
  }
}

TEST_CASE("upper tail cdf weight integral") {
  CHECK(nm::upper_phi_weight_integral(0.0, 1.0) ==
        doctest::Approx(0.375).epsilon(1e-12));
  CHECK(nm::upper_phi_weight_integral(-0.7, 0.5) ==
        doctest::Approx(0.475373810840760).epsilon(1e-11));
}

TEST_CASE("regularized incomplete functions") {
  // P(1, x) = 1 - exp(-x)
  CHECK(nm::regularized_gamma_p(1.0, 2.0) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
  // P(1/2, x) relates to the normal cdf
  CHECK(nm::regularized_gamma_p(0.5, 0.5) ==
        doctest::Approx(2.0 * nm::std_normal_cdf(1.0) - 1.0).epsilon(1e-12));
  // I_x(1, b) = 1 - (1-x)^b
  CHECK(nm::regularized_beta(1.0, 3.0, 0.25) ==
        doctest::Approx(1.0 - std::pow(0.75, 3.0)).epsilon(1e-12));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  CHECK(nm::regularized_beta(2.5, 1.5, 0.3) ==
        doctest::Approx(1.0 - nm::regularized_beta(1.5, 2.5, 0.7))
            .epsilon(1e-12));
}

TEST_CASE("random streams are content addressed") {
  zbtest::RandomStream root(42);
  zbtest::RandomStream a = root.child(7);
  zbtest::RandomStream b = root.child(7);
  zbtest::RandomStream c = root.child(8);
  auto a1 = a.u64();
  CHECK(a1 == b.u64());
  CHECK(a1 != c.u64());

  // child streams are independent of draws already made on the parent
  zbtest::RandomStream p(99);
  zbtest::RandomStream q(99);
  (void)p.u64();
  (void)p.u64();
  CHECK(p.child(3).u64() == q.child(3).u64());
}

TEST_CASE("unit variates lie strictly inside (0,1)") {
  zbtest::RandomStream s(2026);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.unit();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("uniform range draws") {
  zbtest::RandomStream s(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = s.uniform(-2.0, 5.0);
    CHECK(v > -2.0);
    CHECK(v < 5.0);
  }
}

}  // TEST_SUITE
