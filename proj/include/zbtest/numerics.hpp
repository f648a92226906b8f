// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_NUMERICS_HPP
#define ZBTEST_NUMERICS_HPP

#include <functional>
#include <span>

namespace zbtest::numerics {

// Tolerances and truncation policy for adaptive quadrature.
// Integrals over infinite intervals are truncated to a radius
// R = truncation_radius_multiplier * gaussian_sd + max(|breakpoints|);
// the discarded tail is bounded analytically (see integrate).
struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double truncation_radius_multiplier = 10.0;
  int max_subdivisions = 2000;
};

struct IntegrationResult {
  double value = 0.0;
  double error_bound = 0.0;  // accumulated panel estimates + tail bound
  int segments = 0;          // panels in the final subdivision
};

// Standard normal density derivative of the given order:
// order 0 -> phi(x), 1 -> -x phi(x), 2 -> (x^2-1) phi(x), 3 -> (3x-x^3) phi(x).
// Throws std::invalid_argument for order outside {0,1,2,3}.
double std_normal_pdf_deriv(double x, int order);

inline double std_normal_pdf(double x) { return std_normal_pdf_deriv(x, 0); }

// Phi(x) through the complementary error function; relative error
// a few ulp on |x| <= 8.  Accepts +-infinity; throws on NaN.
double std_normal_cdf(double x);

// Inverse of std_normal_cdf on (0,1), accurate to ~1e-15 relative.
// Throws std::invalid_argument outside (0,1).
double std_normal_quantile(double p);

// Centred normal density with variance a.
double weight_pdf(double t, double a);

// Adaptive Gauss-Kronrod 7-15 integration of f over [lo, hi] where either
// endpoint may be infinite.  Infinite ends are truncated at radius
// R = cfg.truncation_radius_multiplier * gaussian_sd + max|breakpoints|,
// and the discarded tail is bounded by a quartic-times-Gaussian envelope
// calibrated at the truncation points; the bound is added to error_bound.
// `breakpoints` lists interior kink locations that seed the subdivision.
// Throws QuadratureFailureError when the tolerance is unreachable within
// cfg.max_subdivisions extra splits.
IntegrationResult integrate(const std::function<double(double)>& f, double lo,
                            double hi, const QuadratureConfig& cfg = {},
                            std::span<const double> breakpoints = {},
                            double gaussian_sd = 1.0);

// Integral of Phi(t)^2 * weight_pdf(t, a) over the real line, in closed
// form: 1/4 + arcsin(a/(1+a)) / (2 pi).  Throws for a <= 0.
double phi_sq_weight_integral(double a);

// Integral of Phi(t) * weight_pdf(t, a) over [y, infinity), by quadrature.
// Nonincreasing in y, value in [0, 1/2].  Throws for a <= 0.
double upper_phi_weight_integral(double y, double a,
                                 const QuadratureConfig& cfg = {});

// Regularized lower incomplete gamma P(a, x) and regularized incomplete
// beta I_x(a, b); double-precision utility routines for the distribution
// catalog.
double regularized_gamma_p(double a, double x);
double regularized_beta(double a, double b, double x);

}  // namespace zbtest::numerics

#endif  // ZBTEST_NUMERICS_HPP
