// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_ZEROBIAS_HPP
#define ZBTEST_ZEROBIAS_HPP

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "zbtest/numerics.hpp"

namespace zbtest::zerobias {

// Continuous law given by density and CDF on an interval support.
// Operations below require a standardized model (mean 0, variance 1);
// use standardize() to get one.
struct DistributionModel {
  std::string name;
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  double mean = 0.0;
  double variance = 1.0;
};

// Numeric probe report for a model: moment checks by quadrature,
// CDF/density consistency, and boundedness warnings for x*p(x) and p'(x)
// (warnings only; user-supplied densities cannot be verified symbolically).
struct ModelDiagnostics {
  double mean = 0.0;
  double variance = 0.0;
  double max_cdf_density_mismatch = 0.0;
  std::vector<std::string> warnings;
};

// The transformed law: density d(t) = E[X 1{X > t}] and CDF
// F*(t) = E[X (X - t) 1{X <= t}] of the source model, with both functions
// served from an eagerly built grid cache (cubic Hermite with analytic
// slopes) so that downstream integrals can evaluate them cheaply.
// The cache covers [grid_lo, grid_hi]; outside it the functions clamp to
// the edge values, which is exact for compactly supported sources.
struct ZeroBiasLaw {
  DistributionModel source;
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  double grid_lo = 0.0;
  double grid_hi = 0.0;
};

// Affine push-forward with mean 0, variance 1.
// Throws InvalidModelError for variance <= 0 or non-finite moments.
DistributionModel standardize(const DistributionModel& model);

// Probe-grid diagnostics; never throws for soft conditions.
ModelDiagnostics model_diagnostics(const DistributionModel& model,
                                   const numerics::QuadratureConfig& cfg = {});

// CDF of the transformed law at t, by direct quadrature of x (x - t) p(x)
// over (-inf, t].  The result is clamped to [0, 1]; the raw value is
// written to *preclamp when given.  Requires a standardized model.
double zero_bias_cdf(const DistributionModel& model, double t,
                     const numerics::QuadratureConfig& cfg = {},
                     double* preclamp = nullptr);

// Density of the transformed law at t.  Both representations
// E[X 1{X > t}] and -E[X 1{X <= t}] are evaluated; the first is returned
// (clamped at 0) and their discrepancy is written to *discrepancy when
// given.  Requires a standardized model.
double zero_bias_density(const DistributionModel& model, double t,
                         const numerics::QuadratureConfig& cfg = {},
                         double* discrepancy = nullptr);

// Eagerly built grid cache of the transformed law over the window
// [max(support_lo, -W), min(support_hi, W)] with
// W = cfg.truncation_radius_multiplier * weight_sd_hint + 6.
// weight_sd_hint should be the standard deviation sqrt(a) of the weight
// density the law will be integrated against.
ZeroBiasLaw zero_bias_law(const DistributionModel& model,
                          double weight_sd_hint = 1.0,
                          const numerics::QuadratureConfig& cfg = {},
                          int grid_segments = 4096);

// Plug-in estimate of the transformed CDF from a sample: with scaled
// residuals y_j = (x_j - mean) / s_n (s_n^2 the 1/n-variance), returns
// (1/n) sum_j y_j (y_j - s) 1{y_j <= s}.  Exact finite sum; continuous
// and nondecreasing in s.
// Throws TooSmallSampleError for n < 2, DegenerateSampleError for s_n = 0.
double empirical_zero_bias_cdf(const Eigen::Ref<const Eigen::VectorXd>& sample,
                               double s);

}  // namespace zbtest::zerobias

#endif  // ZBTEST_ZEROBIAS_HPP
