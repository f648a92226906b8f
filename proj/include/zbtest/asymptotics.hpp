// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_ASYMPTOTICS_HPP
#define ZBTEST_ASYMPTOTICS_HPP

#include <Eigen/Core>

#include "zbtest/random.hpp"
#include "zbtest/zerobias.hpp"

namespace zbtest::asymptotics {

// Covariance kernel of the limiting Gaussian process of the statistic
// family k (1 or 2) under the null, in closed form from standard normal
// partial moments.  Symmetric in (s, t).
double kernel(int k, double s, double t);

// Gram matrix [kernel(k, s_i, s_j) * sqrt(w_a(s_i) w_a(s_j))].  Throws
// std::invalid_argument on duplicate grid points or k outside {1, 2}.
Eigen::MatrixXd kernel_gram(int k, const Eigen::Ref<const Eigen::VectorXd>& grid,
                            double a = 1.0);

// Eigenvalues (descending) of the weighted-kernel integral operator
// discretized on `grid` with trapezoid quadrature weights.  Stable under
// grid refinement, unlike the raw Gram spectrum.
Eigen::VectorXd discretized_eigenvalues(
    int k, const Eigen::Ref<const Eigen::VectorXd>& grid, double a = 1.0);

// Weighted squared distance Delta_k = int g^2 w_a with g the difference
// between the transformed-law CDF and its comparison CDF (the model CDF
// for k = 1, the standard normal CDF for k = 2).  Nonnegative; zero
// exactly when the standardized model is the fixed point.
double delta(int k, const zerobias::DistributionModel& model,
             const zerobias::ZeroBiasLaw& law, double a,
             const numerics::QuadratureConfig& cfg = {});

// Variance tau_k^2 = 4 E[<C(X, .), g>^2] of the limiting normal law of
// the statistic under a fixed alternative, by Monte Carlo over draws X
// from the model; each draw uses its own substream of `stream`, so the
// estimate is independent of worker count.  Returns {estimate, MC standard
// error}.  Throws IllPosedError when Delta_k is numerically zero (the
// scaling limit does not exist at the fixed point).
std::pair<double, double> tau_squared(int k,
                                      const zerobias::DistributionModel& model,
                                      const zerobias::ZeroBiasLaw& law,
                                      double a, long replications,
                                      const RandomStream& stream,
                                      const numerics::QuadratureConfig& cfg = {});

struct FixedAlternativeSummary {
  double delta = 0.0;
  double tau_squared = 0.0;
  long mc_replications = 0;
  double mc_std_error = 0.0;
};

// Builds the transformed law for the standardized model and evaluates both
// fixed-alternative quantities.  Throws IllPosedError when delta is
// numerically zero (then tau^2 has no meaning; report delta alone).
FixedAlternativeSummary fixed_alternative_summary(
    int k, const zerobias::DistributionModel& model, double a,
    long replications, const RandomStream& stream,
    const numerics::QuadratureConfig& cfg = {});

// First-order rejection probability of an n-sample test with critical
// value c: 1 - Phi(sqrt(n) / tau * (c / n - delta)).
double approximate_power(double delta, double tau_squared, long n,
                         double critical_value);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Asymptotic interval for delta from an observed statistic value g:
// g / n +- qn(1 - alpha / 2) * tau / sqrt(n).  alpha = 1 gives the
// degenerate point interval; alpha must lie in (0, 1].
ConfidenceInterval confidence_interval(double statistic_value, long n,
                                       double tau_squared, double alpha);

}  // namespace zbtest::asymptotics

#endif  // ZBTEST_ASYMPTOTICS_HPP
