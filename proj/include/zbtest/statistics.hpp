// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_STATISTICS_HPP
#define ZBTEST_STATISTICS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "zbtest/numerics.hpp"
#include "zbtest/tables.hpp"

namespace zbtest::statistics {

// Scaled residuals y_j = (x_j - mean) / s_n with s_n^2 the 1/n-variance,
// sorted ascending.  Invariants: sum y_j = 0 (up to rounding) and
// (1/n) sum y_j^2 = 1.
struct ScaledResiduals {
  Eigen::VectorXd values;
  Eigen::Index n() const { return values.size(); }
};

// Variance a > 0 of the centred normal weight density the test statistics
// integrate against.
struct TuningParameter {
  double a = 1.0;
};

// Throws TooSmallSampleError for n < 2, DegenerateSampleError when the
// sample variance is zero, std::invalid_argument on non-finite entries.
ScaledResiduals scaled_residuals(const Eigen::Ref<const Eigen::VectorXd>& sample);

// Statistic n * int (Fhat - Fn)^2 w_a dt, where Fhat is the plug-in
// transformed-law CDF of the residuals, Fn their empirical CDF, and w_a
// the centred normal weight with variance a.  Direct quadrature with the
// residuals as subdivision points; the reference implementation.
double g1_quadrature(const ScaledResiduals& residuals, TuningParameter tuning,
                     const numerics::QuadratureConfig& cfg = {});

// Statistic n * int (Fhat - Phi)^2 w_a dt against the standard normal CDF.
double g1_closed_form(const ScaledResiduals& residuals, TuningParameter tuning);

double g2_quadrature(const ScaledResiduals& residuals, TuningParameter tuning,
                     const numerics::QuadratureConfig& cfg = {});

// Closed forms: O(n log n) prefix-sum evaluation, equal to the quadrature
// versions up to quadrature tolerance.  g2 needs short quadrature segments
// for the upper tail integrals of Phi against the weight.
double g2_closed_form(const ScaledResiduals& residuals, TuningParameter tuning,
                      const numerics::QuadratureConfig& cfg = {});

// Evaluate any supported statistic on the residuals (g1/g2: tuning is a;
// bhep/hjg: tuning is beta; bcmr: tuning ignored).  bcmr is evaluated on
// the residuals directly, which equals its value on the raw sample by
// affine invariance.
double evaluate_statistic(StatisticKind kind, const ScaledResiduals& residuals,
                          double tuning,
                          const numerics::QuadratureConfig& cfg = {});

struct TestReport {
  StatisticKind kind = StatisticKind::G2;
  double tuning = 1.0;
  Eigen::Index n = 0;
  double value = 0.0;
  double alpha = 0.05;
  double critical_value = 0.0;
  bool reject = false;
  std::optional<double> p_value;  // filled only when a null MC was requested
  long table_replications = 0;    // provenance of the critical value
  std::uint64_t table_seed = 0;
};

// Decision rule: reject normality iff value > critical value from the
// table cell (kind, tuning, n, alpha).  Throws on invalid alpha, sample
// errors from scaled_residuals, and MissingCriticalValueError when the
// table has no matching cell.
TestReport run_test(const Eigen::Ref<const Eigen::VectorXd>& sample,
                    StatisticKind kind, TuningParameter tuning, double alpha,
                    const CriticalValueTable& table,
                    const numerics::QuadratureConfig& cfg = {});

}  // namespace zbtest::statistics

#endif  // ZBTEST_STATISTICS_HPP
