// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_COMPETITORS_HPP
#define ZBTEST_COMPETITORS_HPP

#include "zbtest/numerics.hpp"
#include "zbtest/statistics.hpp"

namespace zbtest::competitors {

// Weighted empirical characteristic function statistic
//   (1/n) sum_jk exp(-b^2 (y_j - y_k)^2 / 2)
//   - (2 / sqrt(1 + b^2)) sum_j exp(-b^2 y_j^2 / (2 (1 + b^2)))
//   + n / sqrt(1 + 2 b^2),  b = beta > 0.
double bhep(const statistics::ScaledResiduals& residuals, double beta = 1.0);

// Weighted empirical moment generating function statistic
//   (1 / (n sqrt(b))) sum_jk exp((y_j + y_k)^2 / (4 b))
//   - (2 / sqrt(b - 1/2)) sum_j exp(y_j^2 / (4 b - 2))
//   + n / sqrt(b - 1),  b = beta > 2.
double hjg(const statistics::ScaledResiduals& residuals, double beta);

// Correlation-type statistic
//   n (1 - (sum_k y_(k) c_k)^2) - corr_n,
// with c_k the integral of the standard normal quantile function over
// ((k-1)/n, k/n] and corr_n = int_{1/(n+1)}^{n/(n+1)} t (1-t) / phi(qn(t))^2 dt.
// Affine invariant, so evaluating on scaled residuals (1/n-variance) equals
// evaluating on the raw sample.  corr_n is memoized per n.
double bcmr(const statistics::ScaledResiduals& residuals,
            const numerics::QuadratureConfig& cfg = {});

}  // namespace zbtest::competitors

#endif  // ZBTEST_COMPETITORS_HPP
