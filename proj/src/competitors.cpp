// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include "zbtest/competitors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "zbtest/errors.hpp"

namespace zbtest::competitors {

namespace {

// corr_n = int_{1/(n+1)}^{n/(n+1)} t (1 - t) / phi(qn(t))^2 dt, evaluated
// after the substitution t = Phi(x) as int Phi(x)(1 - Phi(x)) / phi(x) dx
// over [qn(1/(n+1)), qn(n/(n+1))], which has a smooth integrand.
double bcmr_correction(int n, const numerics::QuadratureConfig& cfg) {
  static std::mutex mu;
  static std::map<int, double> store;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = store.find(n); it != store.end()) return it->second;

  const auto dn = static_cast<double>(n);
  const double lo = numerics::std_normal_quantile(1.0 / (dn + 1.0));
  const double hi = numerics::std_normal_quantile(dn / (dn + 1.0));
  auto f = [](double x) {
    const double c = numerics::std_normal_cdf(x);
    return c * (1.0 - c) / numerics::std_normal_pdf(x);
  };
  const double bp = 0.0;
  numerics::QuadratureConfig tight = cfg;
  tight.abs_tol = std::min(cfg.abs_tol, 1e-12);
  tight.rel_tol = std::min(cfg.rel_tol, 1e-12);
  const double val =
      numerics::integrate(f, lo, hi, tight, std::span<const double>(&bp, 1))
          .value;
  store.emplace(n, val);
  return val;
}

}  // namespace

double bhep(const statistics::ScaledResiduals& residuals, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("bhep: beta must be positive, got " +
                                std::to_string(beta));
  }
  const auto& y = residuals.values;
  const auto n = y.size();
  const double b2 = beta * beta;
  double s1 = static_cast<double>(n);  // zero diagonal differences
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const double d = y[j] - y[k];
      s1 += 2.0 * std::exp(-0.5 * b2 * d * d);
    }
  }
  double s2 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    s2 += std::exp(-b2 * y[j] * y[j] / (2.0 * (1.0 + b2)));
  }
  const auto dn = static_cast<double>(n);
  return s1 / dn - 2.0 / std::sqrt(1.0 + b2) * s2 +
         dn / std::sqrt(1.0 + 2.0 * b2);
}

double hjg(const statistics::ScaledResiduals& residuals, double beta) {
  if (!(beta > 2.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("hjg: beta must exceed 2, got " +
                                std::to_string(beta));
  }
  const auto& y = residuals.values;
  const auto n = y.size();
  double s1 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    s1 += std::exp(y[j] * y[j] / beta);
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const double s = y[j] + y[k];
      s1 += 2.0 * std::exp(s * s / (4.0 * beta));
    }
  }
  double s2 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    s2 += std::exp(y[j] * y[j] / (4.0 * beta - 2.0));
  }
  const auto dn = static_cast<double>(n);
  return s1 / (dn * std::sqrt(beta)) - 2.0 / std::sqrt(beta - 0.5) * s2 +
         dn / std::sqrt(beta - 1.0);
}

double bcmr(const statistics::ScaledResiduals& residuals,
            const numerics::QuadratureConfig& cfg) {
  const auto& y = residuals.values;
  const auto n = y.size();
  if (n < 2) {
    throw TooSmallSampleError("bcmr: need at least 2 observations, got " +
                              std::to_string(n));
  }
  const auto dn = static_cast<double>(n);
  // c_k = phi(qn((k-1)/n)) - phi(qn(k/n)), the integral of the quantile
  // function over each probability cell; the end cells use phi(..) = 0.
  std::vector<double> pdf_at_grid(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double q =
        numerics::std_normal_quantile(static_cast<double>(k) / dn);
    pdf_at_grid[static_cast<std::size_t>(k)] = numerics::std_normal_pdf(q);
  }
  double num = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double c = pdf_at_grid[static_cast<std::size_t>(k)] -
                     pdf_at_grid[static_cast<std::size_t>(k) + 1];
    num += y[k] * c;
  }
  // Residuals have 1/n-variance one, so the squared correlation is num^2.
  return dn * (1.0 - num * num) - bcmr_correction(static_cast<int>(n), cfg);
}

}  // namespace zbtest::competitors
