// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include "zbtest/asymptotics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "zbtest/detail/parallel.hpp"
#include "zbtest/errors.hpp"

namespace zbtest::asymptotics {

namespace {

using numerics::std_normal_cdf;
using numerics::std_normal_pdf;

void require_k(int k) {
  if (k != 1 && k != 2) {
    throw std::invalid_argument("statistic family k must be 1 or 2, got " +
                                std::to_string(k));
  }
}

// E[U(s) U(t)] for U(s) = X (X - s) 1{X <= s} under the standard normal,
// from partial moments up to order three.
double euu(double s, double t) {
  const double m = std::min(s, t);
  const double M = std::max(s, t);
  const double pm = std_normal_pdf(m);
  const double Pm = std_normal_cdf(m);
  return (3.0 * m - m * m * m) * pm + (s + t) * (m * m - 1.0) * pm -
         s * t * m * pm + 3.0 * (M - m) * pm + (3.0 + s * t) * Pm;
}

double kernel2(double s, double t) {
  auto A = [](double x) { return 2.0 * std_normal_pdf(x) + x * std_normal_cdf(x); };
  auto B = [](double x) { return 0.5 * x * std_normal_pdf(x) - std_normal_cdf(x); };
  auto C = [](double x) { return -0.5 * x * std_normal_pdf(x); };
  auto m3 = [](double x) { return 3.0 * std_normal_cdf(x) - x * std_normal_pdf(x); };
  return euu(s, t) - A(s) * A(t) + B(t) * m3(s) + B(s) * m3(t) +
         C(t) * std_normal_cdf(s) + C(s) * std_normal_cdf(t) +
         3.0 * B(s) * B(t) + C(s) * C(t) + B(s) * C(t) + B(t) * C(s);
}

double kernel1(double s, double t) {
  const double m = std::min(s, t);
  const double Pm = std_normal_cdf(m);
  auto g = [](double x) { return std_normal_pdf(x) + x * std_normal_cdf(x); };
  auto m2 = [](double x) { return -2.0 * std_normal_pdf(x) - x * std_normal_cdf(x); };
  auto m3 = [](double x) { return 3.0 * std_normal_cdf(x) - x * std_normal_pdf(x); };
  // E[U(u) 1{X <= v}]
  auto eUI = [](double u, double v) {
    const double mm = std::min(u, v);
    return std_normal_cdf(mm) + (u - mm) * std_normal_pdf(mm);
  };
  const double a_s = g(s), a_t = g(t);
  const double b_s = -std_normal_cdf(s), b_t = -std_normal_cdf(t);
  const double d_s = std_normal_cdf(s), d_t = std_normal_cdf(t);
  return euu(s, t) + a_t * m2(s) + b_t * m3(s) - eUI(s, t) +
         d_t * std_normal_cdf(s) + a_s * m2(t) + b_s * m3(t) - eUI(t, s) +
         d_s * std_normal_cdf(t) + a_s * a_t + a_s * std_normal_pdf(t) +
         a_t * std_normal_pdf(s) + 3.0 * b_s * b_t -
         b_s * (std_normal_cdf(t) - t * std_normal_pdf(t)) -
         b_t * (std_normal_cdf(s) - s * std_normal_pdf(s)) + b_s * d_t +
         b_t * d_s + Pm - d_t * std_normal_cdf(s) - d_s * std_normal_cdf(t) +
         d_s * d_t;
}

void require_distinct(const Eigen::Ref<const Eigen::VectorXd>& grid) {
  if (grid.size() < 1) {
    throw std::invalid_argument("grid must be nonempty");
  }
  std::vector<double> sorted(grid.data(), grid.data() + grid.size());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("grid points must be distinct");
  }
}

void require_standardized(const zerobias::DistributionModel& model) {
  if (std::abs(model.mean) > 1e-9 || std::abs(model.variance - 1.0) > 1e-9) {
    throw InvalidModelError(
        "fixed-alternative quantities require a standardized model");
  }
}

// Inverse-CDF draw by bracketed bisection; works for any continuous
// strictly increasing CDF on its support.
double inverse_cdf_draw(const zerobias::DistributionModel& model, double u) {
  double lo = model.support_lo;
  double hi = model.support_hi;
  if (std::isinf(lo)) {
    lo = -1.0;
    while (model.cdf(lo) > u) lo *= 2.0;
  }
  if (std::isinf(hi)) {
    hi = 1.0;
    while (model.cdf(hi) < u) hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (model.cdf(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double kernel(int k, double s, double t) {
  require_k(k);
  return k == 1 ? kernel1(s, t) : kernel2(s, t);
}

Eigen::MatrixXd kernel_gram(int k,
                            const Eigen::Ref<const Eigen::VectorXd>& grid,
                            double a) {
  require_k(k);
  require_distinct(grid);
  if (!(a > 0.0)) {
    throw std::invalid_argument("weight variance a must be positive");
  }
  const auto n = grid.size();
  Eigen::VectorXd root_w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    root_w[i] = std::sqrt(numerics::weight_pdf(grid[i], a));
  }
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel(k, grid[i], grid[j]) * root_w[i] * root_w[j];
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

Eigen::VectorXd discretized_eigenvalues(
    int k, const Eigen::Ref<const Eigen::VectorXd>& grid, double a) {
  require_k(k);
  require_distinct(grid);
  const auto n = grid.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return grid[x] < grid[y]; });
  Eigen::VectorXd s(n), qw(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = grid[order[static_cast<std::size_t>(i)]];
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = (i == 0) ? s[0] : s[i - 1];
    const double right = (i == n - 1) ? s[n - 1] : s[i + 1];
    qw[i] = 0.5 * (right - left);  // trapezoid weight
  }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double wi = std::sqrt(qw[i] * numerics::weight_pdf(s[i], a));
    for (Eigen::Index j = i; j < n; ++j) {
      const double wj = std::sqrt(qw[j] * numerics::weight_pdf(s[j], a));
      const double v = kernel(k, s[i], s[j]) * wi * wj;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  Eigen::VectorXd ev = solver.eigenvalues();
  return ev.reverse();
}

double delta(int k, const zerobias::DistributionModel& model,
             const zerobias::ZeroBiasLaw& law, double a,
             const numerics::QuadratureConfig& cfg) {
  require_k(k);
  require_standardized(model);
  auto ref = [&](double s) {
    return k == 2 ? std_normal_cdf(s) : model.cdf(s);
  };
  auto f = [&](double s) {
    const double g = law.cdf(s) - ref(s);
    return g * g * numerics::weight_pdf(s, a);
  };
  std::vector<double> bps;
  if (std::isfinite(model.support_lo)) bps.push_back(model.support_lo);
  if (std::isfinite(model.support_hi)) bps.push_back(model.support_hi);
  const double inf = std::numeric_limits<double>::infinity();
  const double value =
      numerics::integrate(f, -inf, inf, cfg, bps, std::sqrt(a)).value;
  return std::max(value, 0.0);
}

std::pair<double, double> tau_squared(
    int k, const zerobias::DistributionModel& model,
    const zerobias::ZeroBiasLaw& law, double a, long replications,
    const RandomStream& stream, const numerics::QuadratureConfig& cfg) {
  require_k(k);
  require_standardized(model);
  if (replications < 2) {
    throw std::invalid_argument("tau_squared: need at least 2 replications");
  }
  const double dist = delta(k, model, law, a, cfg);
  if (dist < 1e-8) {
    throw IllPosedError(
        "tau_squared: the weighted distance is numerically zero, so the "
        "fixed-alternative scaling limit is degenerate; tau^2 is undefined "
        "at the fixed point");
  }

  auto ref = [&](double s) {
    return k == 2 ? std_normal_cdf(s) : model.cdf(s);
  };
  // <C(x, .), g> with g = F* - ref; C vanishes off the support.
  auto inner_product = [&](double x) {
    auto f = [&](double s) {
      const double F = model.cdf(s);
      const double d = law.density(s);
      const double ew = -d - s * F;  // E[(X - s) 1{X <= s}]
      const double coeff = 0.5 * (1.0 - x * x) * s - x;
      double c = (s >= x ? x * (x - s) : 0.0) - x * ew - x * x * law.cdf(s) -
                 coeff * d;
      if (k == 1) {
        c += (s >= x ? -1.0 : 0.0) + F + coeff * model.density(s);
      }
      const double g = law.cdf(s) - ref(s);
      return c * g * numerics::weight_pdf(s, a);
    };
    const double bp = x;
    return numerics::integrate(f, model.support_lo, model.support_hi, cfg,
                               std::span<const double>(&bp, 1), std::sqrt(a))
        .value;
  };

  const auto count = static_cast<std::size_t>(replications);
  std::vector<double> sq(count);
  detail::parallel_for(count, [&](std::size_t i) {
    RandomStream sub = stream.child(static_cast<std::uint64_t>(i));
    const double x = inverse_cdf_draw(model, sub.unit());
    const double v = inner_product(x);
    sq[i] = v * v;
  });
  double mean_sq = 0.0;
  for (double v : sq) mean_sq += v;
  mean_sq /= static_cast<double>(count);
  double var_sq = 0.0;
  for (double v : sq) var_sq += (v - mean_sq) * (v - mean_sq);
  var_sq /= static_cast<double>(count - 1);
  const double est = 4.0 * mean_sq;
  const double se = 4.0 * std::sqrt(var_sq / static_cast<double>(count));
  return {est, se};
}

FixedAlternativeSummary fixed_alternative_summary(
    int k, const zerobias::DistributionModel& model, double a,
    long replications, const RandomStream& stream,
    const numerics::QuadratureConfig& cfg) {
  require_k(k);
  require_standardized(model);
  if (!(a > 0.0)) {
    throw std::invalid_argument("weight variance a must be positive");
  }
  const auto law = zerobias::zero_bias_law(model, std::sqrt(a), cfg);
  FixedAlternativeSummary out;
  out.delta = delta(k, model, law, a, cfg);
  const auto [tau2, se] = tau_squared(k, model, law, a, replications, stream,
                                      cfg);
  out.tau_squared = tau2;
  out.mc_std_error = se;
  out.mc_replications = replications;
  return out;
}

double approximate_power(double delta, double tau_squared, long n,
                         double critical_value) {
  if (!(tau_squared > 0.0)) {
    throw std::invalid_argument("approximate_power: tau^2 must be positive");
  }
  if (n < 1) {
    throw std::invalid_argument("approximate_power: n must be >= 1");
  }
  const double dn = static_cast<double>(n);
  const double z = std::sqrt(dn) / std::sqrt(tau_squared) *
                   (critical_value / dn - delta);
  return 1.0 - std_normal_cdf(z);
}

ConfidenceInterval confidence_interval(double statistic_value, long n,
                                       double tau_squared, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::invalid_argument(
        "confidence_interval: alpha must lie in (0, 1]");
  }
  if (n < 1) {
    throw std::invalid_argument("confidence_interval: n must be >= 1");
  }
  if (tau_squared < 0.0) {
    throw std::invalid_argument(
        "confidence_interval: tau^2 must be nonnegative");
  }
  const double dn = static_cast<double>(n);
  const double center = statistic_value / dn;
  const double half =
      (alpha == 1.0)
          ? 0.0
          : numerics::std_normal_quantile(1.0 - 0.5 * alpha) *
                std::sqrt(tau_squared / dn);
  return {center - half, center + half};
}

}  // namespace zbtest::asymptotics
