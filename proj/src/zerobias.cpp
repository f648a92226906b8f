// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include "zbtest/zerobias.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "zbtest/errors.hpp"

namespace zbtest::zerobias {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Breakpoints for half-line integrals of moment integrands: a geometric
// ladder keeps panel widths commensurate with the local decay scale, so
// polynomially decaying tails (Student-t and friends) converge instead of
// being skipped over by one huge panel.
std::vector<double> ladder_breakpoints(double lo, double hi) {
  std::vector<double> bps;
  for (double r = 32.0; r < 3.0e6; r *= 4.0) {
    if (-r > lo) bps.push_back(-r);
    if (r < hi) bps.push_back(r);
  }
  std::sort(bps.begin(), bps.end());
  return bps;
}

double moment_integral(const DistributionModel& model, int power,
                       const numerics::QuadratureConfig& cfg) {
  auto f = [&model, power](double x) {
    double p = model.density(x);
    double m = 1.0;
    for (int i = 0; i < power; ++i) m *= x;
    return m * p;
  };
  const auto bps = ladder_breakpoints(model.support_lo, model.support_hi);
  return numerics::integrate(f, model.support_lo, model.support_hi, cfg,
                             bps, 1.0)
      .value;
}

// Uniform-grid cubic Hermite interpolant with edge clamping.
struct HermiteCache {
  double x0 = 0.0;
  double h = 1.0;
  std::vector<double> y;
  std::vector<double> m;  // slopes at the nodes

  double eval(double t) const {
    const std::size_t n = y.size();
    if (t <= x0) return y.front();
    const double xe = x0 + h * static_cast<double>(n - 1);
    if (t >= xe) return y.back();
    auto i = static_cast<std::size_t>((t - x0) / h);
    if (i >= n - 1) i = n - 2;
    const double u = (t - (x0 + h * static_cast<double>(i))) / h;
    const double omu = 1.0 - u;
    const double h00 = (1.0 + 2.0 * u) * omu * omu;
    const double h10 = u * omu * omu;
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    return h00 * y[i] + h10 * h * m[i] + h01 * y[i + 1] + h11 * h * m[i + 1];
  }

  // Fritsch-Carlson clamp: shrink node slopes so each cubic piece is
  // monotone whenever the node values are.  Used for the CDF cache only.
  void clamp_monotone() {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double d = (y[i + 1] - y[i]) / h;
      if (d == 0.0) {
        m[i] = 0.0;
        m[i + 1] = 0.0;
        continue;
      }
      const double alpha = m[i] / d;
      const double beta = m[i + 1] / d;
      if (alpha < 0.0) m[i] = 0.0;
      if (beta < 0.0) m[i + 1] = 0.0;
      const double a2 = m[i] / d;
      const double b2 = m[i + 1] / d;
      const double s = a2 * a2 + b2 * b2;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        m[i] = tau * a2 * d;
        m[i + 1] = tau * b2 * d;
      }
    }
  }
};

// One panel integral on [lo, hi] to near machine precision; the segments
// handed in by the sweep are short and smooth, so a tight tolerance with a
// small subdivision budget suffices.
double segment_integral(const std::function<double(double)>& f, double lo,
                        double hi) {
  numerics::QuadratureConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.rel_tol = 1e-12;
  cfg.max_subdivisions = 64;
  return numerics::integrate(f, lo, hi, cfg).value;
}

void require_standardized(const DistributionModel& model) {
  if (std::abs(model.mean) > 1e-9 || std::abs(model.variance - 1.0) > 1e-9) {
    throw InvalidModelError("model must be standardized (mean 0, variance 1); "
                            "got mean " + std::to_string(model.mean) +
                            ", variance " + std::to_string(model.variance));
  }
}

}  // namespace

DistributionModel standardize(const DistributionModel& model) {
  const double mu = model.mean;
  const double var = model.variance;
  if (!std::isfinite(mu) || !std::isfinite(var)) {
    throw InvalidModelError("standardize: non-finite mean or variance for '" +
                            model.name + "'");
  }
  if (var <= 0.0) {
    throw InvalidModelError("standardize: variance must be positive for '" +
                            model.name + "', got " + std::to_string(var));
  }
  const double sd = std::sqrt(var);
  DistributionModel out;
  out.name = model.name + " (standardized)";
  out.density = [src = model.density, mu, sd](double x) {
    return sd * src(mu + sd * x);
  };
  out.cdf = [src = model.cdf, mu, sd](double x) { return src(mu + sd * x); };
  out.support_lo = (model.support_lo == -kInf) ? -kInf
                                               : (model.support_lo - mu) / sd;
  out.support_hi = (model.support_hi == kInf) ? kInf
                                              : (model.support_hi - mu) / sd;
  out.mean = 0.0;
  out.variance = 1.0;
  return out;
}

ModelDiagnostics model_diagnostics(const DistributionModel& model,
                                   const numerics::QuadratureConfig& cfg) {
  ModelDiagnostics diag;
  diag.mean = moment_integral(model, 1, cfg);
  const double m2 = moment_integral(model, 2, cfg);
  diag.variance = m2 - diag.mean * diag.mean;

  if (std::abs(diag.mean - model.mean) > 1e-6) {
    std::ostringstream os;
    os << "declared mean " << model.mean << " differs from quadrature value "
       << diag.mean;
    diag.warnings.push_back(os.str());
  }
  if (std::abs(diag.variance - model.variance) > 1e-6) {
    std::ostringstream os;
    os << "declared variance " << model.variance
       << " differs from quadrature value " << diag.variance;
    diag.warnings.push_back(os.str());
  }

  // CDF should differentiate to the density at interior probe points.
  const double lo = std::max(model.support_lo, -6.0);
  const double hi = std::min(model.support_hi, 6.0);
  const int kProbes = 21;
  const double fd_h = 1e-5;
  for (int i = 0; i < kProbes; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / kProbes;
    if (x - fd_h <= model.support_lo || x + fd_h >= model.support_hi) continue;
    const double fd = (model.cdf(x + fd_h) - model.cdf(x - fd_h)) / (2 * fd_h);
    diag.max_cdf_density_mismatch = std::max(
        diag.max_cdf_density_mismatch, std::abs(fd - model.density(x)));
  }
  if (diag.max_cdf_density_mismatch > 1e-4) {
    std::ostringstream os;
    os << "CDF finite difference deviates from density by "
       << diag.max_cdf_density_mismatch << " at probe points";
    diag.warnings.push_back(os.str());
  }

  // Boundedness probes for x*p(x) and p'(x); growth toward the support
  // edge suggests the transformed-law machinery may lose accuracy.
  auto edge_growth = [&](auto value_at, const char* label) {
    const double probes[] = {8.0, 12.0, 16.0, 20.0};
    for (double sign : {-1.0, 1.0}) {
      double prev = -kInf;
      bool grew = false;
      for (double r : probes) {
        const double x = sign * r;
        if (x <= model.support_lo || x >= model.support_hi) break;
        const double v = std::abs(value_at(x));
        if (prev >= 0.0 && v > prev * (1.0 + 1e-9) && v > 1e-8) grew = true;
        prev = v;
      }
      if (grew) {
        diag.warnings.push_back(std::string(label) +
                                " grows toward the support edge");
        break;
      }
    }
  };
  edge_growth([&](double x) { return x * model.density(x); }, "x*p(x)");
  edge_growth(
      [&](double x) {
        return (model.density(x + fd_h) - model.density(x - fd_h)) /
               (2 * fd_h);
      },
      "p'(x)");
  return diag;
}

double zero_bias_cdf(const DistributionModel& model, double t,
                     const numerics::QuadratureConfig& cfg, double* preclamp) {
  require_standardized(model);
  double raw = 0.0;
  if (t > model.support_lo) {
    const double hi = std::min(t, model.support_hi);
    auto f = [&model, t](double x) { return x * (x - t) * model.density(x); };
    const auto bps = ladder_breakpoints(model.support_lo, hi);
    raw = numerics::integrate(f, model.support_lo, hi, cfg, bps, 1.0).value;
  }
  if (preclamp != nullptr) *preclamp = raw;
  return std::clamp(raw, 0.0, 1.0);
}

double zero_bias_density(const DistributionModel& model, double t,
                         const numerics::QuadratureConfig& cfg,
                         double* discrepancy) {
  require_standardized(model);
  auto xp = [&model](double x) { return x * model.density(x); };
  double upper = 0.0;
  if (t < model.support_hi) {
    const double lo = std::max(t, model.support_lo);
    const auto bps = ladder_breakpoints(lo, model.support_hi);
    upper = numerics::integrate(xp, lo, model.support_hi, cfg, bps, 1.0).value;
  }
  double lower = 0.0;
  if (t > model.support_lo) {
    const double hi = std::min(t, model.support_hi);
    const auto bps = ladder_breakpoints(model.support_lo, hi);
    lower = -numerics::integrate(xp, model.support_lo, hi, cfg, bps, 1.0)
                 .value;
  }
  if (discrepancy != nullptr) *discrepancy = std::abs(upper - lower);
  return std::max(upper, 0.0);
}

ZeroBiasLaw zero_bias_law(const DistributionModel& model, double weight_sd_hint,
                          const numerics::QuadratureConfig& cfg,
                          int grid_segments) {
  require_standardized(model);
  if (!(weight_sd_hint > 0.0)) {
    throw InvalidModelError("zero_bias_law: weight_sd_hint must be positive");
  }
  if (grid_segments < 8) {
    throw InvalidModelError("zero_bias_law: grid_segments must be >= 8");
  }
  const double window = cfg.truncation_radius_multiplier * weight_sd_hint + 6.0;
  const double g_lo = std::max(model.support_lo, -window);
  const double g_hi = std::min(model.support_hi, window);
  if (!(g_lo < g_hi)) {
    throw InvalidModelError("zero_bias_law: support does not intersect the "
                            "grid window");
  }

  const auto n = static_cast<std::size_t>(grid_segments);
  const double h = (g_hi - g_lo) / static_cast<double>(n);

  // Mass below the grid window, if any: M1 = int x p, M2 = int x^2 p.
  double m1 = 0.0;
  double m2 = 0.0;
  if (model.support_lo < g_lo) {
    numerics::QuadratureConfig tail_cfg = cfg;
    tail_cfg.abs_tol = std::min(cfg.abs_tol, 1e-12);
    const auto bps = ladder_breakpoints(model.support_lo, g_lo);
    m1 = numerics::integrate([&model](double x) { return x * model.density(x); },
                             model.support_lo, g_lo, tail_cfg, bps, 1.0)
             .value;
    m2 = numerics::integrate(
             [&model](double x) { return x * x * model.density(x); },
             model.support_lo, g_lo, tail_cfg, bps, 1.0)
             .value;
  }

  // One sweep of short panel integrals; running sums give both functions:
  // d(t) = -M1(t) and F*(t) = M2(t) - t M1(t).
  auto dcache = std::make_shared<HermiteCache>();
  auto fcache = std::make_shared<HermiteCache>();
  dcache->x0 = g_lo;
  dcache->h = h;
  fcache->x0 = g_lo;
  fcache->h = h;
  dcache->y.resize(n + 1);
  dcache->m.resize(n + 1);
  fcache->y.resize(n + 1);
  fcache->m.resize(n + 1);

  auto xp = [&model](double x) { return x * model.density(x); };
  auto xxp = [&model](double x) { return x * x * model.density(x); };
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = g_lo + h * static_cast<double>(i);
    if (i > 0) {
      const double a = g_lo + h * static_cast<double>(i - 1);
      m1 += segment_integral(xp, a, t);
      m2 += segment_integral(xxp, a, t);
    }
    const double d = std::max(-m1, 0.0);
    dcache->y[i] = d;
    dcache->m[i] = -t * model.density(t);
    fcache->y[i] = m2 - t * m1;
    fcache->m[i] = d;
  }
  fcache->clamp_monotone();

  ZeroBiasLaw law;
  law.source = model;
  law.grid_lo = g_lo;
  law.grid_hi = g_hi;
  law.density = [dcache](double t) { return std::max(dcache->eval(t), 0.0); };
  law.cdf = [fcache](double t) {
    return std::clamp(fcache->eval(t), 0.0, 1.0);
  };
  return law;
}

double empirical_zero_bias_cdf(const Eigen::Ref<const Eigen::VectorXd>& sample,
                               double s) {
  const auto n = sample.size();
  if (n < 2) {
    throw TooSmallSampleError("empirical_zero_bias_cdf: need n >= 2, got " +
                              std::to_string(n));
  }
  const double mean = sample.mean();
  const double s2 = (sample.array() - mean).square().mean();
  if (s2 <= 0.0) {
    throw DegenerateSampleError(
        "empirical_zero_bias_cdf: sample variance is zero");
  }
  const double sd = std::sqrt(s2);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double y = (sample[j] - mean) / sd;
    if (y <= s) acc += y * (y - s);
  }
  return acc / static_cast<double>(n);
}

}  // namespace zbtest::zerobias
