// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include "zbtest/statistics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <vector>

#include "zbtest/competitors.hpp"
#include "zbtest/errors.hpp"

namespace zbtest {

std::string_view statistic_name(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::G1: return "g1";
    case StatisticKind::G2: return "g2";
    case StatisticKind::BHEP: return "bhep";
    case StatisticKind::HJG: return "hjg";
    case StatisticKind::BCMR: return "bcmr";
  }
  return "g2";
}

std::optional<StatisticKind> parse_statistic(std::string_view name) {
  std::string low(name);
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (low == "g1") return StatisticKind::G1;
  if (low == "g2") return StatisticKind::G2;
  if (low == "bhep") return StatisticKind::BHEP;
  if (low == "hjg") return StatisticKind::HJG;
  if (low == "bcmr") return StatisticKind::BCMR;
  return std::nullopt;
}

namespace {

bool near(double x, double y) { return std::abs(x - y) <= 1e-9; }

}  // namespace

const CriticalValueEntry& CriticalValueTable::lookup(StatisticKind kind,
                                                     double tuning, int n,
                                                     double alpha) const {
  const CriticalValueEntry* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) {
    if (e.kind != kind) continue;
    if (e.n == n && near(e.tuning, tuning) && near(e.alpha, alpha)) return e;
    const double d = std::abs(e.n - n) + std::abs(e.tuning - tuning) +
                     std::abs(e.alpha - alpha);
    if (d < best) {
      best = d;
      nearest = &e;
    }
  }
  std::ostringstream os;
  os << "no critical value for statistic " << statistic_name(kind)
     << " at n=" << n << ", a=" << tuning << ", alpha=" << alpha;
  if (nearest != nullptr) {
    os << "; nearest available cell: n=" << nearest->n
       << ", a=" << nearest->tuning;
    throw MissingCriticalValueError(os.str(), nearest->n, nearest->tuning);
  }
  os << "; the table has no entries for this statistic";
  throw MissingCriticalValueError(os.str(), 0,
                                  std::numeric_limits<double>::quiet_NaN());
}

void CriticalValueTable::upsert(const CriticalValueEntry& entry) {
  for (auto& e : entries) {
    if (e.kind == entry.kind && e.n == entry.n && near(e.tuning, entry.tuning) &&
        near(e.alpha, entry.alpha)) {
      e = entry;
      return;
    }
  }
  entries.push_back(entry);
}

void CriticalValueTable::sort_canonical() {
  std::sort(entries.begin(), entries.end(),
            [](const CriticalValueEntry& x, const CriticalValueEntry& y) {
              if (x.kind != y.kind) return x.kind < y.kind;
              if (x.tuning != y.tuning) return x.tuning < y.tuning;
              if (x.n != y.n) return x.n < y.n;
              return x.alpha < y.alpha;
            });
}

void PowerTable::sort_canonical() {
  std::sort(entries.begin(), entries.end(),
            [](const PowerEntry& x, const PowerEntry& y) {
              if (x.alternative != y.alternative)
                return x.alternative < y.alternative;
              if (x.kind != y.kind) return x.kind < y.kind;
              if (x.tuning != y.tuning) return x.tuning < y.tuning;
              return x.n < y.n;
            });
}

}  // namespace zbtest

namespace zbtest::statistics {

namespace {

void require_tuning(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("tuning parameter a must be positive, got " +
                                std::to_string(a));
  }
}

// Exclusive prefix sums over the sorted residuals: S*[k] covers j < k.
struct PrefixSums {
  std::vector<double> s1, s2;
  explicit PrefixSums(const Eigen::VectorXd& y) {
    const auto n = static_cast<std::size_t>(y.size());
    s1.assign(n + 1, 0.0);
    s2.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      s1[k + 1] = s1[k] + y[static_cast<Eigen::Index>(k)];
      s2[k + 1] = s2[k] + y[static_cast<Eigen::Index>(k)] *
                              y[static_cast<Eigen::Index>(k)];
    }
  }
};

double integrated_sq_distance(const ScaledResiduals& residuals, double a,
                              bool against_normal,
                              const numerics::QuadratureConfig& cfg) {
  const auto& y = residuals.values;
  const auto n = static_cast<double>(y.size());
  const PrefixSums ps(y);
  auto f = [&](double t) {
    const auto k = static_cast<std::size_t>(
        std::upper_bound(y.data(), y.data() + y.size(), t) - y.data());
    const double fhat = (ps.s2[k] - t * ps.s1[k]) / n;
    const double ref = against_normal ? numerics::std_normal_cdf(t)
                                      : static_cast<double>(k) / n;
    const double d = fhat - ref;
    return d * d * numerics::weight_pdf(t, a);
  };
  const double inf = std::numeric_limits<double>::infinity();
  const auto res = numerics::integrate(
      f, -inf, inf, cfg, std::span<const double>(y.data(), y.size()),
      std::sqrt(a));
  return n * res.value;
}

// Cache of I(y) = int_y^inf Phi(x) w_a(x) dx on a uniform grid, cubic
// Hermite with the analytic slope I'(y) = -Phi(y) w_a(y).  Outside the
// window I is flat to ~1e-16 because either Phi or the weight has decayed.
struct TailCache {
  double x0, h;
  std::vector<double> val, slope;

  double eval(double t) const {
    const std::size_t n = val.size();
    if (t <= x0) return val.front();
    const double xe = x0 + h * static_cast<double>(n - 1);
    if (t >= xe) return val.back();
    auto i = static_cast<std::size_t>((t - x0) / h);
    if (i >= n - 1) i = n - 2;
    const double u = (t - (x0 + h * static_cast<double>(i))) / h;
    const double omu = 1.0 - u;
    const double h00 = (1.0 + 2.0 * u) * omu * omu;
    const double h10 = u * omu * omu;
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    return h00 * val[i] + h10 * h * slope[i] + h01 * val[i + 1] +
           h11 * h * slope[i + 1];
  }
};

std::shared_ptr<const TailCache> tail_cache(double a) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const TailCache>> store;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = store.find(a); it != store.end()) return it->second;

  const double sa = std::sqrt(a);
  const double window = 10.0 * sa + 8.0;
  const auto factor = std::clamp(
      static_cast<int>(std::ceil(1.0 / sa)), 1, 8);
  const auto n = static_cast<std::size_t>(4096 * factor);
  auto cache = std::make_shared<TailCache>();
  cache->x0 = -window;
  cache->h = 2.0 * window / static_cast<double>(n);
  cache->val.resize(n + 1);
  cache->slope.resize(n + 1);

  numerics::QuadratureConfig tight;
  tight.abs_tol = 1e-14;
  tight.rel_tol = 1e-13;
  tight.max_subdivisions = 64;
  auto f = [a](double x) {
    return numerics::std_normal_cdf(x) * numerics::weight_pdf(x, a);
  };
  numerics::QuadratureConfig top = tight;
  top.truncation_radius_multiplier = 12.0;
  double acc = numerics::upper_phi_weight_integral(window, a, top);
  cache->val[n] = acc;
  for (std::size_t i = n; i-- > 0;) {
    const double lo = cache->x0 + cache->h * static_cast<double>(i);
    acc += numerics::integrate(f, lo, lo + cache->h, tight).value;
    cache->val[i] = acc;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = cache->x0 + cache->h * static_cast<double>(i);
    cache->slope[i] = -f(x);
  }
  store.emplace(a, cache);
  return store.find(a)->second;
}

}  // namespace

ScaledResiduals scaled_residuals(
    const Eigen::Ref<const Eigen::VectorXd>& sample) {
  const auto n = sample.size();
  if (n < 2) {
    throw TooSmallSampleError("scaled_residuals: need at least 2 observations, "
                              "got " + std::to_string(n));
  }
  if (!sample.allFinite()) {
    throw std::invalid_argument("scaled_residuals: sample has non-finite "
                                "entries");
  }
  const double mean = sample.mean();
  const double s2 = (sample.array() - mean).square().mean();
  if (!(s2 >= std::numeric_limits<double>::min())) {
    throw DegenerateSampleError("scaled_residuals: sample variance is zero");
  }
  ScaledResiduals out;
  out.values = (sample.array() - mean) / std::sqrt(s2);
  std::sort(out.values.data(), out.values.data() + n);
  return out;
}

double g1_quadrature(const ScaledResiduals& residuals, TuningParameter tuning,
                     const numerics::QuadratureConfig& cfg) {
  require_tuning(tuning.a);
  return integrated_sq_distance(residuals, tuning.a, false, cfg);
}

double g2_quadrature(const ScaledResiduals& residuals, TuningParameter tuning,
                     const numerics::QuadratureConfig& cfg) {
  require_tuning(tuning.a);
  return integrated_sq_distance(residuals, tuning.a, true, cfg);
}

double g1_closed_form(const ScaledResiduals& residuals,
                      TuningParameter tuning) {
  require_tuning(tuning.a);
  const double a = tuning.a;
  const double sa = std::sqrt(a);
  const auto& y = residuals.values;
  const auto n = y.size();
  double pair = 0.0;
  double single = 0.0;
  double cu = 0.0, cy = 0.0, cy2 = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v = y[k];
    const double u = v * v - 1.0;
    const double A = 1.0 - numerics::std_normal_cdf(v / sa);
    const double B = a * numerics::weight_pdf(v, a);
    pair += A * (u * cu + a * v * cy) +
            B * (v * (static_cast<double>(k) - cy2) + cy);
    single += A * (v * v * v * v + (a - 2.0) * v * v + 1.0) +
              B * (2.0 * v - v * v * v);
    cu += u;
    cy += v;
    cy2 += v * v;
  }
  const auto dn = static_cast<double>(n);
  return 2.0 / dn * pair + single / dn;
}

double g2_closed_form(const ScaledResiduals& residuals, TuningParameter tuning,
                      const numerics::QuadratureConfig& cfg) {
  require_tuning(tuning.a);
  (void)cfg;
  const double a = tuning.a;
  const double sa = std::sqrt(a);
  const auto tails = tail_cache(a);
  const auto& y = residuals.values;
  const auto n = y.size();
  const auto dn = static_cast<double>(n);
  const double c1 = a / std::sqrt(2.0 * M_PI * (1.0 + a));
  const double c2 = std::sqrt((1.0 + a) / a);
  double pair = 0.0;
  double single = 0.0;
  double cy = 0.0, cy2 = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v = y[k];
    const double A = 1.0 - numerics::std_normal_cdf(v / sa);
    const double w = numerics::weight_pdf(v, a);
    pair += A * (v * v * cy2 + a * v * cy) - a * w * v * cy2;
    single += v * v / dn * ((v * v + a) * A - a * v * w) -
              2.0 * v *
                  (v * tails->eval(v) - a * numerics::std_normal_cdf(v) * w -
                   c1 * (1.0 - numerics::std_normal_cdf(c2 * v)));
    cy += v;
    cy2 += v * v;
  }
  return 2.0 / dn * pair + single +
         dn * numerics::phi_sq_weight_integral(a);
}

double evaluate_statistic(StatisticKind kind, const ScaledResiduals& residuals,
                          double tuning,
                          const numerics::QuadratureConfig& cfg) {
  switch (kind) {
    case StatisticKind::G1:
      return g1_closed_form(residuals, TuningParameter{tuning});
    case StatisticKind::G2:
      return g2_closed_form(residuals, TuningParameter{tuning}, cfg);
    case StatisticKind::BHEP:
      return competitors::bhep(residuals, tuning);
    case StatisticKind::HJG:
      return competitors::hjg(residuals, tuning);
    case StatisticKind::BCMR:
      return competitors::bcmr(residuals, cfg);
  }
  throw std::invalid_argument("evaluate_statistic: unknown statistic kind");
}

TestReport run_test(const Eigen::Ref<const Eigen::VectorXd>& sample,
                    StatisticKind kind, TuningParameter tuning, double alpha,
                    const CriticalValueTable& table,
                    const numerics::QuadratureConfig& cfg) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("run_test: alpha must lie in (0, 1), got " +
                                std::to_string(alpha));
  }
  const auto residuals = scaled_residuals(sample);
  const double key_tuning = (kind == StatisticKind::BCMR) ? 0.0 : tuning.a;
  TestReport report;
  report.kind = kind;
  report.tuning = key_tuning;
  report.n = residuals.n();
  report.alpha = alpha;
  report.value = evaluate_statistic(kind, residuals, key_tuning, cfg);
  const auto& cell =
      table.lookup(kind, key_tuning, static_cast<int>(residuals.n()), alpha);
  report.critical_value = cell.quantile;
  report.reject = report.value > cell.quantile;
  report.table_replications = cell.replications;
  report.table_seed = cell.seed;
  return report;
}

}  // namespace zbtest::statistics
