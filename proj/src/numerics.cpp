// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include "zbtest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "zbtest/errors.hpp"

namespace zbtest::numerics {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2 pi)
constexpr double kInvSqrt2 = 0.7071067811865475244;    // 1/sqrt(2)

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, err;
};

// One Kronrod panel with the classic scaled error estimate.
Panel gk15(const std::function<double(double)>& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double fv[15];
  const double fc = f(c);
  double resg = kWg[3] * fc;
  double resk = kWgk[7] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  fv[7] = fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    fv[j] = f1;
    fv[14 - j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] *
              (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));
  }
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) {
    err = std::max(eps * 50.0 * resabs, err);
  }
  return {lo, hi, resk * h, err};
}

// Tail of the quartic-times-Gaussian envelope: with |f(t)| <= c t^4 w_a(t)
// beyond R and c calibrated at R, int_R^inf |f| <= |f(R)| * a/R *
// (1 + 3a/R^2 + 3a^2/R^4).
double tail_bound(double f_at_r, double r, double a) {
  const double q = a / (r * r);
  return std::abs(f_at_r) * (a / r) * (1.0 + 3.0 * q + 3.0 * q * q);
}

void check_config(const QuadratureConfig& cfg) {
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0)) {
    throw std::invalid_argument("quadrature tolerances must be positive");
  }
  if (cfg.max_subdivisions < 1) {
    throw std::invalid_argument("max_subdivisions must be >= 1");
  }
}

}  // namespace

double std_normal_pdf_deriv(double x, int order) {
  const double p = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  switch (order) {
    case 0:
      return p;
    case 1:
      return -x * p;
    case 2:
      return (x * x - 1.0) * p;
    case 3:
      return (3.0 * x - x * x * x) * p;
    default:
      throw std::invalid_argument("density derivative order must be in 0..3");
  }
}

double std_normal_cdf(double x) {
  if (std::isnan(x)) {
    throw std::invalid_argument("std_normal_cdf: NaN input");
  }
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("std_normal_quantile: p must be in (0,1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) *
                 r +
             4.5921953931549871457e4) *
                r +
            1.3731693765509461125e4) *
               r +
           1.9715909503065514427e3) *
              r +
          1.3314166789178437745e2) *
             r +
         3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) *
                 r +
             2.1213794301586595867e4) *
                r +
            5.3941960214247511077e3) *
               r +
           6.8718700749205790830e2) *
              r +
          4.2313330701600911252e1) *
             r +
         1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e0) *
                r +
            3.64784832476320460504e0) *
               r +
           5.76949722146069140550e0) *
              r +
          4.63033784615654529590e0) *
             r +
         1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e0) *
              r +
          2.05319162663775882187e0) *
             r +
         1.0);
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e0) *
              r +
          5.46378491116411436990e0) *
             r +
         6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                  r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    x = num / den;
  }
  return (q < 0.0) ? -x : x;
}

double weight_pdf(double t, double a) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("weight variance a must be positive");
  }
  return kInvSqrt2Pi / std::sqrt(a) * std::exp(-0.5 * t * t / a);
}

IntegrationResult integrate(const std::function<double(double)>& f, double lo,
                            double hi, const QuadratureConfig& cfg,
                            std::span<const double> breakpoints,
                            double gaussian_sd) {
  check_config(cfg);
  if (!(lo < hi)) {
    if (lo == hi) return {0.0, 0.0, 0};
    throw std::invalid_argument("integrate: lo must be < hi");
  }
  const double a_var = gaussian_sd * gaussian_sd;

  double max_kink = 0.0;
  for (double b : breakpoints) max_kink = std::max(max_kink, std::abs(b));
  const double radius = cfg.truncation_radius_multiplier * gaussian_sd + max_kink;

  double tail = 0.0;
  double lo_eff = lo, hi_eff = hi;
  if (std::isinf(hi)) {
    hi_eff = std::isinf(lo) ? radius : std::max(radius, lo + 2.0 * gaussian_sd);
    tail += tail_bound(f(hi_eff), std::abs(hi_eff), a_var);
  }
  if (std::isinf(lo)) {
    lo_eff = std::min(-radius, hi_eff - 2.0 * gaussian_sd);
    tail += tail_bound(f(lo_eff), std::abs(lo_eff), a_var);
  }

  // Initial panels: one per interval between consecutive breakpoints.
  std::vector<double> cuts;
  cuts.push_back(lo_eff);
  for (double b : breakpoints) {
    if (b > lo_eff && b < hi_eff) cuts.push_back(b);
  }
  cuts.push_back(hi_eff);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto worse = [](const Panel& x, const Panel& y) {
    if (x.err != y.err) return x.err < y.err;
    return x.lo < y.lo;  // deterministic tiebreak
  };
  std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> heap(worse);
  double total_value = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gk15(f, cuts[i], cuts[i + 1]);
    total_value += p.value;
    total_err += p.err;
    heap.push(p);
  }

  int splits = 0;
  while (total_err + tail >
             cfg.abs_tol + cfg.rel_tol * std::abs(total_value) &&
         splits < cfg.max_subdivisions && heap.top().err > 0.0) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval at floating-point resolution; cannot refine further.
      heap.push({worst.lo, worst.hi, worst.value, 0.0});
      total_err -= worst.err;
      continue;
    }
    Panel left = gk15(f, worst.lo, mid);
    Panel right = gk15(f, mid, worst.hi);
    total_value += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Deterministic final summation in spatial order.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
  double value = 0.0, err = tail;
  for (const Panel& p : panels) {
    value += p.value;
    err += p.err;
  }

  if (err > cfg.abs_tol + cfg.rel_tol * std::abs(value) &&
      splits >= cfg.max_subdivisions) {
    throw QuadratureFailureError(
        "quadrature did not converge within the subdivision budget", value,
        err);
  }
  return {value, err, static_cast<int>(panels.size())};
}

double phi_sq_weight_integral(double a) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("weight variance a must be positive");
  }
  return 0.25 + std::asin(a / (1.0 + a)) / (2.0 * M_PI);
}

double upper_phi_weight_integral(double y, double a,
                                 const QuadratureConfig& cfg) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("weight variance a must be positive");
  }
  if (std::isinf(y)) return y > 0 ? 0.0 : 0.5;
  auto f = [a](double t) { return std_normal_cdf(t) * weight_pdf(t, a); };
  return integrate(f, y, std::numeric_limits<double>::infinity(), cfg, {},
                   std::sqrt(a))
      .value;
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::invalid_argument("regularized_gamma_p: need a > 0, x >= 0");
  }
  if (x == 0.0) return 0.0;
  const double lga = std::lgamma(a);
  if (x < a + 1.0) {
    // Series expansion.
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lga);
  }
  // Continued fraction for Q, then P = 1 - Q.
  const double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - lga) * h;
}

namespace {

double beta_cf(double a, double b, double x) {
  const double fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double regularized_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0) {
    throw std::invalid_argument(
        "regularized_beta: need a, b > 0 and x in [0,1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace zbtest::numerics
