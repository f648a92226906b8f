// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include "zbtest/alternatives.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "zbtest/numerics.hpp"

namespace zbtest::alternatives {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kEulerGamma = 0.5772156649015329;
constexpr double kPi = 3.141592653589793;

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Normal: return "normal";
    case Family::MixN: return "mixn";
    case Family::StudentT: return "t";
    case Family::Uniform: return "uniform";
    case Family::ChiSq: return "chisq";
    case Family::Beta: return "beta";
    case Family::Gamma: return "gamma";
    case Family::Gumbel: return "gumbel";
    case Family::LogNormal: return "lognormal";
    case Family::Weibull: return "weibull";
  }
  return "normal";
}

[[noreturn]] void fail_parse(const std::string& detail) {
  std::ostringstream os;
  os << detail << "; known alternatives:";
  bool first = true;
  for (const auto& name : catalog_names()) {
    os << (first ? " " : ", ") << name;
    first = false;
  }
  throw std::invalid_argument(os.str());
}

double parse_number(std::string_view token) {
  double out = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail_parse("cannot parse number '" + std::string(token) + "'");
  }
  return out;
}

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

void validate(const AlternativeSpec& spec) {
  const auto& p = spec.params;
  auto expect = [&](std::size_t count, const char* names) {
    if (p.size() != count) {
      std::ostringstream os;
      os << family_name(spec.family) << " expects " << count
         << " parameter(s) (" << names << "), got " << p.size();
      fail_parse(os.str());
    }
  };
  auto domain = [&](bool ok, const char* what) {
    if (!ok) {
      std::ostringstream os;
      os << family_name(spec.family) << ": " << what;
      fail_parse(os.str());
    }
  };
  switch (spec.family) {
    case Family::Normal:
      expect(2, "mu, sigma2");
      domain(p[1] > 0.0, "sigma2 must be positive");
      break;
    case Family::MixN:
      expect(3, "p, mu, sigma2");
      domain(p[0] >= 0.0 && p[0] <= 1.0, "p must lie in [0, 1]");
      domain(p[2] > 0.0, "sigma2 must be positive");
      break;
    case Family::StudentT:
      expect(1, "nu");
      domain(p[0] > 2.0, "nu must exceed 2 so the variance exists");
      break;
    case Family::Uniform:
      expect(0, "");
      break;
    case Family::ChiSq:
      expect(1, "k");
      domain(p[0] > 0.0, "k must be positive");
      break;
    case Family::Beta:
      expect(2, "alpha, beta");
      domain(p[0] > 0.0 && p[1] > 0.0, "shape parameters must be positive");
      break;
    case Family::Gamma:
      expect(2, "shape, scale");
      domain(p[0] > 0.0 && p[1] > 0.0, "shape and scale must be positive");
      break;
    case Family::Gumbel:
      expect(2, "location, scale");
      domain(p[1] > 0.0, "scale must be positive");
      break;
    case Family::LogNormal:
      expect(2, "mu, sigma2");
      domain(p[1] > 0.0, "sigma2 must be positive");
      break;
    case Family::Weibull:
      expect(2, "scale, shape");
      domain(p[0] > 0.0 && p[1] > 0.0, "scale and shape must be positive");
      break;
  }
  for (double v : p) {
    if (!std::isfinite(v)) fail_parse("parameters must be finite");
  }
}

// Marsaglia-Tsang; for shape < 1 boosts a shape+1 draw by U^(1/shape).
double gamma_draw(RandomStream& stream, double shape, double scale) {
  if (shape < 1.0) {
    const double u = stream.unit();
    return gamma_draw(stream, shape + 1.0, scale) *
           std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    const double x = numerics::std_normal_quantile(stream.unit());
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = stream.unit();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale;
    }
  }
}

double normal_draw(RandomStream& stream) {
  return numerics::std_normal_quantile(stream.unit());
}

double student_t_cdf(double nu, double x) {
  if (x == 0.0) return 0.5;
  const double z = nu / (nu + x * x);
  const double half_tail = 0.5 * numerics::regularized_beta(0.5 * nu, 0.5, z);
  return x > 0.0 ? 1.0 - half_tail : half_tail;
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

AlternativeSpec parse_alternative(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  std::string name = s;
  std::vector<double> params;
  const auto open = s.find('(');
  if (open != std::string::npos) {
    if (s.back() != ')') fail_parse("malformed alternative '" + s + "'");
    name = s.substr(0, open);
    std::string body = s.substr(open + 1, s.size() - open - 2);
    if (!body.empty()) {
      std::size_t pos = 0;
      while (true) {
        const auto comma = body.find(',', pos);
        const auto token = body.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        params.push_back(parse_number(token));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  }
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  AlternativeSpec spec;
  spec.params = std::move(params);
  if (name == "normal") spec.family = Family::Normal;
  else if (name == "mixn") spec.family = Family::MixN;
  else if (name == "t") spec.family = Family::StudentT;
  else if (name == "uniform") spec.family = Family::Uniform;
  else if (name == "chisq") spec.family = Family::ChiSq;
  else if (name == "beta") spec.family = Family::Beta;
  else if (name == "gamma") spec.family = Family::Gamma;
  else if (name == "gumbel") spec.family = Family::Gumbel;
  else if (name == "lognormal") spec.family = Family::LogNormal;
  else if (name == "weibull") spec.family = Family::Weibull;
  else fail_parse("unknown alternative '" + std::string(text) + "'");
  validate(spec);
  return spec;
}

std::string format_alternative(const AlternativeSpec& spec) {
  std::string out{family_name(spec.family)};
  if (spec.family == Family::Uniform) return out;
  out.push_back('(');
  for (std::size_t i = 0; i < spec.params.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += format_number(spec.params[i]);
  }
  out.push_back(')');
  return out;
}

const std::vector<AlternativeSpec>& catalog() {
  static const std::vector<AlternativeSpec> specs = {
      {Family::Normal, {0.0, 1.0}},
      {Family::MixN, {0.3, 1.0, 0.25}},
      {Family::StudentT, {3.0}},
      {Family::StudentT, {5.0}},
      {Family::StudentT, {10.0}},
      {Family::Uniform, {}},
      {Family::ChiSq, {5.0}},
      {Family::ChiSq, {15.0}},
      {Family::Beta, {1.0, 4.0}},
      {Family::Beta, {2.0, 5.0}},
      {Family::Gamma, {1.0, 5.0}},
      {Family::Gamma, {5.0, 1.0}},
      {Family::Gumbel, {1.0, 2.0}},
      {Family::LogNormal, {0.0, 1.0}},
      {Family::Weibull, {1.0, 0.5}},
  };
  return specs;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  names.reserve(catalog().size());
  for (const auto& spec : catalog()) names.push_back(format_alternative(spec));
  return names;
}

double alt_mean(const AlternativeSpec& spec) {
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Normal: return p[0];
    case Family::MixN: return p[0] * p[1];
    case Family::StudentT: return 0.0;
    case Family::Uniform: return 0.0;
    case Family::ChiSq: return p[0];
    case Family::Beta: return p[0] / (p[0] + p[1]);
    case Family::Gamma: return p[0] * p[1];
    case Family::Gumbel: return p[0] + p[1] * kEulerGamma;
    case Family::LogNormal: return std::exp(p[0] + 0.5 * p[1]);
    case Family::Weibull: return p[0] * std::tgamma(1.0 + 1.0 / p[1]);
  }
  throw std::invalid_argument("alt_mean: unknown family");
}

double alt_variance(const AlternativeSpec& spec) {
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Normal: return p[1];
    case Family::MixN: {
      const double m2 = (1.0 - p[0]) * 1.0 + p[0] * (p[2] + p[1] * p[1]);
      const double mean = p[0] * p[1];
      return m2 - mean * mean;
    }
    case Family::StudentT: return p[0] / (p[0] - 2.0);
    case Family::Uniform: return 1.0;
    case Family::ChiSq: return 2.0 * p[0];
    case Family::Beta: {
      const double s = p[0] + p[1];
      return p[0] * p[1] / (s * s * (s + 1.0));
    }
    case Family::Gamma: return p[0] * p[1] * p[1];
    case Family::Gumbel: return p[1] * p[1] * kPi * kPi / 6.0;
    case Family::LogNormal:
      return (std::exp(p[1]) - 1.0) * std::exp(2.0 * p[0] + p[1]);
    case Family::Weibull: {
      const double g1 = std::tgamma(1.0 + 1.0 / p[1]);
      const double g2 = std::tgamma(1.0 + 2.0 / p[1]);
      return p[0] * p[0] * (g2 - g1 * g1);
    }
  }
  throw std::invalid_argument("alt_variance: unknown family");
}

double alt_density(const AlternativeSpec& spec, double x) {
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Normal: {
      const double sd = std::sqrt(p[1]);
      return numerics::std_normal_pdf((x - p[0]) / sd) / sd;
    }
    case Family::MixN: {
      const double sd = std::sqrt(p[2]);
      return (1.0 - p[0]) * numerics::std_normal_pdf(x) +
             p[0] * numerics::std_normal_pdf((x - p[1]) / sd) / sd;
    }
    case Family::StudentT: {
      const double nu = p[0];
      const double logc = std::lgamma(0.5 * (nu + 1.0)) -
                          std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * kPi);
      return std::exp(logc -
                      0.5 * (nu + 1.0) * std::log1p(x * x / nu));
    }
    case Family::Uniform:
      return (x > -kSqrt3 && x < kSqrt3) ? 1.0 / (2.0 * kSqrt3) : 0.0;
    case Family::ChiSq: {
      if (x <= 0.0) return 0.0;
      const double k2 = 0.5 * p[0];
      return std::exp((k2 - 1.0) * std::log(x) - 0.5 * x -
                      k2 * std::log(2.0) - std::lgamma(k2));
    }
    case Family::Beta: {
      if (x <= 0.0 || x >= 1.0) return 0.0;
      return std::exp((p[0] - 1.0) * std::log(x) +
                      (p[1] - 1.0) * std::log1p(-x) - log_beta(p[0], p[1]));
    }
    case Family::Gamma: {
      if (x <= 0.0) return 0.0;
      return std::exp((p[0] - 1.0) * std::log(x) - x / p[1] -
                      p[0] * std::log(p[1]) - std::lgamma(p[0]));
    }
    case Family::Gumbel: {
      const double z = (x - p[0]) / p[1];
      return std::exp(-z - std::exp(-z)) / p[1];
    }
    case Family::LogNormal: {
      if (x <= 0.0) return 0.0;
      const double sd = std::sqrt(p[1]);
      const double z = (std::log(x) - p[0]) / sd;
      return numerics::std_normal_pdf(z) / (x * sd);
    }
    case Family::Weibull: {
      if (x <= 0.0) return 0.0;
      const double z = x / p[0];
      return p[1] / p[0] * std::pow(z, p[1] - 1.0) *
             std::exp(-std::pow(z, p[1]));
    }
  }
  throw std::invalid_argument("alt_density: unknown family");
}

double alt_cdf(const AlternativeSpec& spec, double x) {
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Normal:
      return numerics::std_normal_cdf((x - p[0]) / std::sqrt(p[1]));
    case Family::MixN:
      return (1.0 - p[0]) * numerics::std_normal_cdf(x) +
             p[0] * numerics::std_normal_cdf((x - p[1]) / std::sqrt(p[2]));
    case Family::StudentT:
      return student_t_cdf(p[0], x);
    case Family::Uniform:
      return std::clamp((x + kSqrt3) / (2.0 * kSqrt3), 0.0, 1.0);
    case Family::ChiSq:
      return x <= 0.0 ? 0.0 : numerics::regularized_gamma_p(0.5 * p[0],
                                                            0.5 * x);
    case Family::Beta:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return numerics::regularized_beta(p[0], p[1], x);
    case Family::Gamma:
      return x <= 0.0 ? 0.0
                      : numerics::regularized_gamma_p(p[0], x / p[1]);
    case Family::Gumbel:
      return std::exp(-std::exp(-(x - p[0]) / p[1]));
    case Family::LogNormal:
      return x <= 0.0 ? 0.0
                      : numerics::std_normal_cdf((std::log(x) - p[0]) /
                                                 std::sqrt(p[1]));
    case Family::Weibull:
      return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / p[0], p[1]));
  }
  throw std::invalid_argument("alt_cdf: unknown family");
}

Eigen::VectorXd sample(const AlternativeSpec& spec, RandomStream& stream,
                       Eigen::Index n) {
  const auto& p = spec.params;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = 0.0;
    switch (spec.family) {
      case Family::Normal:
        x = p[0] + std::sqrt(p[1]) * normal_draw(stream);
        break;
      case Family::MixN: {
        const bool second = stream.unit() < p[0];
        const double z = normal_draw(stream);
        x = second ? p[1] + std::sqrt(p[2]) * z : z;
        break;
      }
      case Family::StudentT: {
        const double z = normal_draw(stream);
        const double v = gamma_draw(stream, 0.5 * p[0], 2.0);
        x = z / std::sqrt(v / p[0]);
        break;
      }
      case Family::Uniform:
        x = (2.0 * stream.unit() - 1.0) * kSqrt3;
        break;
      case Family::ChiSq:
        x = gamma_draw(stream, 0.5 * p[0], 2.0);
        break;
      case Family::Beta: {
        const double g1 = gamma_draw(stream, p[0], 1.0);
        const double g2 = gamma_draw(stream, p[1], 1.0);
        x = g1 / (g1 + g2);
        break;
      }
      case Family::Gamma:
        x = gamma_draw(stream, p[0], p[1]);
        break;
      case Family::Gumbel:
        x = p[0] - p[1] * std::log(-std::log(stream.unit()));
        break;
      case Family::LogNormal:
        x = std::exp(p[0] + std::sqrt(p[1]) * normal_draw(stream));
        break;
      case Family::Weibull:
        x = p[0] * std::pow(-std::log(stream.unit()), 1.0 / p[1]);
        break;
    }
    out[i] = x;
  }
  return out;
}

zerobias::DistributionModel to_model(const AlternativeSpec& spec) {
  validate(spec);
  zerobias::DistributionModel model;
  model.name = format_alternative(spec);
  model.density = [spec](double x) { return alt_density(spec, x); };
  model.cdf = [spec](double x) { return alt_cdf(spec, x); };
  model.mean = alt_mean(spec);
  model.variance = alt_variance(spec);
  const double inf = std::numeric_limits<double>::infinity();
  switch (spec.family) {
    case Family::Uniform:
      model.support_lo = -kSqrt3;
      model.support_hi = kSqrt3;
      break;
    case Family::Beta:
      model.support_lo = 0.0;
      model.support_hi = 1.0;
      break;
    case Family::ChiSq:
    case Family::Gamma:
    case Family::LogNormal:
    case Family::Weibull:
      model.support_lo = 0.0;
      model.support_hi = inf;
      break;
    default:
      model.support_lo = -inf;
      model.support_hi = inf;
      break;
  }
  return model;
}

}  // namespace zbtest::alternatives
