// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_ALTERNATIVES_HPP
#define ZBTEST_ALTERNATIVES_HPP

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

#include "zbtest/random.hpp"
#include "zbtest/zerobias.hpp"

namespace zbtest::alternatives {

enum class Family {
  Normal,     // normal(mu, sigma2)
  MixN,       // mixn(p, mu, sigma2): (1-p) N(0,1) + p N(mu, sigma2)
  StudentT,   // t(nu), nu > 2
  Uniform,    // uniform: U(-sqrt 3, sqrt 3), already standardized
  ChiSq,      // chisq(k)
  Beta,       // beta(alpha, beta) on (0, 1)
  Gamma,      // gamma(shape, scale)
  Gumbel,     // gumbel(location, scale)
  LogNormal,  // lognormal(mu, sigma2) of the underlying normal
  Weibull,    // weibull(scale, shape)
};

struct AlternativeSpec {
  Family family = Family::Normal;
  std::vector<double> params;
};

// Parses the CLI form, e.g. "t(3)", "mixn(0.3,1,0.25)", "uniform".
// Throws std::invalid_argument listing the catalog on an unknown family
// name, wrong parameter count, or out-of-domain parameters.
AlternativeSpec parse_alternative(std::string_view text);

// Canonical CLI form of the spec (inverse of parse_alternative).
std::string format_alternative(const AlternativeSpec& spec);

// The standard catalog: one spec per sampled alternative in the power
// study, in the order the study reports them.
const std::vector<AlternativeSpec>& catalog();

// Catalog entries in CLI form, for error messages and help text.
std::vector<std::string> catalog_names();

double alt_mean(const AlternativeSpec& spec);
double alt_variance(const AlternativeSpec& spec);
double alt_density(const AlternativeSpec& spec, double x);
double alt_cdf(const AlternativeSpec& spec, double x);

// Draws n observations using only `stream` for randomness.  Sampling is
// sequential, so a given stream state yields one fixed sample.
Eigen::VectorXd sample(const AlternativeSpec& spec, RandomStream& stream,
                       Eigen::Index n);

// Density/CDF bundle for the transformed-law machinery (not standardized;
// pass through zerobias::standardize for the fixed-alternative limits).
zerobias::DistributionModel to_model(const AlternativeSpec& spec);

}  // namespace zbtest::alternatives

#endif  // ZBTEST_ALTERNATIVES_HPP
