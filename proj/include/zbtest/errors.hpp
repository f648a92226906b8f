// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_ERRORS_HPP
#define ZBTEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace zbtest {

// Sample has fewer than two observations.
class TooSmallSampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sample variance is zero (all observations identical).
class DegenerateSampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A distribution model violates its construction contract
// (non-finite moments, variance <= 0, ...).
class InvalidModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature did not reach the requested tolerance within the
// subdivision budget.  Carries the best estimate and its error bound.
class QuadratureFailureError : public std::runtime_error {
 public:
  QuadratureFailureError(const std::string& what, double best, double bound)
      : std::runtime_error(what), best_estimate(best), error_bound(bound) {}
  double best_estimate;
  double error_bound;
};

// Critical-value lookup failed; names the nearest tabulated cell.
class MissingCriticalValueError : public std::runtime_error {
 public:
  MissingCriticalValueError(const std::string& what, int nearest_n,
                            double nearest_tuning)
      : std::runtime_error(what),
        nearest_n(nearest_n),
        nearest_tuning(nearest_tuning) {}
  int nearest_n;
  double nearest_tuning;
};

// The requested quantity degenerates for the given inputs
// (e.g. asymptotic variance of a distance that is identically zero).
class IllPosedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace zbtest

#endif  // ZBTEST_ERRORS_HPP
