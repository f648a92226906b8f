// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_TABLES_HPP
#define ZBTEST_TABLES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zbtest {

enum class StatisticKind { G1, G2, BHEP, HJG, BCMR };

// Lowercase identifier used in CLI flags and table files.
std::string_view statistic_name(StatisticKind kind);
std::optional<StatisticKind> parse_statistic(std::string_view name);

// True for the statistics whose tuning parameter is the weight variance a;
// false for the competitor statistics (tuning is beta, or unused for bcmr).
inline bool uses_weight_tuning(StatisticKind kind) {
  return kind == StatisticKind::G1 || kind == StatisticKind::G2;
}

// One simulated null quantile plus its provenance.  `tuning` holds the
// weight variance a for g1/g2, beta for bhep/hjg, and 0 for bcmr.
struct CriticalValueEntry {
  StatisticKind kind = StatisticKind::G2;
  double tuning = 1.0;
  int n = 0;
  double alpha = 0.05;
  double quantile = 0.0;
  long replications = 0;
  std::uint64_t seed = 0;
};

struct CriticalValueTable {
  std::vector<CriticalValueEntry> entries;

  // Exact-cell lookup (n integral, tuning and alpha within 1e-9).
  // Throws MissingCriticalValueError naming the nearest available (n,
  // tuning) cell for the statistic; tables are never interpolated.
  const CriticalValueEntry& lookup(StatisticKind kind, double tuning, int n,
                                   double alpha) const;

  // Insert or replace the cell with the same (kind, tuning, n, alpha).
  void upsert(const CriticalValueEntry& entry);

  // Sort by (statistic, tuning, n, alpha); file writers emit this order so
  // output bytes do not depend on insertion order.
  void sort_canonical();
};

// One power (rejection rate) cell for a sampled alternative.
struct PowerEntry {
  std::string alternative;
  StatisticKind kind = StatisticKind::G2;
  double tuning = 1.0;
  int n = 0;
  double rate = 0.0;
  long replications = 0;
  std::uint64_t seed = 0;
};

struct PowerTable {
  std::vector<PowerEntry> entries;
  void sort_canonical();
};

}  // namespace zbtest

#endif  // ZBTEST_TABLES_HPP
