// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_MONTECARLO_HPP
#define ZBTEST_MONTECARLO_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zbtest/alternatives.hpp"
#include "zbtest/random.hpp"
#include "zbtest/statistics.hpp"
#include "zbtest/tables.hpp"

namespace zbtest::montecarlo {

// One statistic to simulate.  g1/g2 sweep the plan's tuning_grid; bhep and
// hjg use `beta` as their fixed tuning; bcmr has none.
struct PlanStatistic {
  StatisticKind kind = StatisticKind::G2;
  double beta = 0.0;
};

struct SimulationPlan {
  long replications = 0;
  std::vector<int> sample_sizes;
  std::vector<double> tuning_grid;  // weight variances a for g1/g2
  std::vector<double> alpha_levels;
  std::vector<PlanStatistic> statistics;
  std::uint64_t master_seed = 0;
};

// Throws std::invalid_argument on: replications < 100, empty or invalid
// sample sizes (each must be >= 2), alphas outside (0, 1), empty statistic
// list, nonpositive tuning values, or a g1/g2 entry with an empty
// tuning_grid.
void validate_plan(const SimulationPlan& plan);

// Draws one sample of size n using only `stream`.  The default samples the
// standard normal; tests can substitute degenerate samplers.
using NullSampler =
    std::function<Eigen::VectorXd(RandomStream& stream, Eigen::Index n)>;

// The substream that drives replication `rep` of a null cell.  Every
// replication is addressed by content (seed, statistic, n, tuning, rep),
// never by schedule, so results do not depend on the worker count and a
// cell simulates identically inside any plan.
RandomStream cell_replication_stream(std::uint64_t master_seed,
                                     StatisticKind kind, double tuning, int n,
                                     long rep);

// k-th smallest with k = ceil(q * size): the empirical q-quantile used for
// critical values.  Throws on empty input or q outside (0, 1).
double empirical_quantile(std::vector<double> values, double q);

// Simulates every (statistic, tuning, n) cell of the plan under the null
// and stores the empirical (1 - alpha)-quantiles for all alpha levels.
// Degenerate samples are redrawn from the replication's next substream,
// counted (optional out-parameter), and noted on std::clog.
CriticalValueTable simulate_critical_values(const SimulationPlan& plan,
                                            const NullSampler& sampler = {},
                                            long* degenerate_redraws = nullptr);

// Rejection rate of the level-alpha tests from `table` under each sampled
// alternative, for every (statistic, tuning, n) cell of the plan.  Throws
// MissingCriticalValueError (naming the cell) when the table lacks a cell.
PowerTable simulate_power(const SimulationPlan& plan,
                          const std::vector<alternatives::AlternativeSpec>& alts,
                          const CriticalValueTable& table, double alpha,
                          long* degenerate_redraws = nullptr);

// (1 + #{null draws >= value}) / (1 + replications); the null draws are
// the same ones simulate_critical_values produces for this cell and seed.
double estimate_pvalue(StatisticKind kind, double tuning, int n, double value,
                       long replications, std::uint64_t master_seed,
                       const NullSampler& sampler = {});

// CSV with header statistic,a,n,alpha,quantile,replications,seed in
// canonical order; doubles use shortest round-trip form, so writing,
// reading, and writing again is byte-identical.
std::string critical_values_to_csv(const CriticalValueTable& table);
CriticalValueTable critical_values_from_csv(const std::string& text);

// JSON mirror of the CSV content: {"critical_values": [{...}, ...]}.
std::string critical_values_to_json(const CriticalValueTable& table);
CriticalValueTable critical_values_from_json(const std::string& text);

// CSV with header alternative,statistic,param,n,rate,replications,seed.
std::string power_to_csv(const PowerTable& table);
PowerTable power_from_csv(const std::string& text);

// JSON mirror: {"power": [{...}, ...]}.
std::string power_to_json(const PowerTable& table);
PowerTable power_from_json(const std::string& text);

}  // namespace zbtest::montecarlo

#endif  // ZBTEST_MONTECARLO_HPP
