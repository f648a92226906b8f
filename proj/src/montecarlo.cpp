// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include "zbtest/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "zbtest/detail/parallel.hpp"
#include "zbtest/errors.hpp"
#include "zbtest/numerics.hpp"

namespace zbtest::montecarlo {

namespace {

constexpr int kMaxRedraws = 64;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RandomStream cell_stream(std::uint64_t master_seed, StatisticKind kind,
                         double tuning, int n) {
  RandomStream master(master_seed);
  return master.child(static_cast<std::uint64_t>(kind))
      .child(static_cast<std::uint64_t>(n))
      .child(std::bit_cast<std::uint64_t>(tuning));
}

Eigen::VectorXd default_null_sample(RandomStream& stream, Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = numerics::std_normal_quantile(stream.unit());
  }
  return out;
}

// Tuning values a statistic contributes to the plan's cell grid.
std::vector<double> tunings_for(const PlanStatistic& stat,
                                const SimulationPlan& plan) {
  if (uses_weight_tuning(stat.kind)) return plan.tuning_grid;
  if (stat.kind == StatisticKind::BCMR) return {0.0};
  return {stat.beta};
}

// One replication value; degenerate samples are redrawn from the
// replication's numbered substreams so retries stay content-addressed.
double replication_value(const RandomStream& rep_stream,
                         const NullSampler& sampler, StatisticKind kind,
                         double tuning, int n, long rep,
                         std::atomic<long>& redraws) {
  for (int attempt = 0;; ++attempt) {
    RandomStream s = attempt == 0
                         ? rep_stream
                         : rep_stream.child(static_cast<std::uint64_t>(attempt));
    try {
      const auto sample = sampler(s, n);
      const auto residuals = statistics::scaled_residuals(sample);
      return statistics::evaluate_statistic(kind, residuals, tuning);
    } catch (const DegenerateSampleError&) {
      if (attempt + 1 >= kMaxRedraws) throw;
      redraws.fetch_add(1);
      std::clog << "note: degenerate sample for statistic="
                << statistic_name(kind) << " a=" << tuning << " n=" << n
                << " replication=" << rep << "; redrawn (attempt "
                << attempt + 1 << ")\n";
    }
  }
}

std::vector<double> simulate_cell(const SimulationPlan& plan,
                                  const NullSampler& sampler,
                                  StatisticKind kind, double tuning, int n,
                                  std::atomic<long>& redraws) {
  const auto count = static_cast<std::size_t>(plan.replications);
  std::vector<double> values(count);
  detail::parallel_for(count, [&](std::size_t i) {
    const auto rep = static_cast<long>(i);
    const RandomStream rep_stream =
        cell_replication_stream(plan.master_seed, kind, tuning, n, rep);
    values[i] = replication_value(rep_stream, sampler, kind, tuning, n, rep,
                                  redraws);
  });
  return values;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(std::string_view token, const char* what) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(),
                                   out);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" +
                                std::string(token) + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view token, const char* what) {
  Int out = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(),
                                   out);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" +
                                std::string(token) + "'");
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(line.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return fields;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

StatisticKind parse_statistic_or_throw(const std::string& token) {
  const auto kind = parse_statistic(token);
  if (!kind) {
    throw std::invalid_argument("unknown statistic '" + token + "'");
  }
  return *kind;
}

}  // namespace

void validate_plan(const SimulationPlan& plan) {
  if (plan.replications < 100) {
    throw std::invalid_argument("plan: replications must be >= 100, got " +
                                std::to_string(plan.replications));
  }
  if (plan.sample_sizes.empty()) {
    throw std::invalid_argument("plan: sample_sizes must be nonempty");
  }
  for (int n : plan.sample_sizes) {
    if (n < 2) {
      throw std::invalid_argument("plan: sample sizes must be >= 2, got " +
                                  std::to_string(n));
    }
  }
  if (plan.alpha_levels.empty()) {
    throw std::invalid_argument("plan: alpha_levels must be nonempty");
  }
  for (double alpha : plan.alpha_levels) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
      throw std::invalid_argument("plan: alpha levels must lie in (0, 1)");
    }
  }
  if (plan.statistics.empty()) {
    throw std::invalid_argument("plan: statistics must be nonempty");
  }
  for (const auto& stat : plan.statistics) {
    if (uses_weight_tuning(stat.kind)) {
      if (plan.tuning_grid.empty()) {
        throw std::invalid_argument(
            "plan: tuning_grid must be nonempty for g1/g2");
      }
    } else if (stat.kind == StatisticKind::BHEP) {
      if (!(stat.beta > 0.0)) {
        throw std::invalid_argument("plan: bhep needs beta > 0");
      }
    } else if (stat.kind == StatisticKind::HJG) {
      if (!(stat.beta > 2.0)) {
        throw std::invalid_argument("plan: hjg needs beta > 2");
      }
    }
  }
  for (double a : plan.tuning_grid) {
    if (!(a > 0.0)) {
      throw std::invalid_argument("plan: tuning values must be positive");
    }
  }
}

RandomStream cell_replication_stream(std::uint64_t master_seed,
                                     StatisticKind kind, double tuning, int n,
                                     long rep) {
  return cell_stream(master_seed, kind, tuning, n)
      .child(static_cast<std::uint64_t>(rep));
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("empirical_quantile: empty input");
  }
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument("empirical_quantile: q must lie in (0, 1)");
  }
  const double m = q * static_cast<double>(values.size());
  auto k = static_cast<long>(std::ceil(m - 1e-9));
  k = std::clamp<long>(k, 1, static_cast<long>(values.size()));
  auto nth = values.begin() + (k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

CriticalValueTable simulate_critical_values(const SimulationPlan& plan,
                                            const NullSampler& sampler,
                                            long* degenerate_redraws) {
  validate_plan(plan);
  const NullSampler& draw = sampler ? sampler : default_null_sample;
  std::atomic<long> redraws{0};
  CriticalValueTable table;
  for (const auto& stat : plan.statistics) {
    for (double tuning : tunings_for(stat, plan)) {
      for (int n : plan.sample_sizes) {
        const auto values =
            simulate_cell(plan, draw, stat.kind, tuning, n, redraws);
        for (double alpha : plan.alpha_levels) {
          CriticalValueEntry entry;
          entry.kind = stat.kind;
          entry.tuning = tuning;
          entry.n = n;
          entry.alpha = alpha;
          entry.quantile = empirical_quantile(values, 1.0 - alpha);
          entry.replications = plan.replications;
          entry.seed = plan.master_seed;
          table.upsert(entry);
        }
      }
    }
  }
  table.sort_canonical();
  if (degenerate_redraws != nullptr) *degenerate_redraws = redraws.load();
  return table;
}

PowerTable simulate_power(const SimulationPlan& plan,
                          const std::vector<alternatives::AlternativeSpec>& alts,
                          const CriticalValueTable& table, double alpha,
                          long* degenerate_redraws) {
  validate_plan(plan);
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("simulate_power: alpha must lie in (0, 1)");
  }
  std::atomic<long> redraws{0};
  PowerTable out;
  for (const auto& spec : alts) {
    const std::string name = alternatives::format_alternative(spec);
    const std::uint64_t alt_hash = fnv1a(name);
    for (const auto& stat : plan.statistics) {
      for (double tuning : tunings_for(stat, plan)) {
        for (int n : plan.sample_sizes) {
          const double critical =
              table.lookup(stat.kind, tuning, n, alpha).quantile;
          const auto count = static_cast<std::size_t>(plan.replications);
          std::vector<unsigned char> rejected(count, 0);
          detail::parallel_for(count, [&](std::size_t i) {
            const auto rep = static_cast<long>(i);
            const RandomStream rep_stream =
                cell_stream(plan.master_seed, stat.kind, tuning, n)
                    .child(alt_hash)
                    .child(static_cast<std::uint64_t>(rep));
            auto alt_sampler = [&spec](RandomStream& s, Eigen::Index size) {
              return alternatives::sample(spec, s, size);
            };
            const double value = replication_value(
                rep_stream, alt_sampler, stat.kind, tuning, n, rep, redraws);
            rejected[i] = value > critical ? 1 : 0;
          });
          long hits = 0;
          for (unsigned char r : rejected) hits += r;
          PowerEntry entry;
          entry.alternative = name;
          entry.kind = stat.kind;
          entry.tuning = tuning;
          entry.n = n;
          entry.rate = static_cast<double>(hits) /
                       static_cast<double>(plan.replications);
          entry.replications = plan.replications;
          entry.seed = plan.master_seed;
          out.entries.push_back(entry);
        }
      }
    }
  }
  out.sort_canonical();
  if (degenerate_redraws != nullptr) *degenerate_redraws = redraws.load();
  return out;
}

double estimate_pvalue(StatisticKind kind, double tuning, int n, double value,
                       long replications, std::uint64_t master_seed,
                       const NullSampler& sampler) {
  if (replications < 1) {
    throw std::invalid_argument("estimate_pvalue: replications must be >= 1");
  }
  if (n < 2) {
    throw TooSmallSampleError("estimate_pvalue: need n >= 2");
  }
  const NullSampler& draw = sampler ? sampler : default_null_sample;
  std::atomic<long> redraws{0};
  const auto count = static_cast<std::size_t>(replications);
  std::vector<unsigned char> at_least(count, 0);
  detail::parallel_for(count, [&](std::size_t i) {
    const auto rep = static_cast<long>(i);
    const RandomStream rep_stream =
        cell_replication_stream(master_seed, kind, tuning, n, rep);
    const double v =
        replication_value(rep_stream, draw, kind, tuning, n, rep, redraws);
    at_least[i] = v >= value ? 1 : 0;
  });
  long hits = 0;
  for (unsigned char r : at_least) hits += r;
  return static_cast<double>(1 + hits) /
         static_cast<double>(1 + replications);
}

std::string critical_values_to_csv(const CriticalValueTable& table) {
  CriticalValueTable sorted = table;
  sorted.sort_canonical();
  std::string out = "statistic,a,n,alpha,quantile,replications,seed\n";
  for (const auto& e : sorted.entries) {
    out += std::string(statistic_name(e.kind)) + ',' +
           format_double(e.tuning) + ',' + std::to_string(e.n) + ',' +
           format_double(e.alpha) + ',' + format_double(e.quantile) + ',' +
           std::to_string(e.replications) + ',' + std::to_string(e.seed) +
           '\n';
  }
  return out;
}

CriticalValueTable critical_values_from_csv(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty() ||
      lines[0] != "statistic,a,n,alpha,quantile,replications,seed") {
    throw std::invalid_argument(
        "critical value CSV must start with header "
        "statistic,a,n,alpha,quantile,replications,seed");
  }
  CriticalValueTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 7) {
      throw std::invalid_argument("critical value CSV row " +
                                  std::to_string(i) + " must have 7 fields");
    }
    CriticalValueEntry e;
    e.kind = parse_statistic_or_throw(fields[0]);
    e.tuning = parse_double(fields[1], "a");
    e.n = parse_int<int>(fields[2], "n");
    e.alpha = parse_double(fields[3], "alpha");
    e.quantile = parse_double(fields[4], "quantile");
    e.replications = parse_int<long>(fields[5], "replications");
    e.seed = parse_int<std::uint64_t>(fields[6], "seed");
    table.entries.push_back(e);
  }
  return table;
}

std::string critical_values_to_json(const CriticalValueTable& table) {
  CriticalValueTable sorted = table;
  sorted.sort_canonical();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : sorted.entries) {
    rows.push_back({{"statistic", std::string(statistic_name(e.kind))},
                    {"a", e.tuning},
                    {"n", e.n},
                    {"alpha", e.alpha},
                    {"quantile", e.quantile},
                    {"replications", e.replications},
                    {"seed", e.seed}});
  }
  nlohmann::json doc;
  doc["critical_values"] = rows;
  return doc.dump(2) + "\n";
}

CriticalValueTable critical_values_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  CriticalValueTable table;
  for (const auto& row : doc.at("critical_values")) {
    CriticalValueEntry e;
    e.kind = parse_statistic_or_throw(row.at("statistic").get<std::string>());
    e.tuning = row.at("a").get<double>();
    e.n = row.at("n").get<int>();
    e.alpha = row.at("alpha").get<double>();
    e.quantile = row.at("quantile").get<double>();
    e.replications = row.at("replications").get<long>();
    e.seed = row.at("seed").get<std::uint64_t>();
    table.entries.push_back(e);
  }
  return table;
}

std::string power_to_csv(const PowerTable& table) {
  PowerTable sorted = table;
  sorted.sort_canonical();
  std::string out = "alternative,statistic,param,n,rate,replications,seed\n";
  for (const auto& e : sorted.entries) {
    out += e.alternative + ',' + std::string(statistic_name(e.kind)) + ',' +
           format_double(e.tuning) + ',' + std::to_string(e.n) + ',' +
           format_double(e.rate) + ',' + std::to_string(e.replications) +
           ',' + std::to_string(e.seed) + '\n';
  }
  return out;
}

PowerTable power_from_csv(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty() ||
      lines[0] != "alternative,statistic,param,n,rate,replications,seed") {
    throw std::invalid_argument(
        "power CSV must start with header "
        "alternative,statistic,param,n,rate,replications,seed");
  }
  PowerTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 7) {
      throw std::invalid_argument("power CSV row " + std::to_string(i) +
                                  " must have 7 fields");
    }
    PowerEntry e;
    e.alternative = fields[0];
    e.kind = parse_statistic_or_throw(fields[1]);
    e.tuning = parse_double(fields[2], "param");
    e.n = parse_int<int>(fields[3], "n");
    e.rate = parse_double(fields[4], "rate");
    e.replications = parse_int<long>(fields[5], "replications");
    e.seed = parse_int<std::uint64_t>(fields[6], "seed");
    table.entries.push_back(e);
  }
  return table;
}

std::string power_to_json(const PowerTable& table) {
  PowerTable sorted = table;
  sorted.sort_canonical();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : sorted.entries) {
    rows.push_back({{"alternative", e.alternative},
                    {"statistic", std::string(statistic_name(e.kind))},
                    {"param", e.tuning},
                    {"n", e.n},
                    {"rate", e.rate},
                    {"replications", e.replications},
                    {"seed", e.seed}});
  }
  nlohmann::json doc;
  doc["power"] = rows;
  return doc.dump(2) + "\n";
}

PowerTable power_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  PowerTable table;
  for (const auto& row : doc.at("power")) {
    PowerEntry e;
    e.alternative = row.at("alternative").get<std::string>();
    e.kind = parse_statistic_or_throw(row.at("statistic").get<std::string>());
    e.tuning = row.at("param").get<double>();
    e.n = row.at("n").get<int>();
    e.rate = row.at("rate").get<double>();
    e.replications = row.at("replications").get<long>();
    e.seed = row.at("seed").get<std::uint64_t>();
    table.entries.push_back(e);
  }
  return table;
}

}  // namespace zbtest::montecarlo
