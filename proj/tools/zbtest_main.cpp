// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zbtest/asymptotics.hpp"
#include "zbtest/errors.hpp"
#include "zbtest/montecarlo.hpp"
#include "zbtest/statistics.hpp"
#include "zbtest/zerobias.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 20260822ull;

const char kBundledTableCsv[] =
#include "bundled_table.inc"
    ;  // NOLINT

zbtest::CriticalValueTable bundled_table() {
  return zbtest::montecarlo::critical_values_from_csv(kBundledTableCsv);
}

zbtest::CriticalValueTable load_table(const std::string& path) {
  if (path.empty()) return bundled_table();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open table file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return zbtest::montecarlo::critical_values_from_json(text);
  }
  return zbtest::montecarlo::critical_values_from_csv(text);
}

Eigen::VectorXd read_sample(const std::string& path) {
  std::string text;
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  for (char& c : text) {
    if (c == ',' || c == '\t' || c == '\r' || c == '\n') c = ' ';
  }
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    auto end = text.find(' ', pos);
    if (end == std::string::npos) end = text.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, v);
    if (ec != std::errc{} || ptr != text.data() + end) {
      throw std::invalid_argument("cannot parse numeral '" +
                                  text.substr(pos, end - pos) + "'");
    }
    values.push_back(v);
    pos = end;
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = values[i];
  }
  return out;
}

std::string strip_table_extension(const std::string& path) {
  for (const char* ext : {".csv", ".json"}) {
    const std::size_t len = std::string(ext).size();
    if (path.size() > len && path.substr(path.size() - len) == ext) {
      return path.substr(0, path.size() - len);
    }
  }
  return path;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

double resolve_tuning(zbtest::StatisticKind kind, double a, double beta,
                      bool beta_given) {
  using zbtest::StatisticKind;
  switch (kind) {
    case StatisticKind::G1:
    case StatisticKind::G2:
      return a;
    case StatisticKind::BHEP:
      return beta_given ? beta : 1.0;
    case StatisticKind::HJG:
      return beta_given ? beta : 5.0;
    case StatisticKind::BCMR:
      return 0.0;
  }
  return a;
}

zbtest::StatisticKind parse_stat_flag(const std::string& name) {
  const auto kind = zbtest::parse_statistic(name);
  if (!kind) {
    throw std::invalid_argument(
        "unknown statistic '" + name + "'; choose one of g1, g2, bhep, hjg, "
        "bcmr");
  }
  return *kind;
}

int cmd_test(const std::string& data_path, const std::string& stat_name,
             double a, double beta, bool beta_given, double alpha,
             const std::string& table_path, long reps, std::uint64_t seed,
             const std::string& format) {
  const auto kind = parse_stat_flag(stat_name);
  const double tuning = resolve_tuning(kind, a, beta, beta_given);
  const auto sample = read_sample(data_path);
  const auto table = load_table(table_path);
  auto report = zbtest::statistics::run_test(
      sample, kind, zbtest::statistics::TuningParameter{tuning}, alpha, table);
  if (reps > 0) {
    report.p_value = zbtest::montecarlo::estimate_pvalue(
        kind, tuning, static_cast<int>(report.n), report.value, reps, seed);
  }
  if (format == "json") {
    nlohmann::json doc{
        {"statistic", std::string(zbtest::statistic_name(report.kind))},
        {"a", report.tuning},
        {"n", report.n},
        {"value", report.value},
        {"alpha", report.alpha},
        {"critical_value", report.critical_value},
        {"reject", report.reject},
        {"table", {{"replications", report.table_replications},
                   {"seed", report.table_seed}}}};
    if (report.p_value) {
      doc["p_value"] = *report.p_value;
    } else {
      doc["p_value"] = nullptr;
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "statistic: " << zbtest::statistic_name(report.kind);
    if (kind == zbtest::StatisticKind::G1 || kind == zbtest::StatisticKind::G2) {
      std::cout << " (a = " << report.tuning << ")";
    } else if (kind != zbtest::StatisticKind::BCMR) {
      std::cout << " (beta = " << report.tuning << ")";
    }
    std::cout << "\nn: " << report.n << "\nvalue: " << report.value
              << "\ncritical value: " << report.critical_value
              << " (alpha = " << report.alpha << ", "
              << report.table_replications << " replications, seed "
              << report.table_seed << ")\n";
    if (report.p_value) std::cout << "p-value: " << *report.p_value << "\n";
    std::cout << "decision: "
              << (report.reject ? "reject normality" : "accept normality")
              << "\n";
  }
  return report.reject ? 1 : 0;
}

void write_both_formats(const std::string& out_path, const std::string& csv,
                        const std::string& json) {
  const std::string base = strip_table_extension(out_path);
  write_file(base + ".csv", csv);
  write_file(base + ".json", json);
}

int cmd_critical_values(const std::vector<std::string>& stat_names,
                        std::vector<int> sizes, std::vector<double> tunings,
                        std::vector<double> alphas, long reps,
                        std::uint64_t seed, double beta, bool beta_given,
                        const std::string& out_path,
                        const std::string& format) {
  zbtest::montecarlo::SimulationPlan plan;
  plan.replications = reps;
  plan.sample_sizes = std::move(sizes);
  plan.tuning_grid = std::move(tunings);
  plan.alpha_levels = std::move(alphas);
  plan.master_seed = seed;
  for (const auto& name : stat_names) {
    const auto kind = parse_stat_flag(name);
    zbtest::montecarlo::PlanStatistic stat;
    stat.kind = kind;
    stat.beta = resolve_tuning(kind, 0.0, beta, beta_given);
    plan.statistics.push_back(stat);
  }
  const auto table = zbtest::montecarlo::simulate_critical_values(plan);
  const auto csv = zbtest::montecarlo::critical_values_to_csv(table);
  const auto json = zbtest::montecarlo::critical_values_to_json(table);
  if (!out_path.empty()) {
    write_both_formats(out_path, csv, json);
  } else {
    std::cout << (format == "json" ? json : csv);
  }
  return 0;
}

int cmd_power(const std::vector<std::string>& alt_names,
              const std::vector<std::string>& stat_names,
              std::vector<int> sizes, std::vector<double> tunings,
              double alpha, long reps, std::uint64_t seed, double beta,
              bool beta_given, const std::string& table_path,
              const std::string& out_path, const std::string& format) {
  std::vector<zbtest::alternatives::AlternativeSpec> alts;
  for (const auto& name : alt_names) {
    alts.push_back(zbtest::alternatives::parse_alternative(name));
  }
  zbtest::montecarlo::SimulationPlan plan;
  plan.replications = reps;
  plan.sample_sizes = std::move(sizes);
  plan.tuning_grid = std::move(tunings);
  plan.alpha_levels = {alpha};
  plan.master_seed = seed;
  for (const auto& name : stat_names) {
    const auto kind = parse_stat_flag(name);
    zbtest::montecarlo::PlanStatistic stat;
    stat.kind = kind;
    stat.beta = resolve_tuning(kind, 0.0, beta, beta_given);
    plan.statistics.push_back(stat);
  }
  const auto table = load_table(table_path);
  const auto power =
      zbtest::montecarlo::simulate_power(plan, alts, table, alpha);
  const auto csv = zbtest::montecarlo::power_to_csv(power);
  const auto json = zbtest::montecarlo::power_to_json(power);
  if (!out_path.empty()) {
    write_both_formats(out_path, csv, json);
  } else {
    std::cout << (format == "json" ? json : csv);
  }
  return 0;
}

int cmd_asymptotics(const std::string& model_name, int k, double a, long reps,
                    std::uint64_t seed, long n, double alpha,
                    const std::string& table_path, const std::string& format) {
  const auto spec = zbtest::alternatives::parse_alternative(model_name);
  const auto model =
      zbtest::zerobias::standardize(zbtest::alternatives::to_model(spec));
  const zbtest::numerics::QuadratureConfig cfg;
  const auto law = zbtest::zerobias::zero_bias_law(model, std::sqrt(a), cfg);
  const double dist = zbtest::asymptotics::delta(k, model, law, a, cfg);

  std::optional<std::pair<double, double>> tau;
  std::string note;
  if (dist < 1e-8) {
    note = "the weighted distance is numerically zero (the model is the "
           "fixed point); tau^2 is undefined and was not computed";
  } else {
    zbtest::RandomStream stream(seed);
    tau = zbtest::asymptotics::tau_squared(k, model, law, a, reps, stream,
                                           cfg);
  }

  std::optional<double> critical, power, half_width;
  if (n > 0 && tau) {
    const auto table = load_table(table_path);
    const auto kind =
        k == 1 ? zbtest::StatisticKind::G1 : zbtest::StatisticKind::G2;
    critical = table.lookup(kind, a, static_cast<int>(n), alpha).quantile;
    power = zbtest::asymptotics::approximate_power(dist, tau->first, n,
                                                   *critical);
    const auto ci = zbtest::asymptotics::confidence_interval(
        dist * static_cast<double>(n), n, tau->first, alpha);
    half_width = 0.5 * (ci.hi - ci.lo);
  }

  if (format == "json") {
    nlohmann::json doc{{"model", zbtest::alternatives::format_alternative(spec)},
                       {"k", k},
                       {"a", a},
                       {"delta", dist}};
    if (tau) {
      doc["tau_squared"] = tau->first;
      doc["mc_std_error"] = tau->second;
      doc["mc_replications"] = reps;
    } else {
      doc["tau_squared"] = nullptr;
      doc["note"] = note;
    }
    if (critical) {
      doc["n"] = n;
      doc["alpha"] = alpha;
      doc["critical_value"] = *critical;
      doc["approximate_power"] = *power;
      doc["ci_half_width"] = *half_width;
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "model: " << zbtest::alternatives::format_alternative(spec)
              << " (standardized)\nk: " << k << "\na: " << a
              << "\ndelta: " << dist << "\n";
    if (tau) {
      std::cout << "tau^2: " << tau->first << " (MC std error " << tau->second
                << ", " << reps << " replications)\n";
    } else {
      std::cout << "tau^2: undefined; " << note << "\n";
    }
    if (critical) {
      std::cout << "critical value (n = " << n << ", alpha = " << alpha
                << "): " << *critical << "\napproximate power: " << *power
                << "\nconfidence half-width: " << *half_width << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normality tests built on the zero-bias transformation"};
  app.require_subcommand(1);

  std::string data_path, stat_name = "g2", table_path, out_path;
  std::string format = "csv", test_format = "text", asym_format = "text";
  std::string model_name;
  std::vector<std::string> stat_names{"g2"}, alt_names;
  std::vector<int> sizes{20, 50, 100};
  std::vector<double> tunings{1.0}, alphas{0.05};
  double a = 1.0, beta = 0.0, alpha = 0.05;
  long reps_test = 0, reps_cv = 100000, reps_power = 10000,
       reps_asym = 100000, n_asym = 0;
  std::uint64_t seed = kDefaultSeed;
  int k = 2;

  auto* test = app.add_subcommand("test", "Test a data file for normality");
  test->add_option("data", data_path,
                   "Data file (newline- or comma-separated; '-' for stdin)")
      ->required();
  test->add_option("--stat", stat_name, "Statistic: g1, g2, bhep, hjg, bcmr");
  test->add_option("--a", a, "Weight variance for g1/g2");
  auto* test_beta = test->add_option("--beta", beta, "Tuning for bhep/hjg");
  test->add_option("--alpha", alpha, "Test level");
  test->add_option("--table", table_path,
                   "Critical value table (.csv or .json); default: bundled");
  test->add_option("--reps", reps_test,
                   "Null replications for a Monte Carlo p-value (0 = none)");
  test->add_option("--seed", seed, "Master seed for the p-value simulation");
  test->add_option("--format", test_format, "Report format: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* cv = app.add_subcommand("critical-values",
                                "Simulate null critical values");
  cv->add_option("--stat", stat_names, "Statistics to simulate");
  cv->add_option("--n", sizes, "Sample sizes");
  cv->add_option("--a", tunings, "Weight variances for g1/g2");
  cv->add_option("--alpha", alphas, "Levels");
  cv->add_option("--reps", reps_cv, "Replications per cell");
  cv->add_option("--seed", seed, "Master seed");
  auto* cv_beta = cv->add_option("--beta", beta, "Tuning for bhep/hjg");
  cv->add_option("--out", out_path,
                 "Output base path; writes both .csv and .json");
  cv->add_option("--format", format, "Stdout format when --out is absent")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* pw = app.add_subcommand("power", "Simulate rejection rates");
  pw->add_option("--alt", alt_names, "Alternatives, e.g. 'chisq(5)'")
      ->required();
  pw->add_option("--stat", stat_names, "Statistics to evaluate");
  pw->add_option("--n", sizes, "Sample sizes");
  pw->add_option("--a", tunings, "Weight variances for g1/g2");
  pw->add_option("--alpha", alpha, "Test level");
  pw->add_option("--reps", reps_power, "Replications per cell");
  pw->add_option("--seed", seed, "Master seed");
  auto* pw_beta = pw->add_option("--beta", beta, "Tuning for bhep/hjg");
  pw->add_option("--table", table_path,
                 "Critical value table (.csv or .json); default: bundled");
  pw->add_option("--out", out_path,
                 "Output base path; writes both .csv and .json");
  pw->add_option("--format", format, "Stdout format when --out is absent")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* as = app.add_subcommand(
      "asymptotics", "Fixed-alternative limit quantities for a model");
  as->add_option("--model", model_name, "Model, e.g. 'uniform' or 't(3)'")
      ->required();
  as->add_option("--k", k, "Statistic family: 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  as->add_option("--a", a, "Weight variance");
  as->add_option("--reps", reps_asym, "Monte Carlo draws for tau^2");
  as->add_option("--seed", seed, "Master seed");
  as->add_option("--n", n_asym,
                 "Sample size for approximate power and CI half-width");
  as->add_option("--alpha", alpha, "Level for approximate power and CI");
  as->add_option("--table", table_path,
                 "Critical value table (.csv or .json); default: bundled");
  as->add_option("--format", asym_format, "Report format: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::ostringstream silenced;
    app.exit(e, silenced, silenced);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (test->parsed()) {
      return cmd_test(data_path, stat_name, a, beta, test_beta->count() > 0,
                      alpha, table_path, reps_test, seed, test_format);
    }
    if (cv->parsed()) {
      return cmd_critical_values(stat_names, sizes, tunings, alphas, reps_cv,
                                 seed, beta, cv_beta->count() > 0, out_path,
                                 format);
    }
    if (pw->parsed()) {
      return cmd_power(alt_names, stat_names, sizes, tunings, alpha,
                       reps_power, seed, beta, pw_beta->count() > 0,
                       table_path, out_path, format);
    }
    if (as->parsed()) {
      return cmd_asymptotics(model_name, k, a, reps_asym, seed, n_asym, alpha,
                             table_path, asym_format);
    }
  } catch (const zbtest::TooSmallSampleError& e) {
    std::cerr << "error: sample too small: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
