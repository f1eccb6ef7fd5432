#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fogsched/model.hpp"
#include "fogsched/schedulers.hpp"
#include "fogsched/workload.hpp"

// Experiment harness: sweep one dimension of the workload (task count, fog
// pool size, or cloud pool size), draw fresh instances per trial, run a set
// of schedulers on identical instances, and aggregate the results.
//
// Reproducibility contract: everything written to a report file is a pure
// function of the experiment spec and its master seed.  Per-trial seeds are
// derived as splitmix64 chains keyed on (master seed, sweep value, trial),
// so results do not depend on sweep order, trial order, or worker count.

namespace fogsched {

enum class SweepVariable { Tasks, Fog, Cloud };

std::string_view to_string(SweepVariable v);  // "tasks" | "fog" | "cloud"
SweepVariable sweep_from_string(std::string_view s);  // throws std::invalid_argument

struct ExperimentSpec {
  std::string name = "custom";
  SweepVariable sweep = SweepVariable::Tasks;
  std::vector<int> sweep_values;

  // Fixed sizes for the dimensions not being swept.
  int tasks = 200;
  int fog_nodes = 30;
  int cloud_nodes = 15;

  int trials = 10;
  std::uint64_t seed = 1;
  std::vector<SchedulerKind> schedulers{
      SchedulerKind::MinCcv, SchedulerKind::MinV, SchedulerKind::RoundRobin,
      SchedulerKind::Random, SchedulerKind::Genetic};
  TaskDistribution task_dist;
  NodeDistribution node_dist;
  GeneticParams genetic;
  CostPolicy policy;
  std::uint64_t budget = kDefaultEnumerationBudget;
  int jobs = 1;  // worker threads for trials; does not affect results
};

void validate(const ExperimentSpec& spec);  // throws std::invalid_argument

// The ready-made sweeps (1, 2, or 3):
//   1: tasks in {50..300 step 50}, 30 fog + 15 cloud nodes;
//   2: fog nodes in {10..50 step 10}, 200 tasks, 15 cloud nodes;
//   3: cloud nodes in {5..25 step 5}, 200 tasks, 30 fog nodes.
ExperimentSpec builtin_experiment(int which);

struct MetricAgg {
  double avg = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct AggregateRow {
  int sweep_value = 0;
  SchedulerKind scheduler = SchedulerKind::MinCcv;
  int trials = 0;  // trials this scheduler completed
  MetricAgg pdst_pct;
  MetricAgg makespan_ms;
  MetricAgg c_viol;
  MetricAgg c_comp;
  MetricAgg c_comm;
  MetricAgg total;
  double mean_wall_ms = 0.0;         // not written to reports by default
  std::uint64_t workload_digest = 0;  // digest of this sweep value's instances
  int cloud_only_trials = 0;  // trials where some task fit only cloud nodes
  int infeasible_trials = 0;  // trials this scheduler rejected
};

std::vector<AggregateRow> run_experiment(const ExperimentSpec& spec);

enum class ReportFormat { Csv, Json };

ReportFormat report_format_from_string(std::string_view s);  // "csv" | "json"
std::string_view to_string(ReportFormat format);

struct ReportOptions {
  ReportFormat format = ReportFormat::Csv;
  // Wall-clock timings are the one non-deterministic measurement; they are
  // only written when explicitly requested.
  bool include_timings = false;
};

// Render the aggregate table plus a metadata block (seed, derivation rule,
// generator, scheduler roster, genetic parameters, pricing flags, tool
// version).  Output is byte-identical across runs of the same spec.
std::string render_report(std::span<const AggregateRow> rows,
                          const ExperimentSpec& spec,
                          const ReportOptions& options);

void emit_report(std::span<const AggregateRow> rows, const ExperimentSpec& spec,
                 const ReportOptions& options, const std::string& path);

// Parse an experiment spec from JSON text (see README for the schema).
// Unknown keys and malformed values raise ParseError with field context.
ExperimentSpec experiment_from_json_text(const std::string& text,
                                         const std::string& context);
ExperimentSpec load_experiment_spec(const std::string& path);

}  // namespace fogsched
