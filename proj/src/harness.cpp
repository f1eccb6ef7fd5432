#include "fogsched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fogsched/rng.hpp"
#include "fogsched/version.hpp"

namespace fogsched {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Shortest decimal text that round-trips the exact double.
std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

}  // namespace

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Tasks: return "tasks";
    case SweepVariable::Fog: return "fog";
    case SweepVariable::Cloud: return "cloud";
  }
  return "?";
}

SweepVariable sweep_from_string(std::string_view s) {
  if (s == "tasks") return SweepVariable::Tasks;
  if (s == "fog") return SweepVariable::Fog;
  if (s == "cloud") return SweepVariable::Cloud;
  throw std::invalid_argument("unknown sweep variable '" + std::string(s) +
                              "' (valid: tasks, fog, cloud)");
}

std::string_view to_string(ReportFormat format) {
  return format == ReportFormat::Csv ? "csv" : "json";
}

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown report format '" + std::string(s) +
                              "' (valid: csv, json)");
}

void validate(const ExperimentSpec& spec) {
  require(!spec.name.empty(), "experiment name must not be empty");
  require(spec.name.find('/') == std::string::npos &&
              spec.name.find('\\') == std::string::npos,
          "experiment name must not contain path separators");
  require(!spec.sweep_values.empty(), "sweep_values must not be empty");
  for (int v : spec.sweep_values) {
    if (spec.sweep == SweepVariable::Tasks)
      require(v >= 1, "swept task counts must be at least 1");
    else
      require(v >= 0, "swept node counts must be non-negative");
  }
  require(spec.tasks >= 1, "tasks must be at least 1");
  require(spec.fog_nodes >= 0, "fog_nodes must be non-negative");
  require(spec.cloud_nodes >= 0, "cloud_nodes must be non-negative");
  require(spec.trials >= 1, "trials must be at least 1");
  require(spec.jobs >= 1, "jobs must be at least 1");
  require(!spec.schedulers.empty(), "scheduler list must not be empty");
  validate(spec.genetic);
  validate(spec.task_dist);
  validate(spec.node_dist);
}

ExperimentSpec builtin_experiment(int which) {
  ExperimentSpec spec;
  switch (which) {
    case 1:
      spec.name = "exp1-tasks";
      spec.sweep = SweepVariable::Tasks;
      spec.sweep_values = {50, 100, 150, 200, 250, 300};
      break;
    case 2:
      spec.name = "exp2-fog";
      spec.sweep = SweepVariable::Fog;
      spec.sweep_values = {10, 20, 30, 40, 50};
      break;
    case 3:
      spec.name = "exp3-cloud";
      spec.sweep = SweepVariable::Cloud;
      spec.sweep_values = {5, 10, 15, 20, 25};
      break;
    default:
      throw std::invalid_argument("builtin experiment must be 1, 2, or 3");
  }
  return spec;
}

namespace {

// Seed-derivation labels; changing these invalidates recorded reports.
constexpr std::uint64_t kTaskStream = 1;
constexpr std::uint64_t kNodeStream = 2;
constexpr std::uint64_t kSchedulerStream = 3;

struct TrialCell {
  bool ok = false;
  double pdst = 0, makespan = 0, c_viol = 0, c_comp = 0, c_comm = 0, total = 0;
  double wall = 0;
};

struct TrialResult {
  std::uint64_t digest = 0;
  bool cloud_only = false;
  std::vector<TrialCell> cells;  // one per scheduler, in spec order
};

TrialResult run_trial(const ExperimentSpec& spec, int sweep_value, int trial) {
  int n = spec.tasks, fog = spec.fog_nodes, cloud = spec.cloud_nodes;
  switch (spec.sweep) {
    case SweepVariable::Tasks: n = sweep_value; break;
    case SweepVariable::Fog: fog = sweep_value; break;
    case SweepVariable::Cloud: cloud = sweep_value; break;
  }

  const std::uint64_t trial_seed =
      rng::derive_seed(spec.seed, static_cast<std::uint64_t>(sweep_value),
                       static_cast<std::uint64_t>(trial));
  Instance inst;
  inst.tasks = generate_tasks(
      n, spec.task_dist, rng::derive_seed(trial_seed, kTaskStream, 0));
  inst.nodes = generate_nodes(
      fog, cloud, spec.node_dist, rng::derive_seed(trial_seed, kNodeStream, 0));

  TrialResult result;
  result.digest = instance_digest(inst);
  for (const Task& task : inst.tasks) {
    bool fits_fog = false, fits_cloud = false;
    for (const Node& node : inst.nodes) {
      if (task.mem_mb <= node.mem_mb) {
        (node.kind == NodeKind::Fog ? fits_fog : fits_cloud) = true;
      }
    }
    if (!fits_fog && fits_cloud) result.cloud_only = true;
  }

  result.cells.resize(spec.schedulers.size());
  for (std::size_t k = 0; k < spec.schedulers.size(); ++k) {
    const SchedulerKind kind = spec.schedulers[k];
    SchedulerConfig config;
    config.seed = rng::derive_seed(trial_seed, kSchedulerStream,
                                   static_cast<std::uint64_t>(kind));
    config.genetic = spec.genetic;
    config.policy = spec.policy;
    config.budget = spec.budget;
    TrialCell& cell = result.cells[k];
    try {
      const SchedulerOutcome out =
          run_scheduler(kind, inst.tasks, inst.nodes, config);
      cell.ok = true;
      cell.pdst = out.report.pdst_pct;
      cell.makespan = out.report.makespan_ms;
      cell.c_viol = out.report.total_viol;
      cell.c_comp = out.report.total_comp;
      cell.c_comm = out.report.total_comm;
      cell.total = out.report.total;
      cell.wall = out.wall_ms;
    } catch (const InfeasibleTask&) {
      cell.ok = false;  // recorded in the row's infeasible_trials
    }
  }
  return result;
}

struct Accumulator {
  int count = 0;
  double sum = 0;
  double min = 0;
  double max = 0;
  void add(double v) {
    if (count == 0) {
      min = max = v;
    } else {
      min = std::min(min, v);
      max = std::max(max, v);
    }
    sum += v;
    ++count;
  }
  MetricAgg finish() const {
    MetricAgg agg;
    if (count > 0) {
      agg.avg = sum / count;
      agg.min = min;
      agg.max = max;
    }
    return agg;
  }
};

}  // namespace

std::vector<AggregateRow> run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.sweep != SweepVariable::Tasks) {
    // The fixed counterpart must keep the pool non-empty when the swept
    // count is 0.
    for (int v : spec.sweep_values) {
      const int other = spec.sweep == SweepVariable::Fog ? spec.cloud_nodes
                                                         : spec.fog_nodes;
      require(v + other > 0, "node pool would be empty at sweep value " +
                                 std::to_string(v));
    }
  }

  struct Unit {
    int sweep_value;
    int trial;
  };
  std::vector<Unit> units;
  units.reserve(spec.sweep_values.size() * static_cast<std::size_t>(spec.trials));
  for (int value : spec.sweep_values)
    for (int t = 0; t < spec.trials; ++t) units.push_back({value, t});

  std::vector<TrialResult> results(units.size());
  const int workers = std::min<int>(spec.jobs, static_cast<int>(units.size()));
  if (workers <= 1) {
    for (std::size_t u = 0; u < units.size(); ++u)
      results[u] = run_trial(spec, units[u].sweep_value, units[u].trial);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    const auto worker = [&]() {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t u = next.fetch_add(1);
        if (u >= units.size()) return;
        try {
          results[u] = run_trial(spec, units[u].sweep_value, units[u].trial);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<AggregateRow> rows;
  rows.reserve(spec.sweep_values.size() * spec.schedulers.size());
  for (std::size_t s = 0; s < spec.sweep_values.size(); ++s) {
    const std::size_t base = s * static_cast<std::size_t>(spec.trials);

    // One digest covering all of this sweep value's trial instances.
    std::uint64_t combined = 0xCBF29CE484222325ULL;
    int cloud_only = 0;
    for (int t = 0; t < spec.trials; ++t) {
      const TrialResult& r = results[base + static_cast<std::size_t>(t)];
      unsigned char bytes[8];
      for (int b = 0; b < 8; ++b)
        bytes[b] = static_cast<unsigned char>(r.digest >> (8 * b));
      combined = fnv1a64(bytes, combined);
      if (r.cloud_only) ++cloud_only;
    }

    for (std::size_t k = 0; k < spec.schedulers.size(); ++k) {
      AggregateRow row;
      row.sweep_value = spec.sweep_values[s];
      row.scheduler = spec.schedulers[k];
      row.workload_digest = combined;
      row.cloud_only_trials = cloud_only;

      Accumulator pdst, makespan, c_viol, c_comp, c_comm, total, wall;
      for (int t = 0; t < spec.trials; ++t) {
        const TrialCell& cell =
            results[base + static_cast<std::size_t>(t)].cells[k];
        if (!cell.ok) {
          ++row.infeasible_trials;
          continue;
        }
        pdst.add(cell.pdst);
        makespan.add(cell.makespan);
        c_viol.add(cell.c_viol);
        c_comp.add(cell.c_comp);
        c_comm.add(cell.c_comm);
        total.add(cell.total);
        wall.add(cell.wall);
      }
      row.trials = pdst.count;
      row.pdst_pct = pdst.finish();
      row.makespan_ms = makespan.finish();
      row.c_viol = c_viol.finish();
      row.c_comp = c_comp.finish();
      row.c_comm = c_comm.finish();
      row.total = total.finish();
      row.mean_wall_ms = wall.finish().avg;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string seed_derivation_note() {
  return "splitmix64 chain: trial=(seed,sweep_value,trial) "
         "tasks=(trial,1,0) nodes=(trial,2,0) scheduler=(trial,3,rank)";
}

std::string genetic_note(const GeneticParams& g) {
  std::ostringstream out;
  out << "population=" << g.population << " generations=" << g.generations
      << " tournament=" << g.tournament
      << " crossover_rate=" << fmt_double(g.crossover_rate)
      << " mutation_rate=" << fmt_double(g.mutation_rate)
      << " elitism=" << g.elitism;
  return out.str();
}

void append_fixed_dims(const ExperimentSpec& spec, std::ostringstream& out) {
  bool first = true;
  const auto put = [&](const char* name, int value) {
    if (!first) out << ' ';
    out << name << '=' << value;
    first = false;
  };
  if (spec.sweep != SweepVariable::Tasks) put("tasks", spec.tasks);
  if (spec.sweep != SweepVariable::Fog) put("fog_nodes", spec.fog_nodes);
  if (spec.sweep != SweepVariable::Cloud) put("cloud_nodes", spec.cloud_nodes);
}

std::string render_csv(std::span<const AggregateRow> rows,
                       const ExperimentSpec& spec,
                       const ReportOptions& options) {
  std::ostringstream out;
  out << "# tool: fogsched " << kVersion << "\n";
  out << "# experiment: " << spec.name << "\n";
  out << "# sweep: " << to_string(spec.sweep) << "\n";
  out << "# sweep_values:";
  for (int v : spec.sweep_values) out << ' ' << v;
  out << "\n# fixed: ";
  append_fixed_dims(spec, out);
  out << "\n# trials: " << spec.trials << "\n";
  out << "# seed: " << spec.seed << "\n";
  out << "# generator: mt19937-64\n";
  out << "# seed_derivation: " << seed_derivation_note() << "\n";
  out << "# schedulers:";
  for (SchedulerKind kind : spec.schedulers) out << ' ' << scheduler_name(kind);
  out << "\n# genetic: " << genetic_note(spec.genetic) << "\n";
  out << "# raw_violation_cost: "
      << (spec.policy.clamp_violation_cost ? "false" : "true") << "\n";

  out << "sweep_value,scheduler,trials";
  for (const char* metric :
       {"pdst_pct", "makespan_ms", "c_viol", "c_comp", "c_comm", "total"}) {
    out << ',' << metric << "_avg," << metric << "_min," << metric << "_max";
  }
  out << ",workload_digest,cloud_only_trials,infeasible_trials";
  if (options.include_timings) out << ",wall_ms_mean";
  out << "\n";

  for (const AggregateRow& row : rows) {
    out << row.sweep_value << ',' << scheduler_name(row.scheduler) << ','
        << row.trials;
    for (const MetricAgg* agg :
         {&row.pdst_pct, &row.makespan_ms, &row.c_viol, &row.c_comp,
          &row.c_comm, &row.total}) {
      out << ',' << fmt_double(agg->avg) << ',' << fmt_double(agg->min) << ','
          << fmt_double(agg->max);
    }
    out << ',' << hex16(row.workload_digest) << ',' << row.cloud_only_trials
        << ',' << row.infeasible_trials;
    if (options.include_timings) out << ',' << fmt_double(row.mean_wall_ms);
    out << "\n";
  }
  return out.str();
}

json agg_to_json(const MetricAgg& agg) {
  return json{{"avg", agg.avg}, {"min", agg.min}, {"max", agg.max}};
}

std::string render_json(std::span<const AggregateRow> rows,
                        const ExperimentSpec& spec,
                        const ReportOptions& options) {
  json fixed;
  if (spec.sweep != SweepVariable::Tasks) fixed["tasks"] = spec.tasks;
  if (spec.sweep != SweepVariable::Fog) fixed["fog_nodes"] = spec.fog_nodes;
  if (spec.sweep != SweepVariable::Cloud)
    fixed["cloud_nodes"] = spec.cloud_nodes;

  json metadata{
      {"tool", "fogsched"},
      {"version", std::string(kVersion)},
      {"experiment", spec.name},
      {"sweep", std::string(to_string(spec.sweep))},
      {"sweep_values", spec.sweep_values},
      {"fixed", std::move(fixed)},
      {"trials", spec.trials},
      {"seed", spec.seed},
      {"generator", "mt19937-64"},
      {"seed_derivation", seed_derivation_note()},
      {"genetic",
       json{{"population", spec.genetic.population},
            {"generations", spec.genetic.generations},
            {"tournament", spec.genetic.tournament},
            {"crossover_rate", spec.genetic.crossover_rate},
            {"mutation_rate", spec.genetic.mutation_rate},
            {"elitism", spec.genetic.elitism}}},
      {"raw_violation_cost", !spec.policy.clamp_violation_cost},
  };
  json schedulers = json::array();
  for (SchedulerKind kind : spec.schedulers)
    schedulers.push_back(std::string(scheduler_name(kind)));
  metadata["schedulers"] = std::move(schedulers);

  json out_rows = json::array();
  for (const AggregateRow& row : rows) {
    json r{{"sweep_value", row.sweep_value},
           {"scheduler", std::string(scheduler_name(row.scheduler))},
           {"trials", row.trials},
           {"pdst_pct", agg_to_json(row.pdst_pct)},
           {"makespan_ms", agg_to_json(row.makespan_ms)},
           {"c_viol", agg_to_json(row.c_viol)},
           {"c_comp", agg_to_json(row.c_comp)},
           {"c_comm", agg_to_json(row.c_comm)},
           {"total", agg_to_json(row.total)},
           {"workload_digest", hex16(row.workload_digest)},
           {"cloud_only_trials", row.cloud_only_trials},
           {"infeasible_trials", row.infeasible_trials}};
    if (options.include_timings) r["wall_ms_mean"] = row.mean_wall_ms;
    out_rows.push_back(std::move(r));
  }

  const json doc{{"metadata", std::move(metadata)},
                 {"rows", std::move(out_rows)}};
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_report(std::span<const AggregateRow> rows,
                          const ExperimentSpec& spec,
                          const ReportOptions& options) {
  return options.format == ReportFormat::Csv
             ? render_csv(rows, spec, options)
             : render_json(rows, spec, options);
}

void emit_report(std::span<const AggregateRow> rows, const ExperimentSpec& spec,
                 const ReportOptions& options, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << render_report(rows, spec, options);
  if (!out) throw std::runtime_error(path + ": write failed");
}

namespace {

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
  throw ParseError(ctx + ": " + msg);
}

void reject_unknown(const json& obj, std::span<const char* const> known,
                    const std::string& ctx) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(ctx, "unknown field '" + key + "'");
  }
}

int get_int_field(const json& obj, const char* key, int fallback,
                  const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer())
    fail(ctx, "field '" + std::string(key) + "' must be an integer");
  return it->get<int>();
}

double get_real_field(const json& obj, const char* key, double fallback,
                      const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number())
    fail(ctx, "field '" + std::string(key) + "' must be a number");
  return it->get<double>();
}

void parse_genetic(const json& obj, GeneticParams& params,
                   const std::string& ctx) {
  if (!obj.is_object()) fail(ctx, "must be an object");
  static constexpr const char* known[] = {"population",     "generations",
                                          "tournament",     "crossover_rate",
                                          "mutation_rate",  "elitism"};
  reject_unknown(obj, known, ctx);
  params.population = get_int_field(obj, "population", params.population, ctx);
  params.generations =
      get_int_field(obj, "generations", params.generations, ctx);
  params.tournament = get_int_field(obj, "tournament", params.tournament, ctx);
  params.crossover_rate =
      get_real_field(obj, "crossover_rate", params.crossover_rate, ctx);
  params.mutation_rate =
      get_real_field(obj, "mutation_rate", params.mutation_rate, ctx);
  params.elitism = get_int_field(obj, "elitism", params.elitism, ctx);
}

}  // namespace

ExperimentSpec experiment_from_json_text(const std::string& text,
                                         const std::string& context) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(context + ": " + e.what());
  }
  if (!doc.is_object()) fail(context, "top level must be an object");
  static constexpr const char* known[] = {
      "name",         "sweep",       "sweep_values",      "tasks",
      "fog_nodes",    "cloud_nodes", "trials",            "seed",
      "schedulers",   "genetic",     "raw_violation_cost", "budget",
      "jobs",         "task_distribution",                "node_distribution"};
  reject_unknown(doc, known, context);

  ExperimentSpec spec;
  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) fail(context, "'name' must be a string");
    spec.name = it->get<std::string>();
  }
  if (const auto it = doc.find("sweep"); it != doc.end()) {
    if (!it->is_string()) fail(context, "'sweep' must be a string");
    try {
      spec.sweep = sweep_from_string(it->get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(context, e.what());
    }
  }
  if (const auto it = doc.find("sweep_values"); it != doc.end()) {
    if (!it->is_array() || it->empty())
      fail(context, "'sweep_values' must be a non-empty array of integers");
    for (const json& v : *it) {
      if (!v.is_number_integer())
        fail(context, "'sweep_values' must be integers");
      spec.sweep_values.push_back(v.get<int>());
    }
  } else {
    fail(context, "missing field 'sweep_values'");
  }
  spec.tasks = get_int_field(doc, "tasks", spec.tasks, context);
  spec.fog_nodes = get_int_field(doc, "fog_nodes", spec.fog_nodes, context);
  spec.cloud_nodes =
      get_int_field(doc, "cloud_nodes", spec.cloud_nodes, context);
  spec.trials = get_int_field(doc, "trials", spec.trials, context);
  if (const auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_integer() ||
        (it->is_number_integer() && !it->is_number_unsigned() &&
         it->get<std::int64_t>() < 0)) {
      fail(context, "'seed' must be a non-negative integer");
    }
    spec.seed = it->get<std::uint64_t>();
  }
  if (const auto it = doc.find("schedulers"); it != doc.end()) {
    if (!it->is_array() || it->empty())
      fail(context, "'schedulers' must be a non-empty array of names");
    spec.schedulers.clear();
    for (const json& v : *it) {
      if (!v.is_string()) fail(context, "'schedulers' must be strings");
      try {
        spec.schedulers.push_back(scheduler_from_name(v.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        fail(context, e.what());
      }
    }
  }
  if (const auto it = doc.find("genetic"); it != doc.end())
    parse_genetic(*it, spec.genetic, context + ".genetic");
  if (const auto it = doc.find("raw_violation_cost"); it != doc.end()) {
    if (!it->is_boolean())
      fail(context, "'raw_violation_cost' must be a boolean");
    spec.policy.clamp_violation_cost = !it->get<bool>();
  }
  if (const auto it = doc.find("budget"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1)
      fail(context, "'budget' must be a positive integer");
    spec.budget = it->get<std::uint64_t>();
  }
  spec.jobs = get_int_field(doc, "jobs", spec.jobs, context);
  if (const auto it = doc.find("task_distribution"); it != doc.end())
    task_distribution_from_json(*it, spec.task_dist,
                                context + ".task_distribution");
  if (const auto it = doc.find("node_distribution"); it != doc.end())
    node_distribution_from_json(*it, spec.node_dist,
                                context + ".node_distribution");

  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    fail(context, e.what());
  }
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return experiment_from_json_text(text.str(), path);
}

}  // namespace fogsched
