// fogsched — cost-aware scheduling of independent tasks over fog/cloud pools.
//
// Subcommands:
//   schedule    run one scheduler on an instance file and price the result
//   generate    draw a synthetic instance and write it to a JSON file
//   experiment  run a sweep experiment and write an aggregate report
//   verify      compare schedulers against exhaustive search on an instance
//
// Exit codes: 0 success; 1 usage, config, or I/O error; 2 infeasible
// instance; 3 exhaustive-search budget exceeded.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fogsched/harness.hpp"
#include "fogsched/model.hpp"
#include "fogsched/rng.hpp"
#include "fogsched/schedulers.hpp"
#include "fogsched/version.hpp"
#include "fogsched/workload.hpp"

namespace {

using nlohmann::json;
namespace fs = fogsched;

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

// Shortest decimal text that round-trips the exact double.
std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Compact display form for stdout summaries.
std::string fmt_short(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

std::vector<fs::SchedulerKind> parse_scheduler_list(const std::string& text) {
  std::vector<fs::SchedulerKind> kinds;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) kinds.push_back(fs::scheduler_from_name(token));
  }
  if (kinds.empty())
    throw std::invalid_argument("scheduler list must not be empty");
  return kinds;
}

void add_ga_options(CLI::App* cmd, fs::GeneticParams& ga) {
  cmd->add_option("--ga-population", ga.population,
                  "genetic search: population size");
  cmd->add_option("--ga-generations", ga.generations,
                  "genetic search: number of generations");
  cmd->add_option("--ga-tournament", ga.tournament,
                  "genetic search: tournament size");
  cmd->add_option("--ga-crossover", ga.crossover_rate,
                  "genetic search: crossover probability");
  cmd->add_option("--ga-mutation", ga.mutation_rate,
                  "genetic search: per-gene mutation probability");
  cmd->add_option("--ga-elitism", ga.elitism,
                  "genetic search: individuals kept unchanged");
}

json genetic_to_json(const fs::GeneticParams& g) {
  return json{{"population", g.population},   {"generations", g.generations},
              {"tournament", g.tournament},   {"crossover_rate", g.crossover_rate},
              {"mutation_rate", g.mutation_rate}, {"elitism", g.elitism}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

// ---------------------------------------------------------------- schedule

struct ScheduleOpts {
  std::string instance_path;
  std::string scheduler;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::uint64_t budget = fs::kDefaultEnumerationBudget;
  bool raw_violation_cost = false;
  fs::GeneticParams ga;
  std::string output;
  std::string format = "json";
};

std::string render_schedule_csv(const ScheduleOpts& opts,
                                const fs::Instance& inst,
                                const fs::SchedulerOutcome& out) {
  std::ostringstream text;
  text << "# tool: fogsched " << fs::kVersion << "\n";
  text << "# scheduler: " << opts.scheduler << "\n";
  text << "# instance: " << opts.instance_path << "\n";
  text << "# instance_digest: " << hex16(fs::instance_digest(inst)) << "\n";
  text << "# seed: " << opts.seed << "\n";
  text << "# raw_violation_cost: " << (opts.raw_violation_cost ? "true" : "false")
       << "\n";
  const fs::CostReport& r = out.report;
  text << "# total: " << fmt_double(r.total) << "\n";
  text << "# c_comp: " << fmt_double(r.total_comp) << "\n";
  text << "# c_comm: " << fmt_double(r.total_comm) << "\n";
  text << "# c_viol: " << fmt_double(r.total_viol) << "\n";
  text << "# pdst_pct: " << fmt_double(r.pdst_pct) << "\n";
  text << "# makespan_ms: " << fmt_double(r.makespan_ms) << "\n";
  text << "# violated_tasks: " << r.violated_tasks << "\n";
  text << "task_id,node_id,response_ms,violation_pct,c_comp,c_comm,c_viol\n";
  for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
    const fs::TaskCost& tc = r.per_task[i];
    text << i << ',' << out.schedule.assignment[i] << ','
         << fmt_double(tc.response_ms) << ',' << fmt_double(tc.violation_pct)
         << ',' << fmt_double(tc.c_comp) << ',' << fmt_double(tc.c_comm) << ','
         << fmt_double(tc.c_viol) << "\n";
  }
  return text.str();
}

std::string render_schedule_json(const ScheduleOpts& opts,
                                 const fs::Instance& inst,
                                 const fs::SchedulerOutcome& out,
                                 fs::SchedulerKind kind) {
  json metadata{{"tool", "fogsched"},
                {"version", std::string(fs::kVersion)},
                {"scheduler", opts.scheduler},
                {"instance", opts.instance_path},
                {"instance_digest", hex16(fs::instance_digest(inst))},
                {"seed", opts.seed},
                {"raw_violation_cost", opts.raw_violation_cost}};
  if (kind == fs::SchedulerKind::Genetic)
    metadata["genetic"] = genetic_to_json(opts.ga);
  if (kind == fs::SchedulerKind::Exact) metadata["budget"] = opts.budget;

  const fs::CostReport& r = out.report;
  json per_task = json::array();
  for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
    const fs::TaskCost& tc = r.per_task[i];
    per_task.push_back(json{{"id", static_cast<int>(i)},
                            {"node", out.schedule.assignment[i]},
                            {"response_ms", tc.response_ms},
                            {"violation_pct", tc.violation_pct},
                            {"c_comp", tc.c_comp},
                            {"c_comm", tc.c_comm},
                            {"c_viol", tc.c_viol}});
  }
  const json doc{{"metadata", std::move(metadata)},
                 {"assignment", out.schedule.assignment},
                 {"summary", json{{"total", r.total},
                                  {"c_comp", r.total_comp},
                                  {"c_comm", r.total_comm},
                                  {"c_viol", r.total_viol},
                                  {"pdst_pct", r.pdst_pct},
                                  {"makespan_ms", r.makespan_ms},
                                  {"violated_tasks", r.violated_tasks}}},
                 {"per_task", std::move(per_task)}};
  return doc.dump(2) + "\n";
}

void print_report_summary(const fs::CostReport& r, std::size_t task_count,
                          double wall_ms) {
  std::cout << "total cost: " << fmt_short(r.total) << " G$  (comp "
            << fmt_short(r.total_comp) << ", comm " << fmt_short(r.total_comm)
            << ", viol " << fmt_short(r.total_viol) << ")\n";
  std::cout << "pdst: " << fmt_short(r.pdst_pct) << "%  violations: "
            << r.violated_tasks << "/" << task_count
            << "  makespan: " << fmt_short(r.makespan_ms) << " ms\n";
  std::cerr << "wall: " << fmt_short(wall_ms) << " ms\n";
}

void run_schedule(const ScheduleOpts& opts) {
  const fs::Instance inst = fs::load_instance(opts.instance_path);
  const fs::SchedulerKind kind = fs::scheduler_from_name(opts.scheduler);

  fs::SchedulerConfig config;
  config.seed = opts.seed;
  config.genetic = opts.ga;
  config.policy.clamp_violation_cost = !opts.raw_violation_cost;
  config.budget = opts.budget;

  const fs::SchedulerOutcome out =
      fs::run_scheduler(kind, inst.tasks, inst.nodes, config);

  std::cout << "scheduler: " << opts.scheduler << "\n";
  std::cout << "instance: " << opts.instance_path << " ("
            << inst.tasks.size() << " tasks, " << inst.nodes.size()
            << " nodes, digest " << hex16(fs::instance_digest(inst)) << ")\n";
  if (kind == fs::SchedulerKind::Random || kind == fs::SchedulerKind::Genetic) {
    std::cout << "seed: " << opts.seed << (opts.seed_given ? "" : " (default)")
              << "\n";
  }
  print_report_summary(out.report, inst.tasks.size(), out.wall_ms);

  if (!opts.output.empty()) {
    const std::string text =
        opts.format == "csv" ? render_schedule_csv(opts, inst, out)
                             : render_schedule_json(opts, inst, out, kind);
    write_text_file(opts.output, text);
    std::cout << "wrote " << opts.output << "\n";
  }
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  int tasks = 0;
  int fog = 0;
  int cloud = 0;
  std::uint64_t seed = 0;
  std::string output;
  std::string config;
};

void run_generate(const GenerateOpts& opts) {
  fs::TaskDistribution task_dist;
  fs::NodeDistribution node_dist;
  if (!opts.config.empty()) {
    std::ifstream in(opts.config);
    if (!in) throw fs::ParseError(opts.config + ": cannot open file");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw fs::ParseError(opts.config + ": " + e.what());
    }
    if (!doc.is_object())
      throw fs::ParseError(opts.config + ": top level must be an object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "task_distribution") {
        fs::task_distribution_from_json(value, task_dist,
                                        opts.config + ".task_distribution");
      } else if (key == "node_distribution") {
        fs::node_distribution_from_json(value, node_dist,
                                        opts.config + ".node_distribution");
      } else {
        throw fs::ParseError(opts.config + ": unknown field '" + key + "'");
      }
    }
  }

  fs::Instance inst;
  inst.tasks = fs::generate_tasks(opts.tasks, task_dist,
                                  fogsched::rng::derive_seed(opts.seed, 1, 0));
  inst.nodes =
      fs::generate_nodes(opts.fog, opts.cloud, node_dist,
                         fogsched::rng::derive_seed(opts.seed, 2, 0));
  fs::save_instance(inst, opts.output);
  std::cout << "wrote " << opts.output << " (" << inst.tasks.size()
            << " tasks, " << inst.nodes.size() << " nodes, digest "
            << hex16(fs::instance_digest(inst)) << ")\n";
}

// -------------------------------------------------------------- experiment

struct ExperimentOpts {
  int builtin = 0;
  std::string config;
  std::string output_dir = ".";
  std::string format = "csv";
  bool timings = false;
  bool raw_violation_cost = false;
  bool raw_given = false;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> schedulers;
  std::optional<int> ga_generations;
  std::optional<int> ga_population;
  std::optional<int> jobs;
};

void run_experiment_cmd(const ExperimentOpts& opts) {
  fs::ExperimentSpec spec;
  if (opts.builtin != 0 && !opts.config.empty())
    throw std::invalid_argument("--builtin and --config are mutually exclusive");
  if (opts.builtin != 0) {
    spec = fs::builtin_experiment(opts.builtin);
  } else if (!opts.config.empty()) {
    spec = fs::load_experiment_spec(opts.config);
  } else if (const char* env = std::getenv("FOGSCHED_CONFIG");
             env != nullptr && *env != '\0') {
    spec = fs::load_experiment_spec(env);
  } else {
    throw std::invalid_argument(
        "no experiment selected: pass --builtin N or --config FILE, or set "
        "FOGSCHED_CONFIG");
  }

  if (opts.trials) spec.trials = *opts.trials;
  if (opts.seed) spec.seed = *opts.seed;
  if (opts.schedulers) spec.schedulers = parse_scheduler_list(*opts.schedulers);
  if (opts.ga_generations) spec.genetic.generations = *opts.ga_generations;
  if (opts.ga_population) spec.genetic.population = *opts.ga_population;
  if (opts.jobs) spec.jobs = *opts.jobs;
  if (opts.raw_given) spec.policy.clamp_violation_cost = !opts.raw_violation_cost;
  fs::validate(spec);

  const auto rows = fs::run_experiment(spec);

  fs::ReportOptions report;
  report.format = fs::report_format_from_string(opts.format);
  report.include_timings = opts.timings;
  std::filesystem::create_directories(opts.output_dir);
  const std::string path = (std::filesystem::path(opts.output_dir) /
                            (spec.name + "." + opts.format))
                               .string();
  fs::emit_report(rows, spec, report, path);
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
}

// ------------------------------------------------------------------ verify

struct VerifyOpts {
  std::string instance_path;
  std::uint64_t seed = 0;
  std::uint64_t budget = fs::kDefaultEnumerationBudget;
  bool raw_violation_cost = false;
  std::string schedulers = "min-ccv,min-v,rr,random,ga";
  fs::GeneticParams ga;
  std::string output;
  std::string format = "csv";
};

struct VerifyRow {
  std::string name;
  double total = 0, gap_pct = 0, pdst = 0;
  int violated = 0;
};

void run_verify(const VerifyOpts& opts) {
  const fs::Instance inst = opts.instance_path.empty()
                                ? fs::toy_instance()
                                : fs::load_instance(opts.instance_path);
  const std::string shown_path =
      opts.instance_path.empty() ? "(builtin case study)" : opts.instance_path;

  fs::SchedulerConfig config;
  config.seed = opts.seed;
  config.genetic = opts.ga;
  config.policy.clamp_violation_cost = !opts.raw_violation_cost;
  config.budget = opts.budget;

  const fs::SchedulerOutcome reference =
      fs::exact(inst.tasks, inst.nodes, config.policy, config.budget);
  const double ref_total = reference.report.total;

  std::vector<VerifyRow> rows;
  rows.push_back(VerifyRow{"exact", ref_total, 0.0,
                           reference.report.pdst_pct,
                           reference.report.violated_tasks});
  for (const fs::SchedulerKind kind : parse_scheduler_list(opts.schedulers)) {
    if (kind == fs::SchedulerKind::Exact) continue;  // already the reference
    const fs::SchedulerOutcome out =
        fs::run_scheduler(kind, inst.tasks, inst.nodes, config);
    VerifyRow row;
    row.name = std::string(fs::scheduler_name(kind));
    row.total = out.report.total;
    row.gap_pct = ref_total != 0.0
                      ? (out.report.total - ref_total) / ref_total * 100.0
                      : out.report.total - ref_total;
    row.pdst = out.report.pdst_pct;
    row.violated = out.report.violated_tasks;
    rows.push_back(row);
  }

  std::cout << "instance: " << shown_path << " (" << inst.tasks.size()
            << " tasks, " << inst.nodes.size() << " nodes, digest "
            << hex16(fs::instance_digest(inst)) << ")\n";
  std::cout << "reference: exhaustive search over "
            << inst.nodes.size() << "^" << inst.tasks.size()
            << " assignments\n";
  std::printf("%-10s %14s %10s %8s %6s\n", "scheduler", "total", "gap_pct",
              "pdst", "late");
  for (const VerifyRow& row : rows) {
    std::printf("%-10s %14.6f %10.3f %8.2f %6d\n", row.name.c_str(), row.total,
                row.gap_pct, row.pdst, row.violated);
  }

  if (!opts.output.empty()) {
    std::string text;
    if (opts.format == "csv") {
      std::ostringstream out;
      out << "# tool: fogsched " << fs::kVersion << "\n";
      out << "# instance: " << shown_path << "\n";
      out << "# instance_digest: " << hex16(fs::instance_digest(inst)) << "\n";
      out << "# seed: " << opts.seed << "\n";
      out << "# budget: " << opts.budget << "\n";
      out << "# raw_violation_cost: "
          << (opts.raw_violation_cost ? "true" : "false") << "\n";
      out << "scheduler,total,gap_pct,pdst_pct,violated_tasks\n";
      for (const VerifyRow& row : rows) {
        out << row.name << ',' << fmt_double(row.total) << ','
            << fmt_double(row.gap_pct) << ',' << fmt_double(row.pdst) << ','
            << row.violated << "\n";
      }
      text = out.str();
    } else {
      json jrows = json::array();
      for (const VerifyRow& row : rows) {
        jrows.push_back(json{{"scheduler", row.name},
                             {"total", row.total},
                             {"gap_pct", row.gap_pct},
                             {"pdst_pct", row.pdst},
                             {"violated_tasks", row.violated}});
      }
      const json doc{
          {"metadata",
           json{{"tool", "fogsched"},
                {"version", std::string(fs::kVersion)},
                {"instance", shown_path},
                {"instance_digest", hex16(fs::instance_digest(inst))},
                {"seed", opts.seed},
                {"budget", opts.budget},
                {"raw_violation_cost", opts.raw_violation_cost}}},
          {"rows", std::move(jrows)}};
      text = doc.dump(2) + "\n";
    }
    write_text_file(opts.output, text);
    std::cout << "wrote " << opts.output << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fogsched " + std::string(fs::kVersion) +
               " — cost-aware scheduling of independent tasks over "
               "fog/cloud node pools"};
  app.require_subcommand(1);

  ScheduleOpts schedule_opts;
  CLI::App* schedule = app.add_subcommand(
      "schedule", "Run one scheduler on an instance file and price the result");
  schedule->add_option("--instance", schedule_opts.instance_path,
                       "instance JSON file")
      ->required();
  schedule->add_option("--scheduler", schedule_opts.scheduler,
                       "one of: min-ccv, min-v, rr, random, ga, exact")
      ->required();
  CLI::Option* schedule_seed = schedule->add_option(
      "--seed", schedule_opts.seed, "seed for random/ga (default 0)");
  schedule->add_option("--budget", schedule_opts.budget,
                       "max assignments exhaustive search may visit")
      ->check(CLI::PositiveNumber);
  schedule->add_flag("--raw-violation-cost", schedule_opts.raw_violation_cost,
                     "price lateness without clamping at zero");
  add_ga_options(schedule, schedule_opts.ga);
  schedule->add_option("--output", schedule_opts.output,
                       "write a full report to this file");
  schedule->add_option("--format", schedule_opts.format,
                       "report format (default json)")
      ->check(CLI::IsMember({"csv", "json"}));
  schedule->callback([&]() {
    schedule_opts.seed_given = schedule_seed->count() > 0;
    run_schedule(schedule_opts);
  });

  GenerateOpts generate_opts;
  CLI::App* generate = app.add_subcommand(
      "generate", "Draw a synthetic instance and write it to a JSON file");
  generate->add_option("--tasks", generate_opts.tasks, "number of tasks")
      ->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--fog", generate_opts.fog, "number of fog nodes")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--cloud", generate_opts.cloud, "number of cloud nodes")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", generate_opts.seed, "master seed (default 0)");
  generate->add_option("--output", generate_opts.output, "output instance file")
      ->required();
  generate->add_option("--config", generate_opts.config,
                       "JSON file with task_distribution/node_distribution "
                       "overrides");
  generate->callback([&]() { run_generate(generate_opts); });

  ExperimentOpts experiment_opts;
  int trials_val = 0;
  std::uint64_t seed_val = 0;
  std::string schedulers_val;
  int ga_generations_val = 0, ga_population_val = 0, jobs_val = 0;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "Run a sweep experiment and write an aggregate report");
  experiment->add_option("--builtin", experiment_opts.builtin,
                         "ready-made experiment: 1 (tasks), 2 (fog), 3 (cloud)")
      ->check(CLI::Range(1, 3));
  experiment->add_option("--config", experiment_opts.config,
                         "experiment spec JSON (falls back to FOGSCHED_CONFIG)");
  experiment->add_option("--output-dir", experiment_opts.output_dir,
                         "directory for the report file (default .)");
  experiment->add_option("--format", experiment_opts.format,
                         "report format (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  experiment->add_flag("--timings", experiment_opts.timings,
                       "include mean wall-clock times (non-deterministic)");
  CLI::Option* raw_flag =
      experiment->add_flag("--raw-violation-cost",
                           experiment_opts.raw_violation_cost,
                           "price lateness without clamping at zero");
  CLI::Option* trials_opt =
      experiment->add_option("--trials", trials_val, "trials per sweep value")
          ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt =
      experiment->add_option("--seed", seed_val, "master seed");
  CLI::Option* schedulers_opt = experiment->add_option(
      "--schedulers", schedulers_val, "comma-separated scheduler names");
  CLI::Option* ga_generations_opt = experiment->add_option(
      "--ga-generations", ga_generations_val, "genetic search generations");
  CLI::Option* ga_population_opt = experiment->add_option(
      "--ga-population", ga_population_val, "genetic search population");
  CLI::Option* jobs_opt =
      experiment->add_option("--jobs", jobs_val, "worker threads for trials")
          ->check(CLI::PositiveNumber);
  experiment->callback([&]() {
    if (trials_opt->count()) experiment_opts.trials = trials_val;
    if (seed_opt->count()) experiment_opts.seed = seed_val;
    if (schedulers_opt->count()) experiment_opts.schedulers = schedulers_val;
    if (ga_generations_opt->count())
      experiment_opts.ga_generations = ga_generations_val;
    if (ga_population_opt->count())
      experiment_opts.ga_population = ga_population_val;
    if (jobs_opt->count()) experiment_opts.jobs = jobs_val;
    experiment_opts.raw_given = raw_flag->count() > 0;
    run_experiment_cmd(experiment_opts);
  });

  VerifyOpts verify_opts;
  CLI::App* verify = app.add_subcommand(
      "verify",
      "Compare schedulers against exhaustive search on a small instance");
  verify->add_option("--instance", verify_opts.instance_path,
                     "instance JSON file (default: builtin case study)");
  verify->add_option("--seed", verify_opts.seed, "seed for random/ga");
  verify->add_option("--budget", verify_opts.budget,
                     "max assignments exhaustive search may visit")
      ->check(CLI::PositiveNumber);
  verify->add_flag("--raw-violation-cost", verify_opts.raw_violation_cost,
                   "price lateness without clamping at zero");
  verify->add_option("--schedulers", verify_opts.schedulers,
                     "comma-separated scheduler names to compare");
  add_ga_options(verify, verify_opts.ga);
  verify->add_option("--output", verify_opts.output,
                     "write the comparison table to this file");
  verify->add_option("--format", verify_opts.format,
                     "output format (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  verify->callback([&]() { run_verify(verify_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const fogsched::InfeasibleTask& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fogsched::ConstraintViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fogsched::EnumerationBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
