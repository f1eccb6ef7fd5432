#include "fogsched/schedulers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <vector>

#include "fogsched/rng.hpp"

namespace fogsched {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

bool mem_fits(const Task& task, const Node& node) {
  return task.mem_mb <= node.mem_mb;
}

[[noreturn]] void throw_infeasible(const Task& task,
                                   std::span<const Node> nodes) {
  double max_mem = 0.0;
  for (const Node& n : nodes) max_mem = std::max(max_mem, n.mem_mb);
  throw InfeasibleTask(
      task.id, "task " + std::to_string(task.id) + " needs " +
                   std::to_string(task.mem_mb) +
                   " MB of memory but the largest node offers " +
                   std::to_string(max_mem) + " MB");
}

void check_inputs(std::span<const Task> tasks, std::span<const Node> nodes) {
  if (tasks.empty()) throw std::invalid_argument("task list must not be empty");
  if (nodes.empty()) throw std::invalid_argument("node pool must not be empty");
}

// Node busy times implied by an assignment, accumulated in the same
// (deadline, id) replay order the evaluator uses.
std::vector<double> busy_times(std::span<const Task> tasks,
                               std::span<const Node> nodes,
                               const std::vector<int>& assignment) {
  std::vector<double> busy(nodes.size(), 0.0);
  for (const int i : deadline_order(tasks))
    busy[assignment[i]] += execution_time_ms(tasks[i], nodes[assignment[i]]);
  return busy;
}

SchedulerOutcome finish(std::span<const Task> tasks,
                        std::span<const Node> nodes,
                        std::vector<int> assignment,
                        std::vector<double> busy, const CostPolicy& policy,
                        Clock::time_point start) {
  SchedulerOutcome out;
  out.schedule.assignment = std::move(assignment);
  out.schedule.available_time_ms = std::move(busy);
  out.report = evaluate_schedule(tasks, nodes, out.schedule, policy);
  out.wall_ms = elapsed_ms(start);
  return out;
}

}  // namespace

std::string_view scheduler_name(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::MinCcv: return "min-ccv";
    case SchedulerKind::MinV: return "min-v";
    case SchedulerKind::RoundRobin: return "rr";
    case SchedulerKind::Random: return "random";
    case SchedulerKind::Genetic: return "ga";
    case SchedulerKind::Exact: return "exact";
  }
  return "?";
}

SchedulerKind scheduler_from_name(std::string_view name) {
  for (SchedulerKind kind : kAllSchedulers)
    if (name == scheduler_name(kind)) return kind;
  throw std::invalid_argument(
      "unknown scheduler '" + std::string(name) +
      "' (valid: min-ccv, min-v, rr, random, ga, exact)");
}

void validate(const GeneticParams& params) {
  const auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(params.population >= 1, "ga: population must be at least 1");
  require(params.generations >= 0, "ga: generations must be non-negative");
  require(params.tournament >= 1, "ga: tournament size must be at least 1");
  require(params.crossover_rate >= 0.0 && params.crossover_rate <= 1.0,
          "ga: crossover_rate must be in [0, 1]");
  require(params.mutation_rate >= 0.0 && params.mutation_rate <= 1.0,
          "ga: mutation_rate must be in [0, 1]");
  require(params.elitism >= 0, "ga: elitism must be non-negative");
}

SchedulerOutcome min_ccv(std::span<const Task> tasks,
                         std::span<const Node> nodes,
                         const CostPolicy& policy) {
  const auto start = Clock::now();
  check_inputs(tasks, nodes);

  std::vector<int> assignment(tasks.size(), -1);
  std::vector<double> busy(nodes.size(), 0.0);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& task = tasks[i];
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const Node& node = nodes[j];
      if (!mem_fits(task, node)) continue;
      const double resp = response_time_ms(task, node, busy[j]);
      const double cost =
          computation_cost(task, node) + communication_cost(task, node) +
          violation_cost(violation_pct(resp, task.deadline_ms), task.qos_pct,
                         task.penalty_per_pct, policy);
      if (cost < best_cost) {
        best_cost = cost;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) throw_infeasible(task, nodes);
    assignment[i] = best;
    busy[best] += execution_time_ms(task, nodes[best]);
  }
  return finish(tasks, nodes, std::move(assignment), std::move(busy), policy,
                start);
}

SchedulerOutcome min_v(std::span<const Task> tasks, std::span<const Node> nodes,
                       const CostPolicy& policy) {
  const auto start = Clock::now();
  check_inputs(tasks, nodes);

  std::vector<int> assignment(tasks.size(), -1);
  std::vector<double> busy(nodes.size(), 0.0);
  for (const int i : deadline_order(tasks)) {
    const Task& task = tasks[i];
    int best_on_time = -1;
    double best_on_time_cost = std::numeric_limits<double>::infinity();
    int best_late = -1;
    double best_late_cost = std::numeric_limits<double>::infinity();
    bool any_feasible = false;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const Node& node = nodes[j];
      if (!mem_fits(task, node)) continue;
      any_feasible = true;
      const double resp = response_time_ms(task, node, busy[j]);
      if (resp <= task.deadline_ms) {
        const double cost =
            computation_cost(task, node) + communication_cost(task, node);
        if (cost < best_on_time_cost) {
          best_on_time_cost = cost;
          best_on_time = static_cast<int>(j);
        }
      } else {
        const double cost =
            violation_cost(violation_pct(resp, task.deadline_ms), task.qos_pct,
                           task.penalty_per_pct, policy);
        if (cost < best_late_cost) {
          best_late_cost = cost;
          best_late = static_cast<int>(j);
        }
      }
    }
    if (!any_feasible) throw_infeasible(task, nodes);
    const int best = best_on_time >= 0 ? best_on_time : best_late;
    assignment[i] = best;
    busy[best] += execution_time_ms(task, nodes[best]);
  }
  return finish(tasks, nodes, std::move(assignment), std::move(busy), policy,
                start);
}

SchedulerOutcome round_robin(std::span<const Task> tasks,
                             std::span<const Node> nodes,
                             const CostPolicy& policy) {
  const auto start = Clock::now();
  check_inputs(tasks, nodes);

  const std::size_t m = nodes.size();
  std::vector<int> assignment(tasks.size(), -1);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& task = tasks[i];
    int chosen = -1;
    // First preference: a node that can also beat the deadline outright.
    for (std::size_t step = 0; step < m && chosen < 0; ++step) {
      const std::size_t j = (cursor + step) % m;
      if (mem_fits(task, nodes[j]) &&
          execution_time_ms(task, nodes[j]) < task.deadline_ms) {
        chosen = static_cast<int>(j);
      }
    }
    for (std::size_t step = 0; step < m && chosen < 0; ++step) {
      const std::size_t j = (cursor + step) % m;
      if (mem_fits(task, nodes[j])) chosen = static_cast<int>(j);
    }
    if (chosen < 0) throw_infeasible(task, nodes);
    assignment[i] = chosen;
    cursor = (static_cast<std::size_t>(chosen) + 1) % m;
  }
  auto busy = busy_times(tasks, nodes, assignment);
  return finish(tasks, nodes, std::move(assignment), std::move(busy), policy,
                start);
}

SchedulerOutcome random_scheduler(std::span<const Task> tasks,
                                  std::span<const Node> nodes,
                                  std::uint64_t seed,
                                  const CostPolicy& policy) {
  const auto start = Clock::now();
  check_inputs(tasks, nodes);

  rng::Engine eng(seed);
  std::vector<int> assignment(tasks.size(), -1);
  std::vector<int> feasible;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    feasible.clear();
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (mem_fits(tasks[i], nodes[j])) feasible.push_back(static_cast<int>(j));
    if (feasible.empty()) throw_infeasible(tasks[i], nodes);
    assignment[i] = feasible[eng.uniform_index(feasible.size())];
  }
  auto busy = busy_times(tasks, nodes, assignment);
  return finish(tasks, nodes, std::move(assignment), std::move(busy), policy,
                start);
}

namespace {

// Precomputed per-(task, node) figures plus a replay buffer, shared by the
// search-based schedulers.  replay_total prices an assignment with exactly
// the arithmetic of evaluate_schedule (same expressions, same accumulation
// order), so search rankings and final reports always agree.
class ReplayPricer {
 public:
  ReplayPricer(std::span<const Task> tasks, std::span<const Node> nodes,
               const CostPolicy& policy)
      : tasks_(tasks),
        nodes_(nodes),
        policy_(policy),
        order_(deadline_order(tasks)),
        exec_(tasks.size() * nodes.size()),
        comp_(tasks.size() * nodes.size()),
        comm_(tasks.size() * nodes.size()),
        busy_(nodes.size(), 0.0),
        touched_(tasks.size()) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const std::size_t k = i * nodes.size() + j;
        exec_[k] = execution_time_ms(tasks[i], nodes[j]);
        comp_[k] = computation_cost(tasks[i], nodes[j]);
        comm_[k] = communication_cost(tasks[i], nodes[j]);
      }
    }
  }

  // Memory-feasible node ids for each task, ascending.
  std::vector<std::vector<int>> feasible_lists() const {
    std::vector<std::vector<int>> lists(tasks_.size());
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      for (std::size_t j = 0; j < nodes_.size(); ++j)
        if (mem_fits(tasks_[i], nodes_[j]))
          lists[i].push_back(static_cast<int>(j));
      if (lists[i].empty()) throw_infeasible(tasks_[i], nodes_);
    }
    return lists;
  }

  double replay_total(const std::vector<int>& assignment) {
    const std::size_t m = nodes_.size();
    double total_comp = 0.0, total_comm = 0.0, total_viol = 0.0;
    std::size_t used = 0;
    for (const int i : order_) {
      const int j = assignment[i];
      const std::size_t k = static_cast<std::size_t>(i) * m +
                            static_cast<std::size_t>(j);
      const double resp = 2.0 * nodes_[j].delay_ms + exec_[k] + busy_[j];
      total_comp += comp_[k];
      total_comm += comm_[k];
      total_viol +=
          violation_cost(violation_pct(resp, tasks_[i].deadline_ms),
                         tasks_[i].qos_pct, tasks_[i].penalty_per_pct, policy_);
      if (busy_[j] == 0.0) touched_[used++] = j;
      busy_[j] += exec_[k];
    }
    for (std::size_t t = 0; t < used; ++t) busy_[touched_[t]] = 0.0;
    return total_comp + total_comm + total_viol;
  }

 private:
  std::span<const Task> tasks_;
  std::span<const Node> nodes_;
  CostPolicy policy_;
  std::vector<int> order_;
  std::vector<double> exec_, comp_, comm_;
  std::vector<double> busy_;
  std::vector<int> touched_;
};

}  // namespace

SchedulerOutcome genetic(std::span<const Task> tasks,
                         std::span<const Node> nodes,
                         const GeneticParams& params, std::uint64_t seed,
                         const CostPolicy& policy) {
  const auto start = Clock::now();
  check_inputs(tasks, nodes);
  validate(params);

  ReplayPricer pricer(tasks, nodes, policy);
  const auto feasible = pricer.feasible_lists();
  const std::size_t n = tasks.size();
  const std::size_t pop_size = static_cast<std::size_t>(params.population);

  rng::Engine eng(seed);
  const auto random_gene = [&](std::size_t i) {
    return feasible[i][eng.uniform_index(feasible[i].size())];
  };

  std::vector<std::vector<int>> pop(pop_size, std::vector<int>(n));
  std::vector<double> fitness(pop_size);
  for (std::size_t p = 0; p < pop_size; ++p) {
    for (std::size_t i = 0; i < n; ++i) pop[p][i] = random_gene(i);
    fitness[p] = pricer.replay_total(pop[p]);
  }

  std::vector<int> best;
  double best_fitness = std::numeric_limits<double>::infinity();
  const auto track_best = [&]() {
    for (std::size_t p = 0; p < pop_size; ++p) {
      if (fitness[p] < best_fitness) {
        best_fitness = fitness[p];
        best = pop[p];
      }
    }
  };
  track_best();

  const auto tournament_pick = [&]() -> const std::vector<int>& {
    std::size_t winner = eng.uniform_index(pop_size);
    for (int round = 1; round < params.tournament; ++round) {
      const std::size_t rival = eng.uniform_index(pop_size);
      if (fitness[rival] < fitness[winner]) winner = rival;
    }
    return pop[winner];
  };

  std::vector<std::vector<int>> next;
  next.reserve(pop_size);
  std::vector<std::size_t> rank(pop_size);
  for (int g = 0; g < params.generations; ++g) {
    next.clear();

    const std::size_t elites =
        std::min<std::size_t>(static_cast<std::size_t>(params.elitism),
                              pop_size);
    if (elites > 0) {
      std::iota(rank.begin(), rank.end(), std::size_t{0});
      std::partial_sort(rank.begin(), rank.begin() + elites, rank.end(),
                        [&](std::size_t a, std::size_t b) {
                          return fitness[a] != fitness[b]
                                     ? fitness[a] < fitness[b]
                                     : a < b;
                        });
      for (std::size_t e = 0; e < elites; ++e) next.push_back(pop[rank[e]]);
    }

    while (next.size() < pop_size) {
      const std::vector<int>& a = tournament_pick();
      const std::vector<int>& b = tournament_pick();
      std::vector<int> child = a;
      if (n >= 2 && eng.chance(params.crossover_rate)) {
        const std::size_t cut = static_cast<std::size_t>(
            eng.uniform_int(1, static_cast<std::int64_t>(n) - 1));
        std::copy(b.begin() + cut, b.end(), child.begin() + cut);
      }
      for (std::size_t i = 0; i < n; ++i)
        if (eng.chance(params.mutation_rate)) child[i] = random_gene(i);
      next.push_back(std::move(child));
    }

    pop.swap(next);
    for (std::size_t p = 0; p < pop_size; ++p)
      fitness[p] = pricer.replay_total(pop[p]);
    track_best();
  }

  return finish(tasks, nodes, best, busy_times(tasks, nodes, best), policy,
                start);
}

SchedulerOutcome exact(std::span<const Task> tasks, std::span<const Node> nodes,
                       const CostPolicy& policy, std::uint64_t budget) {
  const auto start = Clock::now();
  check_inputs(tasks, nodes);

  const double n = static_cast<double>(tasks.size());
  const double m = static_cast<double>(nodes.size());
  const double log2_states = n * std::log2(m);
  if (log2_states > std::log2(static_cast<double>(budget)) + 1e-12) {
    char approx[64];
    std::snprintf(approx, sizeof(approx), "%.4g", std::pow(m, n));
    throw EnumerationBudgetExceeded(
        std::pow(m, n), budget,
        "exhaustive search would visit about " + std::string(approx) +
            " assignments (" + std::to_string(nodes.size()) + "^" +
            std::to_string(tasks.size()) + "), over the budget of " +
            std::to_string(budget));
  }

  ReplayPricer pricer(tasks, nodes, policy);
  const auto feasible = pricer.feasible_lists();

  std::vector<std::size_t> digit(tasks.size(), 0);
  std::vector<int> current(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) current[i] = feasible[i][0];

  std::vector<int> best = current;
  double best_total = std::numeric_limits<double>::infinity();
  while (true) {
    const double total = pricer.replay_total(current);
    if (total < best_total) {  // strict: keeps the lexicographically first
      best_total = total;
      best = current;
    }
    std::size_t i = tasks.size();
    while (i > 0) {
      --i;
      if (++digit[i] < feasible[i].size()) {
        current[i] = feasible[i][digit[i]];
        break;
      }
      digit[i] = 0;
      current[i] = feasible[i][0];
      if (i == 0) return finish(tasks, nodes, best,
                                busy_times(tasks, nodes, best), policy, start);
    }
  }
}

SchedulerOutcome run_scheduler(SchedulerKind kind, std::span<const Task> tasks,
                               std::span<const Node> nodes,
                               const SchedulerConfig& config) {
  switch (kind) {
    case SchedulerKind::MinCcv: return min_ccv(tasks, nodes, config.policy);
    case SchedulerKind::MinV: return min_v(tasks, nodes, config.policy);
    case SchedulerKind::RoundRobin:
      return round_robin(tasks, nodes, config.policy);
    case SchedulerKind::Random:
      return random_scheduler(tasks, nodes, config.seed, config.policy);
    case SchedulerKind::Genetic:
      return genetic(tasks, nodes, config.genetic, config.seed, config.policy);
    case SchedulerKind::Exact:
      return exact(tasks, nodes, config.policy, config.budget);
  }
  throw std::invalid_argument("unknown scheduler kind");
}

}  // namespace fogsched
