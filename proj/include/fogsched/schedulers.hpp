#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>

#include "fogsched/model.hpp"

// Scheduling strategies.  Every scheduler returns the assignment it built,
// the node busy times it accumulated, and a full cost report produced by
// evaluate_schedule, so results from different strategies are directly
// comparable.
//
// All schedulers treat memory capacity as a hard constraint and throw
// InfeasibleTask when some task fits no node at all.

namespace fogsched {

enum class SchedulerKind { MinCcv, MinV, RoundRobin, Random, Genetic, Exact };

inline constexpr std::array<SchedulerKind, 6> kAllSchedulers{
    SchedulerKind::MinCcv, SchedulerKind::MinV,    SchedulerKind::RoundRobin,
    SchedulerKind::Random, SchedulerKind::Genetic, SchedulerKind::Exact};

// Command-line names: "min-ccv", "min-v", "rr", "random", "ga", "exact".
std::string_view scheduler_name(SchedulerKind kind);
SchedulerKind scheduler_from_name(std::string_view name);  // throws std::invalid_argument

struct GeneticParams {
  int population = 100;
  int generations = 1000;
  int tournament = 4;        // tournament size for parent selection
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;  // per-gene reset probability
  int elitism = 1;             // individuals copied unchanged each generation
};

void validate(const GeneticParams& params);  // throws std::invalid_argument

struct SchedulerOutcome {
  Schedule schedule;
  CostReport report;
  double wall_ms = 0.0;  // wall-clock time spent scheduling + pricing
};

// Greedy pass in task input order; each task goes to the memory-feasible
// node with the cheapest computation + communication + projected lateness
// cost, given the load already placed.  Ties pick the lowest node id.
SchedulerOutcome min_ccv(std::span<const Task> tasks,
                         std::span<const Node> nodes,
                         const CostPolicy& policy = {});

// Greedy pass in ascending (deadline, id) order; prefers nodes that meet
// the task's deadline (cheapest computation + communication among them),
// and otherwise picks the node with the cheapest lateness cost.
SchedulerOutcome min_v(std::span<const Task> tasks, std::span<const Node> nodes,
                       const CostPolicy& policy = {});

// Circular pass over nodes.  A task takes the next memory-feasible node
// whose bare execution time beats the deadline; if no node in the cycle
// does, it takes the next memory-feasible node regardless.
SchedulerOutcome round_robin(std::span<const Task> tasks,
                             std::span<const Node> nodes,
                             const CostPolicy& policy = {});

// Uniform choice among the memory-feasible nodes of each task.
SchedulerOutcome random_scheduler(std::span<const Task> tasks,
                                  std::span<const Node> nodes,
                                  std::uint64_t seed,
                                  const CostPolicy& policy = {});

// Genetic search over assignment vectors (genes range over each task's
// memory-feasible nodes).  Fitness is the total cost of the replayed
// schedule; selection is by tournament, with single-point crossover,
// per-gene reset mutation, and elitism.  Deterministic in (instance,
// params, seed).
SchedulerOutcome genetic(std::span<const Task> tasks,
                         std::span<const Node> nodes,
                         const GeneticParams& params, std::uint64_t seed,
                         const CostPolicy& policy = {});

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// Exhaustive enumeration refused because the search space is too large.
class EnumerationBudgetExceeded : public std::runtime_error {
 public:
  EnumerationBudgetExceeded(double state_count, std::uint64_t budget,
                            const std::string& what)
      : std::runtime_error(what), state_count_(state_count), budget_(budget) {}
  double state_count() const { return state_count_; }
  std::uint64_t budget() const { return budget_; }

 private:
  double state_count_;
  std::uint64_t budget_;
};

// Exhaustive search over all node^task assignments (restricted to
// memory-feasible nodes).  Returns a cost-minimal schedule, breaking ties
// toward the lexicographically smallest assignment vector.  Throws
// EnumerationBudgetExceeded when nodes^tasks exceeds `budget`.
SchedulerOutcome exact(std::span<const Task> tasks, std::span<const Node> nodes,
                       const CostPolicy& policy = {},
                       std::uint64_t budget = kDefaultEnumerationBudget);

struct SchedulerConfig {
  std::uint64_t seed = 0;  // consumed by "random" and "ga"
  GeneticParams genetic;
  CostPolicy policy;
  std::uint64_t budget = kDefaultEnumerationBudget;  // consumed by "exact"
};

SchedulerOutcome run_scheduler(SchedulerKind kind, std::span<const Task> tasks,
                               std::span<const Node> nodes,
                               const SchedulerConfig& config = {});

}  // namespace fogsched
