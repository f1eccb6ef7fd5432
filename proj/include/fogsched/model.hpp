#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Cost model for scheduling a bag of independent tasks onto a pool of
// fog and cloud nodes.
//
// Conventions used throughout:
//   * time is in milliseconds, except node CPU rates (MI/s) and CPU prices
//     (G$ per second of execution);
//   * task ids and node ids are 0-based and equal to their position in the
//     instance vectors;
//   * money is in G$ (price units are per MB or per % as noted per field).

namespace fogsched {

enum class NodeKind { Fog, Cloud };

std::string_view to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view s);  // throws std::invalid_argument

struct Task {
  int id = 0;
  double size_mi = 0.0;          // workload [million instructions], > 0
  double mem_mb = 0.0;           // required memory [MB], > 0
  double input_mb = 0.0;         // input transfer [MB], >= 0
  double output_mb = 0.0;        // output transfer [MB], >= 0
  double deadline_ms = 0.0;      // response-time deadline [ms], > 0
  double qos_pct = 0.0;          // tolerated service level [%], (0, 100]
  double penalty_per_pct = 0.0;  // lateness price [G$ per percentage point], >= 0
};

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Fog;
  double cpu_mips = 0.0;  // processing rate [MI/s], > 0
  double cost_cpu = 0.0;  // CPU price [G$/s], >= 0
  double cost_mem = 0.0;  // memory price [G$/MB], >= 0
  double cost_bw = 0.0;   // bandwidth price [G$/MB], >= 0
  double mem_mb = 0.0;    // memory capacity [MB], > 0
  double delay_ms = 0.0;  // one-way broker<->node latency [ms], >= 0
};

// Throw std::invalid_argument when a field is out of range.
void validate(const Task& task);
void validate(const Node& node);

// How lateness is priced.  By default the per-task violation cost is
// max(0, (V - (100 - qos)) * penalty): lateness within the tolerance
// implied by the task's service level is free.  Raw mode skips the outer
// clamp and lets early completion earn a (negative) credit.
struct CostPolicy {
  bool clamp_violation_cost = true;
};

// An assignment of every task to one node, plus each node's accumulated
// busy time as built up by a scheduler (same accounting as the replay in
// evaluate_schedule).
struct Schedule {
  std::vector<int> assignment;            // task id -> node id
  std::vector<double> available_time_ms;  // node id -> total execution queued
};

struct TaskCost {
  double response_ms = 0.0;
  double violation_pct = 0.0;
  double c_comp = 0.0;
  double c_comm = 0.0;
  double c_viol = 0.0;
};

struct CostReport {
  std::vector<TaskCost> per_task;  // indexed by task id
  double total_comp = 0.0;
  double total_comm = 0.0;
  double total_viol = 0.0;
  double total = 0.0;         // total_comp + total_comm + total_viol
  double pdst_pct = 0.0;      // share of tasks finishing within deadline [%]
  double makespan_ms = 0.0;   // max accumulated execution time over nodes
  int violated_tasks = 0;     // tasks with violation_pct > 0
};

// A task that no node in the pool can host (memory capacity).
class InfeasibleTask : public std::runtime_error {
 public:
  InfeasibleTask(int task_id, const std::string& what)
      : std::runtime_error(what), task_id_(task_id) {}
  int task_id() const { return task_id_; }

 private:
  int task_id_;
};

// A schedule that breaks a hard constraint (bad shape, bad node id, or a
// task placed on a node without enough memory).
class ConstraintViolation : public std::runtime_error {
 public:
  ConstraintViolation(int task_id, int node_id, const std::string& what)
      : std::runtime_error(what), task_id_(task_id), node_id_(node_id) {}
  int task_id() const { return task_id_; }
  int node_id() const { return node_id_; }

 private:
  int task_id_;
  int node_id_;
};

// Execution time of `task` on `node` [ms].
double execution_time_ms(const Task& task, const Node& node);

// Processing price: CPU seconds consumed times the CPU price, plus the
// memory footprint times the memory price.
double computation_cost(const Task& task, const Node& node);

// Transfer price: (input + output) MB times the bandwidth price.
double communication_cost(const Task& task, const Node& node);

// Round trip to the node, queue waiting, then execution.
double response_time_ms(const Task& task, const Node& node, double waiting_ms);

// Relative lateness [%]: max(0, response - deadline) / deadline * 100.
double violation_pct(double response_ms, double deadline_ms);

// Price of a given lateness percentage for a task's service level.
double violation_cost(double violation_pct, double qos_pct,
                      double penalty_per_pct, const CostPolicy& policy = {});

// Task ids sorted by ascending (deadline, id) — the order in which every
// node serves its queue.
std::vector<int> deadline_order(std::span<const Task> tasks);

// Replay `schedule` and price it.  Each node serves the tasks assigned to
// it in ascending (deadline, id) order; a task's waiting time is the
// execution time of the tasks ahead of it in its node's queue.  Throws
// ConstraintViolation when the assignment is malformed or places a task on
// a node with too little memory.
CostReport evaluate_schedule(std::span<const Task> tasks,
                             std::span<const Node> nodes,
                             const Schedule& schedule,
                             const CostPolicy& policy = {});

}  // namespace fogsched
