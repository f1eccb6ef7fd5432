#include "fogsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fogsched {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::Fog ? "fog" : "cloud";
}

NodeKind node_kind_from_string(std::string_view s) {
  if (s == "fog") return NodeKind::Fog;
  if (s == "cloud") return NodeKind::Cloud;
  throw std::invalid_argument("unknown node kind '" + std::string(s) +
                              "' (expected 'fog' or 'cloud')");
}

void validate(const Task& task) {
  const std::string ctx = "task " + std::to_string(task.id) + ": ";
  require(task.id >= 0, ctx + "id must be non-negative");
  require(finite_pos(task.size_mi), ctx + "size_mi must be positive");
  require(finite_pos(task.mem_mb), ctx + "mem_mb must be positive");
  require(finite_nonneg(task.input_mb), ctx + "input_mb must be non-negative");
  require(finite_nonneg(task.output_mb), ctx + "output_mb must be non-negative");
  require(finite_pos(task.deadline_ms), ctx + "deadline_ms must be positive");
  require(std::isfinite(task.qos_pct) && task.qos_pct > 0.0 &&
              task.qos_pct <= 100.0,
          ctx + "qos_pct must be in (0, 100]");
  require(finite_nonneg(task.penalty_per_pct),
          ctx + "penalty_per_pct must be non-negative");
}

void validate(const Node& node) {
  const std::string ctx = "node " + std::to_string(node.id) + ": ";
  require(node.id >= 0, ctx + "id must be non-negative");
  require(finite_pos(node.cpu_mips), ctx + "cpu_mips must be positive");
  require(finite_nonneg(node.cost_cpu), ctx + "cost_cpu must be non-negative");
  require(finite_nonneg(node.cost_mem), ctx + "cost_mem must be non-negative");
  require(finite_nonneg(node.cost_bw), ctx + "cost_bw must be non-negative");
  require(finite_pos(node.mem_mb), ctx + "mem_mb must be positive");
  require(finite_nonneg(node.delay_ms), ctx + "delay_ms must be non-negative");
}

double execution_time_ms(const Task& task, const Node& node) {
  return task.size_mi / node.cpu_mips * 1000.0;
}

double computation_cost(const Task& task, const Node& node) {
  const double exec_s = task.size_mi / node.cpu_mips;
  return node.cost_cpu * exec_s + node.cost_mem * task.mem_mb;
}

double communication_cost(const Task& task, const Node& node) {
  return node.cost_bw * (task.input_mb + task.output_mb);
}

double response_time_ms(const Task& task, const Node& node, double waiting_ms) {
  return 2.0 * node.delay_ms + execution_time_ms(task, node) + waiting_ms;
}

double violation_pct(double response_ms, double deadline_ms) {
  return std::max(0.0, response_ms - deadline_ms) / deadline_ms * 100.0;
}

double violation_cost(double violation_pct, double qos_pct,
                      double penalty_per_pct, const CostPolicy& policy) {
  const double billed = (violation_pct - (100.0 - qos_pct)) * penalty_per_pct;
  return policy.clamp_violation_cost ? std::max(0.0, billed) : billed;
}

std::vector<int> deadline_order(std::span<const Task> tasks) {
  std::vector<int> order(tasks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return tasks[a].deadline_ms < tasks[b].deadline_ms;
  });
  return order;
}

CostReport evaluate_schedule(std::span<const Task> tasks,
                             std::span<const Node> nodes,
                             const Schedule& schedule,
                             const CostPolicy& policy) {
  if (tasks.empty())
    throw ConstraintViolation(-1, -1, "cannot evaluate an empty task list");
  if (nodes.empty())
    throw ConstraintViolation(-1, -1, "cannot evaluate an empty node pool");
  if (schedule.assignment.size() != tasks.size()) {
    throw ConstraintViolation(
        -1, -1,
        "assignment covers " + std::to_string(schedule.assignment.size()) +
            " tasks but the instance has " + std::to_string(tasks.size()));
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const int j = schedule.assignment[i];
    if (j < 0 || static_cast<std::size_t>(j) >= nodes.size()) {
      throw ConstraintViolation(
          static_cast<int>(i), j,
          "task " + std::to_string(i) + " is assigned to unknown node " +
              std::to_string(j));
    }
    if (tasks[i].mem_mb > nodes[j].mem_mb) {
      throw ConstraintViolation(
          static_cast<int>(i), j,
          "task " + std::to_string(i) + " needs " +
              std::to_string(tasks[i].mem_mb) + " MB but node " +
              std::to_string(j) + " has " + std::to_string(nodes[j].mem_mb) +
              " MB");
    }
  }

  CostReport report;
  report.per_task.resize(tasks.size());
  std::vector<double> busy_ms(nodes.size(), 0.0);

  int on_time = 0;
  for (const int i : deadline_order(tasks)) {
    const Task& task = tasks[i];
    const int j = schedule.assignment[i];
    const Node& node = nodes[j];

    TaskCost& tc = report.per_task[i];
    tc.response_ms = response_time_ms(task, node, busy_ms[j]);
    tc.violation_pct = violation_pct(tc.response_ms, task.deadline_ms);
    tc.c_comp = computation_cost(task, node);
    tc.c_comm = communication_cost(task, node);
    tc.c_viol = violation_cost(tc.violation_pct, task.qos_pct,
                               task.penalty_per_pct, policy);

    report.total_comp += tc.c_comp;
    report.total_comm += tc.c_comm;
    report.total_viol += tc.c_viol;
    if (tc.violation_pct > 0.0) {
      ++report.violated_tasks;
    } else {
      ++on_time;
    }
    busy_ms[j] += execution_time_ms(task, node);
  }

  report.total = report.total_comp + report.total_comm + report.total_viol;
  report.pdst_pct = 100.0 * on_time / static_cast<double>(tasks.size());
  report.makespan_ms = *std::max_element(busy_ms.begin(), busy_ms.end());
  return report;
}

}  // namespace fogsched
