#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "fogsched/model.hpp"
#include "fogsched/workload.hpp"

using namespace fogsched;

namespace {

doctest::Approx near(double v) { return doctest::Approx(v).epsilon(1e-12); }

// Assignments produced by the two greedy schedulers on the bundled case
// study; frozen from an independent reference implementation.
const std::vector<int> kMinCcvAssignment{0, 2, 1, 2, 1, 2, 0, 2, 0, 1};
const std::vector<int> kMinVAssignment{0, 2, 1, 2, 1, 2, 0, 2, 0, 0};

}  // namespace

TEST_CASE("execution time converts MI and MIPS to milliseconds") {
  Task task;
  task.size_mi = 2000;
  Node node;
  node.cpu_mips = 1500;
  CHECK(execution_time_ms(task, node) == near(1333.3333333333333));
}

TEST_CASE("computation cost prices CPU seconds plus memory footprint") {
  const Instance inst = toy_instance();
  // 0.3 G$/s * 4/3 s + 0.03 G$/MB * 100 MB
  CHECK(computation_cost(inst.tasks[0], inst.nodes[0]) == near(3.4));
  // 1.5 G$/s * 1 s + 0.05 G$/MB * 120 MB
  CHECK(computation_cost(inst.tasks[5], inst.nodes[2]) == near(7.5));
}

TEST_CASE("communication cost prices transferred megabytes") {
  const Instance inst = toy_instance();
  CHECK(communication_cost(inst.tasks[0], inst.nodes[0]) == near(0.006));
  CHECK(communication_cost(inst.tasks[5], inst.nodes[2]) == near(0.176));
}

TEST_CASE("response time adds the round trip, execution, and waiting") {
  const Instance inst = toy_instance();
  CHECK(response_time_ms(inst.tasks[0], inst.nodes[0], 0.0) ==
        near(1335.3333333333333));
  CHECK(response_time_ms(inst.tasks[0], inst.nodes[0], 100.0) ==
        near(1435.3333333333333));
}

TEST_CASE("violation percentage is relative lateness, zero when on time") {
  CHECK(violation_pct(1200.0, 1000.0) == near(20.0));
  CHECK(violation_pct(2000.0, 500.0) == near(300.0));
  CHECK(violation_pct(999.0, 1000.0) == 0.0);
  CHECK(violation_pct(1000.0, 1000.0) == 0.0);
}

TEST_CASE("violation cost bills lateness beyond the tolerated share") {
  CHECK(violation_cost(20.0, 90.0, 0.3) == near(3.0));
  // Lateness within the tolerance is free under the default policy...
  CHECK(violation_cost(5.0, 90.0, 0.3) == 0.0);
  CHECK(violation_cost(0.0, 95.0, 0.4) == 0.0);
  // ...and earns a credit in raw mode.
  const CostPolicy raw{false};
  CHECK(violation_cost(5.0, 90.0, 0.3, raw) == near(-1.5));
  CHECK(violation_cost(20.0, 90.0, 0.3, raw) == near(3.0));
}

TEST_CASE("deadline order sorts by deadline and breaks ties by id") {
  const Instance inst = toy_instance();
  CHECK(deadline_order(inst.tasks) ==
        std::vector<int>{9, 2, 6, 1, 7, 0, 4, 5, 3, 8});

  std::vector<Task> ties(3);
  for (int i = 0; i < 3; ++i) {
    ties[i].id = i;
    ties[i].size_mi = 1;
    ties[i].mem_mb = 1;
    ties[i].deadline_ms = 100;
    ties[i].qos_pct = 95;
  }
  CHECK(deadline_order(ties) == std::vector<int>{0, 1, 2});
}

TEST_CASE("evaluating the case study under the min-v assignment") {
  const Instance inst = toy_instance();
  Schedule schedule;
  schedule.assignment = kMinVAssignment;
  const CostReport report =
      evaluate_schedule(inst.tasks, inst.nodes, schedule);

  CHECK(report.total_comp == near(59.803333333333335));
  CHECK(report.total_comm == near(0.6920000000000001));
  CHECK(report.total_viol == near(8.448888888888884));
  CHECK(report.total == near(68.94422222222222));
  CHECK(report.violated_tasks == 3);
  CHECK(report.pdst_pct == near(70.0));
  CHECK(report.makespan_ms == near(7666.666666666666));

  // Per-task spot checks for the three late tasks.
  CHECK(report.per_task[0].response_ms == near(1668.6666666666665));
  CHECK(report.per_task[0].violation_pct == near(11.244444444444435));
  CHECK(report.per_task[0].c_viol == near(1.4488888888888871));
  CHECK(report.per_task[7].response_ms == near(1466.6666666666665));
  CHECK(report.per_task[7].violation_pct == near(22.22222222222221));
  CHECK(report.per_task[7].c_viol == near(3.9666666666666632));
  CHECK(report.per_task[9].response_ms == near(135.33333333333334));
  CHECK(report.per_task[9].violation_pct == near(35.33333333333334));
  CHECK(report.per_task[9].c_viol == near(3.0333333333333345));
  // An on-time task pays no lateness.
  CHECK(report.per_task[8].violation_pct == 0.0);
  CHECK(report.per_task[8].c_viol == 0.0);
}

TEST_CASE("evaluating the case study under the min-ccv assignment") {
  const Instance inst = toy_instance();
  Schedule schedule;
  schedule.assignment = kMinCcvAssignment;
  const CostReport report =
      evaluate_schedule(inst.tasks, inst.nodes, schedule);
  CHECK(report.total_viol == near(60.98787878787879));
  CHECK(report.total == near(120.06587878787879));
  CHECK(report.violated_tasks == 5);
  CHECK(report.pdst_pct == near(50.0));
  CHECK(report.makespan_ms == near(7533.333333333333));
}

TEST_CASE("report totals and rates are consistent with per-task entries") {
  const Instance inst = toy_instance();
  Schedule schedule;
  schedule.assignment = kMinVAssignment;
  const CostReport report =
      evaluate_schedule(inst.tasks, inst.nodes, schedule);

  double comp = 0, comm = 0, viol = 0;
  int late = 0;
  for (const TaskCost& tc : report.per_task) {
    comp += tc.c_comp;
    comm += tc.c_comm;
    viol += tc.c_viol;
    if (tc.violation_pct > 0.0) ++late;
  }
  CHECK(report.total_comp == near(comp));
  CHECK(report.total_comm == near(comm));
  CHECK(report.total_viol == near(viol));
  CHECK(report.total == near(comp + comm + viol));
  CHECK(report.violated_tasks == late);
  CHECK(report.pdst_pct ==
        near(100.0 * (10 - late) / static_cast<double>(10)));

  // Makespan equals the largest per-node execution sum, delays excluded.
  std::vector<double> busy(inst.nodes.size(), 0.0);
  for (std::size_t i = 0; i < inst.tasks.size(); ++i)
    busy[schedule.assignment[i]] +=
        execution_time_ms(inst.tasks[i], inst.nodes[schedule.assignment[i]]);
  CHECK(report.makespan_ms == near(*std::max_element(busy.begin(), busy.end())));
}

TEST_CASE("raw pricing mode can only lower the lateness bill") {
  const Instance inst = toy_instance();
  Schedule schedule;
  schedule.assignment = kMinVAssignment;
  const CostReport clamped =
      evaluate_schedule(inst.tasks, inst.nodes, schedule, CostPolicy{true});
  const CostReport raw =
      evaluate_schedule(inst.tasks, inst.nodes, schedule, CostPolicy{false});
  CHECK(raw.total_viol < clamped.total_viol);
  CHECK(raw.total_comp == clamped.total_comp);
  CHECK(raw.total_comm == clamped.total_comm);
  for (const TaskCost& tc : clamped.per_task) CHECK(tc.c_viol >= 0.0);
}

TEST_CASE("queue replay order does not depend on assignment vector order") {
  // Two tasks on one node: the tighter deadline is served first even when
  // it appears later in the task list.
  std::vector<Task> tasks(2);
  tasks[0] = Task{0, 1000, 10, 0, 0, 10000, 95, 0.1};  // loose deadline
  tasks[1] = Task{1, 1000, 10, 0, 0, 1100, 95, 0.1};   // tight deadline
  std::vector<Node> nodes{Node{0, NodeKind::Fog, 1000, 0.1, 0.01, 0.01, 64, 5}};
  Schedule schedule;
  schedule.assignment = {0, 0};
  const CostReport report = evaluate_schedule(tasks, nodes, schedule);
  // Task 1 runs first (1000 ms + 10 ms round trip), task 0 waits for it.
  CHECK(report.per_task[1].response_ms == near(1010.0));
  CHECK(report.per_task[0].response_ms == near(2010.0));
  CHECK(report.violated_tasks == 0);
}

TEST_CASE("evaluation rejects malformed schedules") {
  const Instance inst = toy_instance();
  Schedule schedule;

  schedule.assignment = {0, 1};  // wrong length
  CHECK_THROWS_AS(evaluate_schedule(inst.tasks, inst.nodes, schedule),
                  ConstraintViolation);

  schedule.assignment = kMinVAssignment;
  schedule.assignment[4] = 3;  // unknown node
  try {
    evaluate_schedule(inst.tasks, inst.nodes, schedule);
    FAIL("expected ConstraintViolation");
  } catch (const ConstraintViolation& e) {
    CHECK(e.task_id() == 4);
    CHECK(e.node_id() == 3);
  }

  schedule.assignment = kMinVAssignment;
  schedule.assignment[1] = 0;  // task 1 needs 200 MB; node 0 offers 220 — ok
  CHECK_NOTHROW(evaluate_schedule(inst.tasks, inst.nodes, schedule));
  schedule.assignment[1] = 1;  // node 1 offers only 170 MB
  try {
    evaluate_schedule(inst.tasks, inst.nodes, schedule);
    FAIL("expected ConstraintViolation");
  } catch (const ConstraintViolation& e) {
    CHECK(e.task_id() == 1);
    CHECK(e.node_id() == 1);
  }

  CHECK_THROWS_AS(
      evaluate_schedule(std::span<const Task>{}, inst.nodes, Schedule{}),
      ConstraintViolation);
}

TEST_CASE("field validation rejects out-of-range values") {
  Task task{0, 100, 50, 0.5, 0.5, 1000, 95, 0.1};
  CHECK_NOTHROW(validate(task));
  task.size_mi = 0;
  CHECK_THROWS_AS(validate(task), std::invalid_argument);
  task.size_mi = 100;
  task.qos_pct = 101;
  CHECK_THROWS_AS(validate(task), std::invalid_argument);
  task.qos_pct = 95;
  task.deadline_ms = -1;
  CHECK_THROWS_AS(validate(task), std::invalid_argument);

  Node node{0, NodeKind::Fog, 1000, 0.3, 0.01, 0.01, 128, 2};
  CHECK_NOTHROW(validate(node));
  node.cpu_mips = 0;
  CHECK_THROWS_AS(validate(node), std::invalid_argument);
  node.cpu_mips = 1000;
  node.delay_ms = -0.5;
  CHECK_THROWS_AS(validate(node), std::invalid_argument);
}

TEST_CASE("node kind names round-trip") {
  CHECK(to_string(NodeKind::Fog) == "fog");
  CHECK(to_string(NodeKind::Cloud) == "cloud");
  CHECK(node_kind_from_string("fog") == NodeKind::Fog);
  CHECK(node_kind_from_string("cloud") == NodeKind::Cloud);
  CHECK_THROWS_AS(node_kind_from_string("edge"), std::invalid_argument);
}
