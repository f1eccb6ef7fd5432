#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fogsched/workload.hpp"

using namespace fogsched;

namespace {

bool same_task(const Task& a, const Task& b) {
  return a.id == b.id && a.size_mi == b.size_mi && a.mem_mb == b.mem_mb &&
         a.input_mb == b.input_mb && a.output_mb == b.output_mb &&
         a.deadline_ms == b.deadline_ms && a.qos_pct == b.qos_pct &&
         a.penalty_per_pct == b.penalty_per_pct;
}

bool same_node(const Node& a, const Node& b) {
  return a.id == b.id && a.kind == b.kind && a.cpu_mips == b.cpu_mips &&
         a.cost_cpu == b.cost_cpu && a.cost_mem == b.cost_mem &&
         a.cost_bw == b.cost_bw && a.mem_mb == b.mem_mb &&
         a.delay_ms == b.delay_ms;
}

bool same_instance(const Instance& a, const Instance& b) {
  if (a.tasks.size() != b.tasks.size() || a.nodes.size() != b.nodes.size())
    return false;
  for (std::size_t i = 0; i < a.tasks.size(); ++i)
    if (!same_task(a.tasks[i], b.tasks[i])) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (!same_node(a.nodes[i], b.nodes[i])) return false;
  return true;
}

bool in_range(double v, const ValueRange& r) { return v >= r.lo && v <= r.hi; }

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

// A structurally valid one-task one-node document to mutate in error tests.
const char* kMinimalInstance = R"({
  "schema_version": 1,
  "tasks": [{"id": 0, "size_mi": 100, "mem_mb": 50, "input_mb": 0.5,
             "output_mb": 0.2, "deadline_ms": 1000, "qos_pct": 95,
             "penalty_per_pct": 0.1}],
  "nodes": [{"id": 0, "kind": "fog", "cpu_mips": 1000, "cost_cpu": 0.3,
             "cost_mem": 0.01, "cost_bw": 0.01, "mem_mb": 128,
             "delay_ms": 2}]
})";

}  // namespace

TEST_CASE("task generation is deterministic in the seed") {
  const TaskDistribution dist;
  const auto a = generate_tasks(64, dist, 123);
  const auto b = generate_tasks(64, dist, 123);
  const auto c = generate_tasks(64, dist, 124);
  REQUIRE(a.size() == 64);
  bool identical = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    identical = identical && same_task(a[i], b[i]);
  CHECK(identical);
  bool all_same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    all_same = all_same && same_task(a[i], c[i]);
  CHECK_FALSE(all_same);
}

TEST_CASE("generated tasks respect the class ranges and shared ranges") {
  const TaskDistribution dist;
  const auto tasks = generate_tasks(500, dist, 99);
  for (const Task& t : tasks) {
    bool in_some_class = false;
    for (const TaskClassRanges& cls : dist.classes) {
      if (in_range(t.size_mi, cls.size_mi) &&
          in_range(t.deadline_ms, cls.deadline_ms)) {
        in_some_class = true;
        break;
      }
    }
    CHECK(in_some_class);
    CHECK(in_range(t.mem_mb, dist.mem_mb));
    CHECK(in_range(t.input_mb, dist.input_mb));
    CHECK(in_range(t.output_mb, dist.output_mb));
    CHECK(in_range(t.qos_pct, dist.qos_pct));
    CHECK(in_range(t.penalty_per_pct, dist.penalty_per_pct));
    CHECK(t.size_mi == static_cast<double>(static_cast<long long>(t.size_mi)));
  }
  for (int i = 0; i < 500; ++i) CHECK(tasks[i].id == i);
}

TEST_CASE("class weights steer the size class") {
  TaskDistribution dist;
  dist.class_weights = {0.0, 0.0, 1.0};  // everything in the large class
  const auto tasks = generate_tasks(100, dist, 7);
  for (const Task& t : tasks) {
    CHECK(in_range(t.size_mi, dist.classes[2].size_mi));
    CHECK(in_range(t.deadline_ms, dist.classes[2].deadline_ms));
  }
}

TEST_CASE("degenerate ranges pin every draw to the single value") {
  TaskDistribution dist;
  for (TaskClassRanges& cls : dist.classes) {
    cls.size_mi = {500, 500};
    cls.deadline_ms = {1000, 1000};
  }
  dist.mem_mb = {64, 64};
  dist.input_mb = {0.5, 0.5};
  dist.output_mb = {0.25, 0.25};
  dist.qos_pct = {95, 95};
  dist.penalty_per_pct = {0.2, 0.2};
  for (const Task& t : generate_tasks(20, dist, 3)) {
    CHECK(t.size_mi == 500.0);
    CHECK(t.mem_mb == 64.0);
    CHECK(t.input_mb == 0.5);
    CHECK(t.output_mb == 0.25);
    CHECK(t.deadline_ms == 1000.0);
    CHECK(t.qos_pct == 95.0);
    CHECK(t.penalty_per_pct == 0.2);
  }
}

TEST_CASE("node generation orders fog before cloud and respects ranges") {
  const NodeDistribution dist;
  const auto nodes = generate_nodes(4, 3, dist, 55);
  REQUIRE(nodes.size() == 7);
  for (int i = 0; i < 7; ++i) {
    CHECK(nodes[i].id == i);
    const bool fog = i < 4;
    CHECK(nodes[i].kind == (fog ? NodeKind::Fog : NodeKind::Cloud));
    const NodeKindRanges& r = fog ? dist.fog : dist.cloud;
    CHECK(in_range(nodes[i].cpu_mips, r.cpu_mips));
    CHECK(in_range(nodes[i].cost_cpu, r.cost_cpu));
    CHECK(in_range(nodes[i].cost_mem, r.cost_mem));
    CHECK(in_range(nodes[i].cost_bw, r.cost_bw));
    CHECK(in_range(nodes[i].mem_mb, r.mem_mb));
    CHECK(in_range(nodes[i].delay_ms, r.delay_ms));
  }
  CHECK_THROWS_AS(generate_nodes(0, 0, dist, 1), std::invalid_argument);
}

TEST_CASE("distribution validation rejects inverted or misplaced bounds") {
  TaskDistribution bad;
  bad.mem_mb = {200, 50};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  TaskDistribution negative;
  negative.penalty_per_pct = {-0.5, 0.5};
  CHECK_THROWS_AS(validate(negative), std::invalid_argument);
  TaskDistribution qos;
  qos.qos_pct = {90, 120};
  CHECK_THROWS_AS(validate(qos), std::invalid_argument);
  TaskDistribution weights;
  weights.class_weights = {0, 0, 0};
  CHECK_THROWS_AS(validate(weights), std::invalid_argument);

  NodeDistribution nodes;
  nodes.fog.delay_ms = {5, 1};
  CHECK_THROWS_AS(validate(nodes), std::invalid_argument);
}

TEST_CASE("the bundled case study has a stable canonical digest") {
  const Instance inst = toy_instance();
  REQUIRE(inst.tasks.size() == 10);
  REQUIRE(inst.nodes.size() == 3);
  CHECK(inst.nodes[0].kind == NodeKind::Fog);
  CHECK(inst.nodes[1].kind == NodeKind::Fog);
  CHECK(inst.nodes[2].kind == NodeKind::Cloud);
  // Tripwire: canonical serialization (and thus every derived seed-free
  // artifact) must not drift across platforms or refactors.
  CHECK(instance_digest(inst) == 0x69e1ccbffd13af20ULL);
}

TEST_CASE("instances survive a save/load round trip bit-for-bit") {
  const auto path = temp_file("fogsched_roundtrip.json");
  const Instance original = toy_instance();
  save_instance(original, path.string());
  const Instance loaded = load_instance(path.string());
  CHECK(same_instance(original, loaded));

  // And a generated one with irrational-looking doubles.
  Instance generated;
  generated.tasks = generate_tasks(17, TaskDistribution{}, 987);
  generated.nodes = generate_nodes(3, 2, NodeDistribution{}, 988);
  save_instance(generated, path.string());
  CHECK(same_instance(generated, load_instance(path.string())));
  std::filesystem::remove(path);
}

TEST_CASE("loading rejects malformed instance files with context") {
  const auto path = temp_file("fogsched_bad.json");

  CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), ParseError);

  write_file(path, "{ not json");
  CHECK_THROWS_AS(load_instance(path.string()), ParseError);

  write_file(path, R"({"schema_version": 2, "tasks": [], "nodes": []})");
  CHECK_THROWS_WITH_AS(load_instance(path.string()),
                       doctest::Contains("schema_version"), ParseError);

  write_file(path, kMinimalInstance);
  CHECK_NOTHROW(load_instance(path.string()));

  // Empty task list.
  write_file(path, R"({"schema_version": 1, "tasks": [], "nodes": [
    {"id": 0, "kind": "fog", "cpu_mips": 1000, "cost_cpu": 0.3,
     "cost_mem": 0.01, "cost_bw": 0.01, "mem_mb": 128, "delay_ms": 2}]})");
  CHECK_THROWS_WITH_AS(load_instance(path.string()),
                       doctest::Contains("'tasks' must not be empty"),
                       ParseError);

  // Unknown field.
  write_file(path, R"({
    "schema_version": 1,
    "tasks": [{"id": 0, "size_mi": 100, "mem_mb": 50, "input_mb": 0.5,
               "output_mb": 0.2, "deadline_ms": 1000, "qos_pct": 95,
               "penalty_per_pct": 0.1, "color": "red"}],
    "nodes": [{"id": 0, "kind": "fog", "cpu_mips": 1000, "cost_cpu": 0.3,
               "cost_mem": 0.01, "cost_bw": 0.01, "mem_mb": 128,
               "delay_ms": 2}]})");
  CHECK_THROWS_WITH_AS(load_instance(path.string()),
                       doctest::Contains("unknown field 'color'"), ParseError);

  // Id not matching position.
  write_file(path, R"({
    "schema_version": 1,
    "tasks": [{"id": 5, "size_mi": 100, "mem_mb": 50, "input_mb": 0.5,
               "output_mb": 0.2, "deadline_ms": 1000, "qos_pct": 95,
               "penalty_per_pct": 0.1}],
    "nodes": [{"id": 0, "kind": "fog", "cpu_mips": 1000, "cost_cpu": 0.3,
               "cost_mem": 0.01, "cost_bw": 0.01, "mem_mb": 128,
               "delay_ms": 2}]})");
  CHECK_THROWS_WITH_AS(load_instance(path.string()),
                       doctest::Contains("does not match its position"),
                       ParseError);

  // Out-of-range value surfaces the field path.
  write_file(path, R"({
    "schema_version": 1,
    "tasks": [{"id": 0, "size_mi": -3, "mem_mb": 50, "input_mb": 0.5,
               "output_mb": 0.2, "deadline_ms": 1000, "qos_pct": 95,
               "penalty_per_pct": 0.1}],
    "nodes": [{"id": 0, "kind": "fog", "cpu_mips": 1000, "cost_cpu": 0.3,
               "cost_mem": 0.01, "cost_bw": 0.01, "mem_mb": 128,
               "delay_ms": 2}]})");
  CHECK_THROWS_WITH_AS(load_instance(path.string()),
                       doctest::Contains("tasks[0]"), ParseError);

  // Bad node kind.
  write_file(path, R"({
    "schema_version": 1,
    "tasks": [{"id": 0, "size_mi": 100, "mem_mb": 50, "input_mb": 0.5,
               "output_mb": 0.2, "deadline_ms": 1000, "qos_pct": 95,
               "penalty_per_pct": 0.1}],
    "nodes": [{"id": 0, "kind": "mist", "cpu_mips": 1000, "cost_cpu": 0.3,
               "cost_mem": 0.01, "cost_bw": 0.01, "mem_mb": 128,
               "delay_ms": 2}]})");
  CHECK_THROWS_WITH_AS(load_instance(path.string()),
                       doctest::Contains("unknown node kind"), ParseError);

  std::filesystem::remove(path);
}

TEST_CASE("distribution JSON overrides replace only the listed fields") {
  TaskDistribution dist;
  const nlohmann::json obj = nlohmann::json::parse(R"({
    "mem_mb": [10, 20],
    "classes": [{"size_mi": [5, 9]}, {}, {"deadline_ms": [1, 2]}]
  })");
  task_distribution_from_json(obj, dist, "cfg");
  CHECK(dist.mem_mb.lo == 10.0);
  CHECK(dist.mem_mb.hi == 20.0);
  CHECK(dist.classes[0].size_mi.lo == 5.0);
  CHECK(dist.classes[0].size_mi.hi == 9.0);
  // Untouched fields keep their defaults.
  CHECK(dist.classes[0].deadline_ms.lo == 100.0);
  CHECK(dist.classes[1].size_mi.lo == 1028.0);
  CHECK(dist.classes[2].deadline_ms.hi == 2.0);
  CHECK(dist.input_mb.lo == 0.3);

  NodeDistribution nodes;
  node_distribution_from_json(
      nlohmann::json::parse(R"({"cloud": {"delay_ms": [1, 2]}})"), nodes,
      "cfg");
  CHECK(nodes.cloud.delay_ms.lo == 1.0);
  CHECK(nodes.fog.delay_ms.lo == 1.0);  // default untouched

  CHECK_THROWS_AS(
      task_distribution_from_json(nlohmann::json::parse(R"({"memmb": [1,2]})"),
                                  dist, "cfg"),
      ParseError);
  CHECK_THROWS_AS(
      task_distribution_from_json(
          nlohmann::json::parse(R"({"mem_mb": [1, 2, 3]})"), dist, "cfg"),
      ParseError);
}
