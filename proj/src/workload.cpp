#include "fogsched/workload.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fogsched/rng.hpp"

namespace fogsched {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_range(const ValueRange& r, const std::string& name,
                 double min_lo = 0.0) {
  require(std::isfinite(r.lo) && std::isfinite(r.hi),
          name + ": bounds must be finite");
  require(r.lo <= r.hi, name + ": low bound exceeds high bound");
  require(r.lo >= min_lo, name + ": low bound below " + std::to_string(min_lo));
}

double draw_real(rng::Engine& eng, const ValueRange& r) {
  return eng.uniform_real(r.lo, r.hi);
}

// Whole-number draw with inclusive bounds.
double draw_whole(rng::Engine& eng, const ValueRange& r) {
  return static_cast<double>(
      eng.uniform_int(std::llround(r.lo), std::llround(r.hi)));
}

}  // namespace

void validate(const TaskDistribution& dist) {
  for (std::size_t c = 0; c < dist.classes.size(); ++c) {
    const std::string tag = "task class " + std::to_string(c);
    check_range(dist.classes[c].size_mi, tag + " size_mi", 1.0);
    check_range(dist.classes[c].deadline_ms, tag + " deadline_ms", 1e-9);
  }
  double weight_sum = 0.0;
  for (double w : dist.class_weights) {
    require(std::isfinite(w) && w >= 0.0,
            "class_weights must be non-negative");
    weight_sum += w;
  }
  require(weight_sum > 0.0, "class_weights must not all be zero");
  check_range(dist.mem_mb, "mem_mb", 1e-9);
  check_range(dist.input_mb, "input_mb");
  check_range(dist.output_mb, "output_mb");
  check_range(dist.qos_pct, "qos_pct", 1e-9);
  require(dist.qos_pct.hi <= 100.0, "qos_pct: high bound exceeds 100");
  check_range(dist.penalty_per_pct, "penalty_per_pct");
}

void validate(const NodeDistribution& dist) {
  const auto check_kind = [](const NodeKindRanges& r, const std::string& tag) {
    check_range(r.cpu_mips, tag + " cpu_mips", 1.0);
    check_range(r.cost_cpu, tag + " cost_cpu");
    check_range(r.cost_mem, tag + " cost_mem");
    check_range(r.cost_bw, tag + " cost_bw");
    check_range(r.mem_mb, tag + " mem_mb", 1e-9);
    check_range(r.delay_ms, tag + " delay_ms");
  };
  check_kind(dist.fog, "fog");
  check_kind(dist.cloud, "cloud");
}

std::vector<Task> generate_tasks(int count, const TaskDistribution& dist,
                                 std::uint64_t seed) {
  require(count > 0, "task count must be positive");
  validate(dist);

  std::array<double, 3> cumulative{};
  double acc = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    acc += dist.class_weights[c];
    cumulative[c] = acc;
  }

  rng::Engine eng(seed);
  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double pick = eng.uniform_unit() * acc;
    std::size_t cls = 0;
    while (cls + 1 < 3 && pick >= cumulative[cls]) ++cls;

    Task task;
    task.id = i;
    task.size_mi = draw_whole(eng, dist.classes[cls].size_mi);
    task.mem_mb = draw_real(eng, dist.mem_mb);
    task.input_mb = draw_real(eng, dist.input_mb);
    task.output_mb = draw_real(eng, dist.output_mb);
    task.deadline_ms = draw_real(eng, dist.classes[cls].deadline_ms);
    task.qos_pct = draw_real(eng, dist.qos_pct);
    task.penalty_per_pct = draw_real(eng, dist.penalty_per_pct);
    validate(task);
    tasks.push_back(task);
  }
  return tasks;
}

std::vector<Node> generate_nodes(int fog_count, int cloud_count,
                                 const NodeDistribution& dist,
                                 std::uint64_t seed) {
  require(fog_count >= 0 && cloud_count >= 0, "node counts must be non-negative");
  require(fog_count + cloud_count > 0, "node pool must not be empty");
  validate(dist);

  rng::Engine eng(seed);
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(fog_count + cloud_count));
  const auto draw_node = [&](NodeKind kind, const NodeKindRanges& ranges) {
    Node node;
    node.id = static_cast<int>(nodes.size());
    node.kind = kind;
    node.cpu_mips = draw_whole(eng, ranges.cpu_mips);
    node.cost_cpu = draw_real(eng, ranges.cost_cpu);
    node.cost_mem = draw_real(eng, ranges.cost_mem);
    node.cost_bw = draw_real(eng, ranges.cost_bw);
    node.mem_mb = draw_real(eng, ranges.mem_mb);
    node.delay_ms = draw_real(eng, ranges.delay_ms);
    validate(node);
    nodes.push_back(node);
  };
  for (int i = 0; i < fog_count; ++i) draw_node(NodeKind::Fog, dist.fog);
  for (int i = 0; i < cloud_count; ++i) draw_node(NodeKind::Cloud, dist.cloud);
  return nodes;
}

Instance toy_instance() {
  Instance inst;
  const double size[] = {2000, 3000, 100, 8000, 1500, 6000, 300, 4000, 9000, 200};
  const double mem[] = {100, 200, 50, 180, 70, 120, 150, 180, 100, 150};
  const double input[] = {0.5, 1.0, 0.3, 1.5, 0.4, 1.2, 0.8, 1.0, 0.5, 1.4};
  const double output[] = {0.1, 0.8, 0.5, 0.5, 0.8, 1.0, 0.5, 0.6, 0.4, 0.2};
  const double deadline[] = {1500, 1000, 200, 5000, 2200, 3500, 400, 1200, 8000, 100};
  const double qos[] = {96, 93, 95, 92, 99, 94, 98, 91, 90, 95};
  const double penalty[] = {0.2, 0.1, 0.4, 0.5, 0.2, 0.1, 0.3, 0.3, 0.4, 0.1};
  for (int i = 0; i < 10; ++i) {
    inst.tasks.push_back(Task{i, size[i], mem[i], input[i], output[i],
                              deadline[i], qos[i], penalty[i]});
  }
  inst.nodes.push_back(
      Node{0, NodeKind::Fog, 1500, 0.3, 0.03, 0.01, 220, 1});
  inst.nodes.push_back(
      Node{1, NodeKind::Fog, 750, 0.4, 0.02, 0.02, 170, 2});
  inst.nodes.push_back(
      Node{2, NodeKind::Cloud, 6000, 1.5, 0.05, 0.08, 1024, 150});
  return inst;
}

namespace {

constexpr int kSchemaVersion = 1;

json task_to_json(const Task& t) {
  return json{{"id", t.id},
              {"size_mi", t.size_mi},
              {"mem_mb", t.mem_mb},
              {"input_mb", t.input_mb},
              {"output_mb", t.output_mb},
              {"deadline_ms", t.deadline_ms},
              {"qos_pct", t.qos_pct},
              {"penalty_per_pct", t.penalty_per_pct}};
}

json node_to_json(const Node& n) {
  return json{{"id", n.id},
              {"kind", std::string(to_string(n.kind))},
              {"cpu_mips", n.cpu_mips},
              {"cost_cpu", n.cost_cpu},
              {"cost_mem", n.cost_mem},
              {"cost_bw", n.cost_bw},
              {"mem_mb", n.mem_mb},
              {"delay_ms", n.delay_ms}};
}

json instance_to_json(const Instance& inst) {
  json tasks = json::array();
  for (const Task& t : inst.tasks) tasks.push_back(task_to_json(t));
  json nodes = json::array();
  for (const Node& n : inst.nodes) nodes.push_back(node_to_json(n));
  return json{{"schema_version", kSchemaVersion},
              {"tasks", std::move(tasks)},
              {"nodes", std::move(nodes)}};
}

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
  throw ParseError(ctx + ": " + msg);
}

double get_number(const json& obj, const std::string& key,
                  const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ctx, "missing field '" + key + "'");
  if (!it->is_number()) fail(ctx, "field '" + key + "' must be a number");
  return it->get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ctx, "missing field '" + key + "'");
  if (!it->is_number_integer()) fail(ctx, "field '" + key + "' must be an integer");
  return it->get<int>();
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ctx, "missing field '" + key + "'");
  if (!it->is_string()) fail(ctx, "field '" + key + "' must be a string");
  return it->get<std::string>();
}

void reject_unknown_keys(const json& obj, std::span<const char* const> known,
                         const std::string& ctx) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(ctx, "unknown field '" + key + "'");
  }
}

Task task_from_json(const json& obj, std::size_t pos) {
  const std::string ctx = "tasks[" + std::to_string(pos) + "]";
  if (!obj.is_object()) fail(ctx, "must be an object");
  static constexpr const char* known[] = {
      "id",          "size_mi", "mem_mb",  "input_mb",
      "output_mb",   "deadline_ms", "qos_pct", "penalty_per_pct"};
  reject_unknown_keys(obj, known, ctx);
  Task t;
  t.id = get_int(obj, "id", ctx);
  if (t.id != static_cast<int>(pos))
    fail(ctx, "id " + std::to_string(t.id) + " does not match its position");
  t.size_mi = get_number(obj, "size_mi", ctx);
  t.mem_mb = get_number(obj, "mem_mb", ctx);
  t.input_mb = get_number(obj, "input_mb", ctx);
  t.output_mb = get_number(obj, "output_mb", ctx);
  t.deadline_ms = get_number(obj, "deadline_ms", ctx);
  t.qos_pct = get_number(obj, "qos_pct", ctx);
  t.penalty_per_pct = get_number(obj, "penalty_per_pct", ctx);
  try {
    validate(t);
  } catch (const std::invalid_argument& e) {
    fail(ctx, e.what());
  }
  return t;
}

Node node_from_json(const json& obj, std::size_t pos) {
  const std::string ctx = "nodes[" + std::to_string(pos) + "]";
  if (!obj.is_object()) fail(ctx, "must be an object");
  static constexpr const char* known[] = {"id",       "kind",     "cpu_mips",
                                          "cost_cpu", "cost_mem", "cost_bw",
                                          "mem_mb",   "delay_ms"};
  reject_unknown_keys(obj, known, ctx);
  Node n;
  n.id = get_int(obj, "id", ctx);
  if (n.id != static_cast<int>(pos))
    fail(ctx, "id " + std::to_string(n.id) + " does not match its position");
  try {
    n.kind = node_kind_from_string(get_string(obj, "kind", ctx));
  } catch (const std::invalid_argument& e) {
    fail(ctx, e.what());
  }
  n.cpu_mips = get_number(obj, "cpu_mips", ctx);
  n.cost_cpu = get_number(obj, "cost_cpu", ctx);
  n.cost_mem = get_number(obj, "cost_mem", ctx);
  n.cost_bw = get_number(obj, "cost_bw", ctx);
  n.mem_mb = get_number(obj, "mem_mb", ctx);
  n.delay_ms = get_number(obj, "delay_ms", ctx);
  try {
    validate(n);
  } catch (const std::invalid_argument& e) {
    fail(ctx, e.what());
  }
  return n;
}

Instance instance_from_json(const json& doc, const std::string& ctx) {
  if (!doc.is_object()) fail(ctx, "top level must be an object");
  static constexpr const char* known[] = {"schema_version", "tasks", "nodes"};
  reject_unknown_keys(doc, known, ctx);
  const auto ver = doc.find("schema_version");
  if (ver == doc.end()) fail(ctx, "missing field 'schema_version'");
  if (!ver->is_number_integer() || ver->get<int>() != kSchemaVersion) {
    fail(ctx, "unsupported schema_version (expected " +
                  std::to_string(kSchemaVersion) + ")");
  }
  const auto tasks = doc.find("tasks");
  if (tasks == doc.end() || !tasks->is_array())
    fail(ctx, "'tasks' must be an array");
  if (tasks->empty()) fail(ctx, "'tasks' must not be empty");
  const auto nodes = doc.find("nodes");
  if (nodes == doc.end() || !nodes->is_array())
    fail(ctx, "'nodes' must be an array");
  if (nodes->empty()) fail(ctx, "'nodes' must not be empty");

  Instance inst;
  inst.tasks.reserve(tasks->size());
  for (std::size_t i = 0; i < tasks->size(); ++i)
    inst.tasks.push_back(task_from_json((*tasks)[i], i));
  inst.nodes.reserve(nodes->size());
  for (std::size_t i = 0; i < nodes->size(); ++i)
    inst.nodes.push_back(node_from_json((*nodes)[i], i));
  return inst;
}

}  // namespace

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return instance_from_json(doc, path);
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << instance_to_json(instance).dump(2) << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string instance_canonical_json(const Instance& instance) {
  return instance_to_json(instance).dump();
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x00000100000001B3ULL;
  }
  return h;
}

std::uint64_t instance_digest(const Instance& instance) {
  const std::string text = instance_canonical_json(instance);
  return fnv1a64({reinterpret_cast<const unsigned char*>(text.data()),
                  text.size()});
}

namespace {

ValueRange range_from_json(const json& value, const std::string& ctx) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
      !value[1].is_number()) {
    fail(ctx, "ranges must be two-element number arrays [low, high]");
  }
  return ValueRange{value[0].get<double>(), value[1].get<double>()};
}

void maybe_range(const json& obj, const char* key, ValueRange& target,
                 const std::string& ctx) {
  const auto it = obj.find(key);
  if (it != obj.end()) target = range_from_json(*it, ctx + "." + key);
}

}  // namespace

void task_distribution_from_json(const json& obj, TaskDistribution& dist,
                                 const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  static constexpr const char* known[] = {
      "classes",   "class_weights", "mem_mb",         "input_mb",
      "output_mb", "qos_pct",       "penalty_per_pct"};
  reject_unknown_keys(obj, known, context);
  if (const auto it = obj.find("classes"); it != obj.end()) {
    if (!it->is_array() || it->size() != dist.classes.size())
      fail(context, "'classes' must be an array of 3 objects");
    for (std::size_t c = 0; c < dist.classes.size(); ++c) {
      const std::string cctx = context + ".classes[" + std::to_string(c) + "]";
      const json& cls = (*it)[c];
      if (!cls.is_object()) fail(cctx, "must be an object");
      static constexpr const char* cls_known[] = {"size_mi", "deadline_ms"};
      reject_unknown_keys(cls, cls_known, cctx);
      maybe_range(cls, "size_mi", dist.classes[c].size_mi, cctx);
      maybe_range(cls, "deadline_ms", dist.classes[c].deadline_ms, cctx);
    }
  }
  if (const auto it = obj.find("class_weights"); it != obj.end()) {
    if (!it->is_array() || it->size() != dist.class_weights.size())
      fail(context, "'class_weights' must be an array of 3 numbers");
    for (std::size_t c = 0; c < dist.class_weights.size(); ++c) {
      if (!(*it)[c].is_number())
        fail(context, "'class_weights' must be numbers");
      dist.class_weights[c] = (*it)[c].get<double>();
    }
  }
  maybe_range(obj, "mem_mb", dist.mem_mb, context);
  maybe_range(obj, "input_mb", dist.input_mb, context);
  maybe_range(obj, "output_mb", dist.output_mb, context);
  maybe_range(obj, "qos_pct", dist.qos_pct, context);
  maybe_range(obj, "penalty_per_pct", dist.penalty_per_pct, context);
}

namespace {

void node_kind_ranges_from_json(const json& obj, NodeKindRanges& ranges,
                                const std::string& ctx) {
  if (!obj.is_object()) fail(ctx, "must be an object");
  static constexpr const char* known[] = {"cpu_mips", "cost_cpu", "cost_mem",
                                          "cost_bw",  "mem_mb",   "delay_ms"};
  reject_unknown_keys(obj, known, ctx);
  maybe_range(obj, "cpu_mips", ranges.cpu_mips, ctx);
  maybe_range(obj, "cost_cpu", ranges.cost_cpu, ctx);
  maybe_range(obj, "cost_mem", ranges.cost_mem, ctx);
  maybe_range(obj, "cost_bw", ranges.cost_bw, ctx);
  maybe_range(obj, "mem_mb", ranges.mem_mb, ctx);
  maybe_range(obj, "delay_ms", ranges.delay_ms, ctx);
}

}  // namespace

void node_distribution_from_json(const json& obj, NodeDistribution& dist,
                                 const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  static constexpr const char* known[] = {"fog", "cloud"};
  reject_unknown_keys(obj, known, context);
  if (const auto it = obj.find("fog"); it != obj.end())
    node_kind_ranges_from_json(*it, dist.fog, context + ".fog");
  if (const auto it = obj.find("cloud"); it != obj.end())
    node_kind_ranges_from_json(*it, dist.cloud, context + ".cloud");
}

}  // namespace fogsched
