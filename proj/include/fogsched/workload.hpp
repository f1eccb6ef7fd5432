#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogsched/model.hpp"

// Synthetic workload generation and instance (de)serialization.
//
// Tasks come in three size classes (small / medium / large), each with its
// own workload and deadline range; the remaining attributes share one range
// across classes.  Nodes are drawn from separate fog and cloud ranges.  All
// draws are uniform; integer-valued attributes (workload, CPU rate) are
// drawn as whole numbers.

namespace fogsched {

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;  // inclusive; lo == hi pins the value
};

struct TaskClassRanges {
  ValueRange size_mi;
  ValueRange deadline_ms;
};

struct TaskDistribution {
  std::array<TaskClassRanges, 3> classes{{
      {{100.0, 372.0}, {100.0, 500.0}},       // small
      {{1028.0, 4280.0}, {500.0, 2500.0}},    // medium
      {{5123.0, 9784.0}, {2500.0, 10000.0}},  // large
  }};
  std::array<double, 3> class_weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  ValueRange mem_mb{50.0, 200.0};
  ValueRange input_mb{0.3, 1.5};
  ValueRange output_mb{0.1, 1.0};
  ValueRange qos_pct{90.0, 99.99};
  ValueRange penalty_per_pct{0.1, 0.5};
};

struct NodeKindRanges {
  ValueRange cpu_mips;
  ValueRange cost_cpu;
  ValueRange cost_mem;
  ValueRange cost_bw;
  ValueRange mem_mb;
  ValueRange delay_ms;
};

struct NodeDistribution {
  NodeKindRanges fog{
      {500.0, 2000.0},  // cpu_mips
      {0.2, 0.5},       // cost_cpu
      {0.01, 0.03},     // cost_mem
      {0.01, 0.02},     // cost_bw
      {150.0, 250.0},   // mem_mb
      {1.0, 5.0},       // delay_ms
  };
  NodeKindRanges cloud{
      {3000.0, 10000.0},  // cpu_mips
      {1.0, 2.1},         // cost_cpu
      {0.02, 0.05},       // cost_mem
      {0.05, 0.1},        // cost_bw
      {256.0, 4096.0},    // mem_mb
      {50.0, 250.0},      // delay_ms
  };
};

void validate(const TaskDistribution& dist);  // throws std::invalid_argument
void validate(const NodeDistribution& dist);

// Draw `count` tasks (ids 0..count-1).  Deterministic in (dist, seed).
std::vector<Task> generate_tasks(int count, const TaskDistribution& dist,
                                 std::uint64_t seed);

// Draw `fog_count` fog nodes followed by `cloud_count` cloud nodes
// (ids 0..total-1).  Deterministic in (dist, counts, seed).
std::vector<Node> generate_nodes(int fog_count, int cloud_count,
                                 const NodeDistribution& dist,
                                 std::uint64_t seed);

struct Instance {
  std::vector<Task> tasks;
  std::vector<Node> nodes;
};

// The bundled 10-task / 3-node case study (two fog nodes and one cloud
// node) used by the regression tests and the `verify` command's default.
Instance toy_instance();

// Malformed instance file or config text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON instance files carry {"schema_version": 1, "tasks": [...],
// "nodes": [...]}.  Loading validates every field and rejects empty task
// or node lists, unknown schema versions, and ids that do not match the
// element's position.
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

// Canonical JSON text of an instance (sorted keys, no whitespace); the
// digest is FNV-1a 64 over that text.
std::string instance_canonical_json(const Instance& instance);
std::uint64_t instance_digest(const Instance& instance);

// FNV-1a 64 over arbitrary bytes (exposed for combining digests).
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t seed = 0xCBF29CE484222325ULL);

// Apply JSON overrides onto a distribution (fields not present keep their
// defaults; ranges are two-element [low, high] arrays).  Unknown keys and
// malformed values raise ParseError with `context` in the message.
void task_distribution_from_json(const nlohmann::json& obj,
                                 TaskDistribution& dist,
                                 const std::string& context);
// Schema: {"fog": {...ranges...}, "cloud": {...ranges...}}, both optional.
void node_distribution_from_json(const nlohmann::json& obj,
                                 NodeDistribution& dist,
                                 const std::string& context);

}  // namespace fogsched
