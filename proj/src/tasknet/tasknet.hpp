#pragma once

// Task similarity networks, Louvain community detection and degree-first
// representative sampling.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "embedding/embedding.hpp"

namespace aix::tasknet {

struct Edge {
  std::uint32_t a = 0;  // a < b
  std::uint32_t b = 0;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

struct TaskNetwork {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;  // sorted by (a, b)
  double percentile = 95.0;
  double cutoff = 0.0;

  std::vector<std::size_t> degrees() const;  // unweighted
};

// All n(n-1)/2 cosine similarities; keeps every pair at or above the
// nearest-rank percentile cut-off (ties kept).
TaskNetwork build_network(const embedding::EmbeddingStore& tasks, double percent = 95.0,
                          unsigned threads = 1);

struct Partition {
  std::vector<std::uint32_t> community;  // per node, numbered by first appearance
  std::size_t community_count = 0;
  double modularity = 0.0;
  std::vector<double> trajectory;  // modularity before the first pass and after each pass
  std::uint64_t seed = 0;
};

// Q = sum_c [ in_c / 2m - (tot_c / 2m)^2 ]. Throws on an empty edge set.
double modularity(const TaskNetwork& net, std::span<const std::uint32_t> community);

// Multi-level Louvain at resolution 1. Node visit order is a seeded shuffle;
// a move is accepted only if it raises Q by more than 1e-12.
Partition louvain(const TaskNetwork& net, std::uint64_t seed);

// Largest-remainder apportionment of `total` over `sizes`; ties on the
// remainder go to the larger part, then the lower index.
std::vector<std::size_t> largest_remainder(std::span<const std::size_t> sizes, std::size_t total);

struct SampleEntry {
  std::string task_id;
  std::uint32_t community = 0;
  std::size_t degree = 0;
  std::size_t rank = 0;  // 1-based within the community

  bool operator==(const SampleEntry&) const = default;
};

struct SamplePlan {
  std::size_t total = 0;
  std::vector<std::size_t> quotas;  // per community
  std::vector<SampleEntry> selected;
};

// Quotas proportional to community size; highest degree first, then task id.
SamplePlan sample_representatives(const TaskNetwork& net, const Partition& partition,
                                  long long total);

std::string render_network(const TaskNetwork& net);      // a,b,weight
std::string render_partition(const TaskNetwork& net, const Partition& partition);  // task_id,community
std::string render_sample(const SamplePlan& plan);       // task_id,community,degree,rank

struct LoadedPartition {
  std::vector<std::string> nodes;
  std::vector<std::uint32_t> community;
};
LoadedPartition load_partition(const std::filesystem::path& path);

// Rebuilds a network from network.csv over the given node list.
TaskNetwork load_network(const std::filesystem::path& path, std::vector<std::string> nodes);

}  // namespace aix::tasknet
