#include <doctest.h>

#include <cmath>
#include <numeric>

#include "common/rng.hpp"
#include "support/oracles.hpp"
#include "tasknet/tasknet.hpp"

using namespace aix;
using namespace aix::tasknet;
using aix::embedding::EmbeddingStore;

namespace {

EmbeddingStore random_store(std::uint64_t seed, std::size_t n, std::uint32_t dim) {
  Rng rng(seed);
  EmbeddingStore s(dim);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = static_cast<float>(rng.uniform() * 2.0 - 1.0);
    s.add("t" + std::to_string(100 + i), v);
  }
  return s;
}

TaskNetwork graph_of(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  TaskNetwork net;
  for (std::size_t i = 0; i < n; ++i) net.nodes.push_back("n" + std::to_string(10 + i));
  for (auto [a, b] : pairs) net.edges.push_back({std::min(a, b), std::max(a, b), 1.0});
  std::sort(net.edges.begin(), net.edges.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  return net;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const TaskNetwork& net) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& e : net.edges) out.insert({e.a, e.b});
  return out;
}

}  // namespace

TEST_CASE("network: three identical vectors form a triangle") {
  EmbeddingStore s(3);
  std::vector<float> v{0.2f, 0.4f, 0.1f};
  s.add("a", v);
  s.add("b", v);
  s.add("c", v);
  auto net = build_network(s);
  CHECK(net.edges.size() == 3);
  CHECK(net.cutoff == doctest::Approx(1.0).epsilon(1e-12));

  EmbeddingStore two(3);
  two.add("a", v);
  two.add("b", v);
  CHECK_THROWS(build_network(two));
}

TEST_CASE("network: edge set equals the exhaustive pair oracle") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    std::size_t n = 5 + 5 * seed % 56;
    auto s = random_store(seed, n, 10);
    auto net = build_network(s, 95.0, 2);
    CHECK(edge_set(net) == oracle::network_edges(s, 95));
  }
  auto s20 = random_store(99, 20, 16);
  auto net20 = build_network(s20);
  CHECK(net20.edges.size() == 10);
  CHECK(edge_set(net20) == oracle::network_edges(s20, 95));
}

TEST_CASE("network: two far clusters have no cross edges") {
  Rng rng(4);
  EmbeddingStore s(4);
  for (int i = 0; i < 8; ++i) {
    float jitter = static_cast<float>(rng.uniform() * 1e-3);
    std::vector<float> v = i < 4 ? std::vector<float>{1, jitter, 0, 0}
                                 : std::vector<float>{0, 0, 1, jitter};
    s.add("c" + std::to_string(i), v);
  }
  auto net = build_network(s, 60.0);
  for (const auto& e : net.edges) CHECK((e.a < 4) == (e.b < 4));
}

TEST_CASE("modularity: closed forms") {
  auto two = graph_of(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  std::vector<std::uint32_t> split{0, 0, 0, 1, 1, 1}, one(6, 0);
  CHECK(std::abs(modularity(two, split) - 0.5) <= 1e-12);
  CHECK(std::abs(modularity(two, one)) <= 1e-12);
  CHECK(modularity(two, split) == doctest::Approx(oracle::modularity(two, split)).epsilon(1e-12));
  CHECK_THROWS(modularity(graph_of(3, {}), one));
}

TEST_CASE("louvain: two disjoint triangles") {
  auto two = graph_of(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  for (std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    auto p = louvain(two, seed);
    CHECK(p.community_count == 2);
    CHECK(std::abs(p.modularity - 0.5) <= 1e-12);
    CHECK(p.community[0] == p.community[2]);
    CHECK(p.community[3] == p.community[5]);
    CHECK(p.community[0] != p.community[3]);
  }
}

TEST_CASE("louvain: trajectory is monotone and beats singletons on random graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::size_t n = 10 + rng.below(50);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (std::size_t k = 0; k < 3 * n; ++k) {
      auto a = static_cast<std::uint32_t>(rng.below(n));
      auto b = static_cast<std::uint32_t>(rng.below(n));
      if (a == b || !seen.insert({std::min(a, b), std::max(a, b)}).second) continue;
      pairs.push_back({a, b});
    }
    auto net = graph_of(n, pairs);
    auto p = louvain(net, seed);
    for (std::size_t i = 1; i < p.trajectory.size(); ++i)
      CHECK(p.trajectory[i] >= p.trajectory[i - 1] - 1e-12);
    std::vector<std::uint32_t> singletons(n);
    std::iota(singletons.begin(), singletons.end(), 0u);
    CHECK(p.modularity >= modularity(net, singletons) - 1e-12);
    CHECK(p.modularity == doctest::Approx(oracle::modularity(net, p.community)).epsilon(1e-9));
    CHECK(p.modularity >= -0.5);
    CHECK(p.modularity <= 1.0);

    auto again = louvain(net, seed);
    CHECK(again.community == p.community);
  }
}

TEST_CASE("largest remainder: quotas") {
  std::vector<std::size_t> sizes{60, 40};
  CHECK(largest_remainder(sizes, 10) == std::vector<std::size_t>{6, 4});
  std::vector<std::size_t> thirds{1, 1, 1};
  CHECK(largest_remainder(thirds, 2) == std::vector<std::size_t>{1, 1, 0});

  Rng rng(12);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::size_t> parts(1 + rng.below(8));
    std::size_t sum = 0;
    for (auto& s : parts) sum += s = 1 + rng.below(30);
    std::size_t total = 1 + rng.below(sum);
    auto q = largest_remainder(parts, total);
    CHECK(std::accumulate(q.begin(), q.end(), std::size_t{0}) == total);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      double exact = static_cast<double>(parts[i]) * total / sum;
      CHECK(static_cast<double>(q[i]) >= std::floor(exact));
      CHECK(static_cast<double>(q[i]) <= std::floor(exact) + 1);
    }
  }
}

TEST_CASE("sample: full selection, hub first, bad totals") {
  // Star on 0..4 plus a triangle on 5..7.
  auto net = graph_of(8, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {5, 6}, {6, 7}, {5, 7}});
  auto p = louvain(net, 3);
  auto all = sample_representatives(net, p, 8);
  CHECK(all.selected.size() == 8);

  auto plan = sample_representatives(net, p, 2);
  CHECK(plan.selected.size() == 2);
  bool hub = false;
  for (const auto& e : plan.selected) hub = hub || e.task_id == "n10";
  CHECK(hub);
  std::size_t quota_sum = std::accumulate(plan.quotas.begin(), plan.quotas.end(), std::size_t{0});
  CHECK(quota_sum == 2);

  CHECK_THROWS(sample_representatives(net, p, 0));
  CHECK_THROWS(sample_representatives(net, p, -3));
}
