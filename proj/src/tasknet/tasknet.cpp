#include "tasknet/tasknet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "common/csv.hpp"
#include "common/parallel.hpp"
#include "common/percentile.hpp"
#include "common/rng.hpp"

namespace aix::tasknet {

std::vector<std::size_t> TaskNetwork::degrees() const {
  std::vector<std::size_t> deg(nodes.size(), 0);
  for (const auto& e : edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

TaskNetwork build_network(const embedding::EmbeddingStore& tasks, double percent,
                          unsigned threads) {
  const std::size_t n = tasks.size();
  if (n < 3) fail(ErrorKind::Data, "a task network needs at least 3 tasks, got {}", n);

  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = embedding::squared_norm(tasks.vector(i));
    if (norms[i] == 0.0) fail(ErrorKind::Data, "task '{}' has a zero embedding", tasks.id(i));
  }

  // Row i holds pairs (i, j > i) starting at offset(i).
  auto offset = [n](std::size_t i) { return i * (2 * n - i - 1) / 2; };
  std::vector<double> sims(n * (n - 1) / 2);
  parallel_for(n - 1, threads, [&](std::size_t i) {
    const auto u = tasks.vector(i);
    std::size_t k = offset(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto v = tasks.vector(j);
      double acc = 0.0;
      for (std::size_t d = 0; d < u.size(); ++d)
        acc += static_cast<double>(u[d]) * static_cast<double>(v[d]);
      sims[k++] = std::clamp(acc / std::sqrt(norms[i] * norms[j]), -1.0, 1.0);
    }
  });

  TaskNetwork net;
  net.percentile = percent;
  net.cutoff = nearest_rank_value(sims, percent);
  net.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) net.nodes.push_back(tasks.id(i));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = offset(i);
    for (std::size_t j = i + 1; j < n; ++j, ++k)
      if (sims[k] >= net.cutoff)
        net.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), sims[k]});
  }
  return net;
}

double modularity(const TaskNetwork& net, std::span<const std::uint32_t> community) {
  if (net.edges.empty()) fail(ErrorKind::Data, "modularity of a network without edges");
  if (community.size() != net.nodes.size())
    fail(ErrorKind::Data, "partition covers {} nodes, network has {}", community.size(),
         net.nodes.size());

  std::unordered_map<std::uint32_t, double> in, tot;
  double m = 0.0;
  for (const auto& e : net.edges) {
    m += e.weight;
    tot[community[e.a]] += e.weight;
    tot[community[e.b]] += e.weight;
    if (community[e.a] == community[e.b]) in[community[e.a]] += 2.0 * e.weight;
  }
  if (!(m > 0.0)) fail(ErrorKind::Data, "modularity needs a positive total edge weight");

  // Sum in community-id order so the result does not depend on hash order.
  std::vector<std::uint32_t> ids;
  ids.reserve(tot.size());
  for (const auto& [c, t] : tot) ids.push_back(c);
  std::sort(ids.begin(), ids.end());
  const double two_m = 2.0 * m;
  double q = 0.0;
  for (auto c : ids) {
    const double t = tot[c] / two_m;
    q += in[c] / two_m - t * t;
  }
  return q;
}

namespace {

constexpr double kMinGain = 1e-12;

struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries
  std::vector<double> self;    // ordered-pair weight inside the node
  std::vector<double> degree;  // self + incident weight

  std::size_t size() const { return adj.size(); }
};

LevelGraph initial_graph(const TaskNetwork& net) {
  LevelGraph g;
  const std::size_t n = net.nodes.size();
  g.adj.resize(n);
  g.self.assign(n, 0.0);
  g.degree.assign(n, 0.0);
  for (const auto& e : net.edges) {
    g.adj[e.a].emplace_back(e.b, e.weight);
    g.adj[e.b].emplace_back(e.a, e.weight);
    g.degree[e.a] += e.weight;
    g.degree[e.b] += e.weight;
  }
  return g;
}

// Local moving on one level. Returns true if any node changed community.
bool move_nodes(const LevelGraph& g, double two_m, std::vector<std::uint32_t>& comm, Rng& rng,
                const std::function<void(const std::vector<std::uint32_t>&)>& after_pass) {
  const std::size_t n = g.size();
  const double m = two_m / 2.0;
  comm.resize(n);
  std::iota(comm.begin(), comm.end(), 0u);
  std::vector<double> tot = g.degree;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(std::span<std::uint32_t>(order));

  std::vector<double> neigh_weight(n, 0.0);
  std::vector<std::uint32_t> neigh_list;
  std::vector<char> listed(n, 0);

  bool any_move = false;
  while (true) {
    bool moved = false;
    for (auto i : order) {
      const auto own = comm[i];
      neigh_list.clear();
      neigh_list.push_back(own);
      listed[own] = 1;
      for (auto [j, w] : g.adj[i]) {
        const auto c = comm[j];
        if (!listed[c]) {
          listed[c] = 1;
          neigh_list.push_back(c);
        }
        neigh_weight[c] += w;
      }

      const double k = g.degree[i];
      tot[own] -= k;
      const double stay = neigh_weight[own] - tot[own] * k / two_m;
      auto best = own;
      double best_gain = stay;
      for (auto c : neigh_list) {
        const double gain = neigh_weight[c] - tot[c] * k / two_m;
        if (gain > best_gain) {
          best = c;
          best_gain = gain;
        }
      }
      if (best != own && (best_gain - stay) / m > kMinGain) {
        comm[i] = best;
        moved = true;
      } else {
        best = own;
      }
      tot[best] += k;

      for (auto c : neigh_list) {
        neigh_weight[c] = 0.0;
        listed[c] = 0;
      }
    }
    after_pass(comm);
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

std::uint32_t renumber(std::vector<std::uint32_t>& comm) {
  std::unordered_map<std::uint32_t, std::uint32_t> ids;
  for (auto& c : comm) {
    auto [it, inserted] = ids.emplace(c, static_cast<std::uint32_t>(ids.size()));
    c = it->second;
  }
  return static_cast<std::uint32_t>(ids.size());
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& comm,
                     std::uint32_t count) {
  LevelGraph out;
  out.adj.resize(count);
  out.self.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  std::vector<std::map<std::uint32_t, double>> links(count);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ci = comm[i];
    out.self[ci] += g.self[i];
    out.degree[ci] += g.degree[i];
    for (auto [j, w] : g.adj[i]) {
      const auto cj = comm[j];
      if (ci == cj)
        out.self[ci] += w;
      else
        links[ci][cj] += w;
    }
  }
  for (std::uint32_t c = 0; c < count; ++c)
    out.adj[c].assign(links[c].begin(), links[c].end());
  return out;
}

}  // namespace

Partition louvain(const TaskNetwork& net, std::uint64_t seed) {
  const std::size_t n = net.nodes.size();
  Partition part;
  part.seed = seed;
  part.community.resize(n);
  std::iota(part.community.begin(), part.community.end(), 0u);
  part.community_count = n;
  if (net.edges.empty()) {
    part.trajectory.push_back(0.0);
    return part;
  }

  LevelGraph g = initial_graph(net);
  const double two_m = std::accumulate(g.degree.begin(), g.degree.end(), 0.0);
  if (!(two_m > 0.0)) fail(ErrorKind::Data, "Louvain needs a positive total edge weight");

  Rng rng(seed);
  part.trajectory.push_back(modularity(net, part.community));

  std::vector<std::uint32_t> level_comm;
  auto record = [&](const std::vector<std::uint32_t>& comm) {
    std::vector<std::uint32_t> mapped(n);
    for (std::size_t v = 0; v < n; ++v) mapped[v] = comm[part.community[v]];
    part.trajectory.push_back(modularity(net, mapped));
  };

  while (true) {
    if (!move_nodes(g, two_m, level_comm, rng, record)) break;
    const auto count = renumber(level_comm);
    for (auto& c : part.community) c = level_comm[c];
    if (count == g.size()) break;
    g = aggregate(g, level_comm, count);
  }

  part.community_count = renumber(part.community);
  part.modularity = modularity(net, part.community);
  return part;
}

std::vector<std::size_t> largest_remainder(std::span<const std::size_t> sizes,
                                           std::size_t total) {
  const std::size_t whole = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (whole == 0) fail(ErrorKind::Data, "apportionment over empty parts");
  std::vector<std::size_t> quotas(sizes.size());
  std::vector<std::size_t> remainder(sizes.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    // Exact integer arithmetic: total * size / whole.
    const unsigned __int128 prod = static_cast<unsigned __int128>(total) * sizes[c];
    quotas[c] = static_cast<std::size_t>(prod / whole);
    remainder[c] = static_cast<std::size_t>(prod % whole);
    assigned += quotas[c];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (remainder[x] != remainder[y]) return remainder[x] > remainder[y];
    return sizes[x] > sizes[y];
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++quotas[order[k % order.size()]];
  return quotas;
}

SamplePlan sample_representatives(const TaskNetwork& net, const Partition& partition,
                                  long long total) {
  const std::size_t n = net.nodes.size();
  if (total <= 0) fail(ErrorKind::Config, "sample total must be positive, got {}", total);
  if (static_cast<std::size_t>(total) > n)
    fail(ErrorKind::Data, "sample total {} exceeds the {} nodes available", total, n);
  if (partition.community.size() != n)
    fail(ErrorKind::Data, "partition covers {} nodes, network has {}",
         partition.community.size(), n);

  std::size_t communities = 0;
  for (auto c : partition.community) communities = std::max<std::size_t>(communities, c + 1);
  std::vector<std::vector<std::uint32_t>> members(communities);
  for (std::size_t v = 0; v < n; ++v)
    members[partition.community[v]].push_back(static_cast<std::uint32_t>(v));

  std::vector<std::size_t> sizes;
  sizes.reserve(communities);
  for (const auto& m : members) sizes.push_back(m.size());

  SamplePlan plan;
  plan.total = static_cast<std::size_t>(total);
  plan.quotas = largest_remainder(sizes, plan.total);

  const auto deg = net.degrees();
  for (std::uint32_t c = 0; c < communities; ++c) {
    auto& nodes = members[c];
    std::sort(nodes.begin(), nodes.end(), [&](std::uint32_t x, std::uint32_t y) {
      if (deg[x] != deg[y]) return deg[x] > deg[y];
      return net.nodes[x] < net.nodes[y];
    });
    for (std::size_t r = 0; r < plan.quotas[c]; ++r)
      plan.selected.push_back({net.nodes[nodes[r]], c, deg[nodes[r]], r + 1});
  }
  return plan;
}

std::string render_network(const TaskNetwork& net) {
  csv::Writer w{"a", "b", "weight"};
  for (const auto& e : net.edges)
    w.row({net.nodes[e.a], net.nodes[e.b], csv::format_double(e.weight)});
  return w.str();
}

std::string render_partition(const TaskNetwork& net, const Partition& partition) {
  csv::Writer w{"task_id", "community"};
  for (std::size_t v = 0; v < net.nodes.size(); ++v)
    w.row({net.nodes[v], std::to_string(partition.community[v])});
  return w.str();
}

std::string render_sample(const SamplePlan& plan) {
  csv::Writer w{"task_id", "community", "degree", "rank"};
  for (const auto& s : plan.selected)
    w.row({s.task_id, std::to_string(s.community), std::to_string(s.degree),
           std::to_string(s.rank)});
  return w.str();
}

LoadedPartition load_partition(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"task_id", "community"});
  LoadedPartition out;
  for (const auto& rec : table.records()) {
    out.nodes.push_back(rec.fields[0]);
    out.community.push_back(static_cast<std::uint32_t>(csv::parse_uint(table, rec, 1)));
  }
  return out;
}

TaskNetwork load_network(const std::filesystem::path& path, std::vector<std::string> nodes) {
  auto table = csv::Table::read_file(path);
  table.require_header({"a", "b", "weight"});
  TaskNetwork net;
  net.nodes = std::move(nodes);
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t v = 0; v < net.nodes.size(); ++v)
    index.emplace(net.nodes[v], static_cast<std::uint32_t>(v));
  for (const auto& rec : table.records()) {
    auto a = index.find(rec.fields[0]);
    auto b = index.find(rec.fields[1]);
    if (a == index.end() || b == index.end())
      throw DataError(table.source(), rec.line, a == index.end() ? "a" : "b",
                      "edge endpoint is not a network node");
    auto lo = std::min(a->second, b->second);
    auto hi = std::max(a->second, b->second);
    net.edges.push_back({lo, hi, csv::parse_double(table, rec, 2)});
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  if (!net.edges.empty()) {
    net.cutoff = net.edges.front().weight;
    for (const auto& e : net.edges) net.cutoff = std::min(net.cutoff, e.weight);
  }
  return net;
}

}  // namespace aix::tasknet
