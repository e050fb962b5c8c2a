#pragma once

// Brute-force reference implementations used by the unit tests and the
// acceptance suite. Deliberately naive: sets, dense matrices, full sorts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "common/rng.hpp"
#include "corpus/corpus.hpp"
#include "disruption/disruption.hpp"
#include "embedding/embedding.hpp"
#include "tasknet/tasknet.hpp"

namespace oracle {

struct RandomCorpus {
  std::vector<aix::corpus::Patent> patents;
  std::vector<aix::corpus::CitationEdge> edges;
};

// Arbitrary directed edges (no self loops) and dates drawn from a narrow
// range so that same-day ties are common.
inline RandomCorpus random_corpus(std::uint64_t seed, std::size_t n, std::size_t edges) {
  aix::Rng rng(seed);
  RandomCorpus c;
  for (std::size_t i = 0; i < n; ++i) {
    aix::corpus::Patent p;
    p.patent_id = "P" + std::to_string(i);
    int year = 2010 + static_cast<int>(rng.below(4));
    unsigned month = 1 + static_cast<unsigned>(rng.below(3));
    p.grant_date = std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{1};
    c.patents.push_back(p);
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < edges && n > 1; ++k) {
    auto a = static_cast<std::size_t>(rng.below(n));
    auto b = static_cast<std::size_t>(rng.below(n));
    if (a == b || !seen.insert({a, b}).second) continue;
    c.edges.push_back({c.patents[a].patent_id, c.patents[b].patent_id});
  }
  return c;
}

inline aix::disruption::DisruptionCounts disruption_counts(const RandomCorpus& c,
                                                           const std::string& focal) {
  std::map<std::string, aix::corpus::Date> date;
  for (const auto& p : c.patents) date[p.patent_id] = p.grant_date;
  std::set<std::pair<std::string, std::string>> cites;  // (citing, cited)
  for (const auto& e : c.edges) cites.insert({e.citing_id, e.cited_id});

  std::set<std::string> refs;
  for (const auto& [citing, cited] : cites)
    if (citing == focal) refs.insert(cited);

  aix::disruption::DisruptionCounts out;
  for (const auto& p : c.patents) {
    if (!(p.grant_date > date[focal])) continue;
    bool f = cites.count({p.patent_id, focal}) > 0;
    bool r = false;
    for (const auto& ref : refs) r = r || cites.count({p.patent_id, ref}) > 0;
    if (f && !r) ++out.n_i;
    else if (f && r) ++out.n_j;
    else if (!f && r) ++out.n_k;
  }
  return out;
}

inline double cosine(std::span<const float> u, std::span<const float> v) {
  double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += double(u[i]) * double(v[i]);
    uu += double(u[i]) * double(u[i]);
    vv += double(v[i]) * double(v[i]);
  }
  return std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
}

inline std::vector<aix::embedding::MatchResult> match_tasks(
    const aix::embedding::EmbeddingStore& tasks, const aix::embedding::EmbeddingStore& patents) {
  std::vector<aix::embedding::MatchResult> out;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    aix::embedding::MatchResult best{tasks.id(t), "", -2.0};
    for (std::size_t p = 0; p < patents.size(); ++p) {
      double s = cosine(tasks.vector(t), patents.vector(p));
      if (s > best.best_similarity ||
          (s == best.best_similarity && patents.id(p) < best.best_patent_id)) {
        best.best_similarity = s;
        best.best_patent_id = patents.id(p);
      }
    }
    out.push_back(best);
  }
  return out;
}

// Sort every pair, take the value at rank ceil(p * P / 100), keep pairs at
// or above it.
inline std::set<std::pair<std::uint32_t, std::uint32_t>> network_edges(
    const aix::embedding::EmbeddingStore& store, unsigned percent) {
  std::vector<std::pair<double, std::pair<std::uint32_t, std::uint32_t>>> pairs;
  for (std::uint32_t a = 0; a < store.size(); ++a)
    for (std::uint32_t b = a + 1; b < store.size(); ++b)
      pairs.push_back({cosine(store.vector(a), store.vector(b)), {a, b}});
  std::vector<double> values;
  for (const auto& p : pairs) values.push_back(p.first);
  std::sort(values.begin(), values.end());
  std::size_t rank = (percent * values.size() + 99) / 100;
  double cutoff = values[rank - 1];
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& p : pairs)
    if (p.first >= cutoff) out.insert(p.second);
  return out;
}

// Q = 1/2m sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j) over a dense matrix.
inline double modularity(const aix::tasknet::TaskNetwork& net,
                         std::span<const std::uint32_t> community) {
  const std::size_t n = net.nodes.size();
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (const auto& e : net.edges) {
    A[e.a][e.b] += e.weight;
    A[e.b][e.a] += e.weight;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      k[i] += A[i][j];
      two_m += A[i][j];
    }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (community[i] == community[j]) q += A[i][j] - k[i] * k[j] / two_m;
  return q / two_m;
}

}  // namespace oracle
