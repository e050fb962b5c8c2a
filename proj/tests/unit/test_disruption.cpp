#include <doctest.h>

#include <algorithm>
#include <map>

#include "disruption/disruption.hpp"
#include "support/oracles.hpp"

using namespace aix;
using namespace aix::disruption;
using aix::corpus::CitationEdge;
using aix::corpus::Patent;

namespace {

Patent make_patent(std::string id, int year, std::string abstract = "") {
  Patent p;
  p.patent_id = std::move(id);
  p.grant_date = std::chrono::year{year} / std::chrono::January / std::chrono::day{1};
  p.abstract = std::move(abstract);
  return p;
}

std::vector<DisruptionScore> scores_of(std::vector<double> values) {
  std::vector<DisruptionScore> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out.push_back({"S" + std::to_string(i), {}, values[i]});
  return out;
}

}  // namespace

TEST_CASE("graph: empty edge set and a two-edge chain") {
  std::vector<Patent> patents{make_patent("A", 2000), make_patent("B", 2001), make_patent("C", 2002)};
  auto empty = CitationGraph::build(patents, {});
  for (std::size_t i = 0; i < empty.size(); ++i) {
    CHECK(empty.citers(i).empty());
    CHECK(empty.references(i).empty());
  }
  std::vector<CitationEdge> edges{{"B", "A"}, {"C", "B"}};
  auto g = CitationGraph::build(patents, edges);
  REQUIRE(g.citers(0).size() == 1);
  CHECK(g.id(g.citers(0)[0]) == "B");
  REQUIRE(g.citers(1).size() == 1);
  CHECK(g.id(g.citers(1)[0]) == "C");
  CHECK(g.citers(2).empty());
}

TEST_CASE("graph: backward adjacency is the transpose of forward") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = oracle::random_corpus(seed, 30, 50);
    auto g = CitationGraph::build(c.patents, c.edges);
    std::set<std::pair<std::uint32_t, std::uint32_t>> fwd, bwd;
    for (std::uint32_t n = 0; n < g.size(); ++n) {
      for (auto m : g.citers(n)) fwd.insert({n, m});
      for (auto m : g.references(n)) bwd.insert({m, n});
    }
    CHECK(fwd == bwd);
    CHECK(fwd.size() == c.edges.size());
  }
}

TEST_CASE("counts: hand fixtures") {
  std::vector<Patent> patents{make_patent("F", 2010)};
  std::vector<CitationEdge> edges;
  for (int i = 0; i < 5; ++i) {
    patents.push_back(make_patent("L" + std::to_string(i), 2012));
    edges.push_back({"L" + std::to_string(i), "F"});
  }
  auto g = CitationGraph::build(patents, edges);
  CHECK(disruption_counts(g, "F") == DisruptionCounts{5, 0, 0});
  CHECK_THROWS(disruption_counts(g, "nope"));

  std::vector<Patent> lone{make_patent("F", 2010), make_patent("R", 2000)};
  std::vector<CitationEdge> lone_edges{{"F", "R"}};
  auto g2 = CitationGraph::build(lone, lone_edges);
  auto c2 = disruption_counts(g2, "F");
  CHECK(c2 == DisruptionCounts{0, 0, 0});
  CHECK_FALSE(disruption_index(c2).has_value());
}

TEST_CASE("counts: eight-patent fixture") {
  std::vector<Patent> patents{make_patent("R1", 2000), make_patent("R2", 2001),
                              make_patent("F", 2005),  make_patent("P1", 2008),
                              make_patent("P2", 2008), make_patent("P3", 2009),
                              make_patent("P4", 2010), make_patent("X", 2011)};
  std::vector<CitationEdge> edges{{"F", "R1"},  {"F", "R2"},  {"P1", "F"},  {"P2", "F"},
                                  {"P2", "R1"}, {"P3", "R2"}, {"P4", "R1"}, {"P4", "R2"}};
  auto g = CitationGraph::build(patents, edges);
  CHECK(disruption_counts(g, "F") == DisruptionCounts{1, 1, 2});
}

TEST_CASE("counts: a same-day citer of a reference is not later") {
  std::vector<Patent> patents{make_patent("R", 2000), make_patent("F", 2005),
                              make_patent("S", 2005), make_patent("L", 2006)};
  std::vector<CitationEdge> edges{{"F", "R"}, {"S", "R"}, {"L", "R"}};
  auto g = CitationGraph::build(patents, edges);
  CHECK(disruption_counts(g, "F") == DisruptionCounts{0, 0, 1});
}

TEST_CASE("counts: equal the set-enumeration oracle on random graphs") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto c = oracle::random_corpus(seed, 60, 240);
    auto g = CitationGraph::build(c.patents, c.edges);
    for (const auto& p : c.patents)
      REQUIRE(disruption_counts(g, p.patent_id) == oracle::disruption_counts(c, p.patent_id));
  }
}

TEST_CASE("index: anchors") {
  CHECK(*disruption_index({5, 0, 0}) == 1.0);
  CHECK(*disruption_index({0, 5, 0}) == -1.0);
  CHECK(*disruption_index({3, 1, 2}) == 1.0 / 3.0);
  CHECK_FALSE(disruption_index({0, 0, 0}).has_value());
  CHECK(*disruption_index({0, 0, 4}) == 0.0);
}

TEST_CASE("index: adding an n_i citer never lowers the score and stays in range") {
  for (std::uint64_t i = 0; i < 12; ++i)
    for (std::uint64_t j = 0; j < 12; ++j)
      for (std::uint64_t k = 0; k < 12; ++k) {
        auto d = disruption_index({i, j, k});
        if (!d) continue;
        CHECK(*d >= -1.0);
        CHECK(*d <= 1.0);
        CHECK(*disruption_index({i + 1, j, k}) >= *d);
      }
}

TEST_CASE("score_all: parallel equals sequential") {
  auto c = oracle::random_corpus(7, 200, 900);
  auto g = CitationGraph::build(c.patents, c.edges);
  CHECK(score_all(g, 1) == score_all(g, 4));
}

TEST_CASE("filter: window, citation floor and keyword clauses") {
  std::vector<Patent> patents{
      make_patent("IN", 2016, "A deep learning system for welding"),
      make_patent("OLD", 2014, "A deep learning system for welding"),
      make_patent("FEW", 2016, "A deep learning system for welding"),
      make_patent("PLAIN", 2016, "A system for welding"),
      make_patent("R1", 2000), make_patent("R2", 2001)};
  std::vector<CitationEdge> edges;
  for (std::string f : {"IN", "OLD", "FEW", "PLAIN"}) {
    edges.push_back({f, "R1"});
    edges.push_back({f, "R2"});
  }
  for (int i = 0; i < 4; ++i) {
    std::string c = "C" + std::to_string(i);
    patents.push_back(make_patent(c, 2020));
    edges.push_back({c, "IN"});
    edges.push_back({c, "OLD"});
    edges.push_back({c, "PLAIN"});
    if (i < 2) edges.push_back({c, "FEW"});
  }
  auto g = CitationGraph::build(patents, edges);
  auto cfg = default_filter_config();
  CHECK(filter_ai_patents(patents, cfg, g) == std::vector<std::string>{"IN"});

  cfg.keywords.clear();
  cfg.cpc_prefixes.clear();
  CHECK_THROWS(filter_ai_patents(patents, cfg, g));
}

TEST_CASE("filter: keyword match works on whole phrases") {
  auto kw = default_ai_keywords();
  CHECK(kw.size() == 15);
  CHECK(matches_keywords(make_patent("a", 2016, "Uses Machine-Learning."), kw));
  CHECK_FALSE(matches_keywords(make_patent("b", 2016, "A brainstorming tool"), kw));
  CHECK(normalize_text("  Deep--Learning!! ") == "deep learning");
}

TEST_CASE("classify: four-score worked example") {
  auto scores = scores_of({-0.8, -0.2, 0.1, 0.9});
  auto c = classify_patents(scores);
  CHECK(c.q_low == -0.8);
  CHECK(c.q_high == 0.1);
  CHECK(c.classes.at("S0") == PatentClass::Consolidating);
  CHECK(c.classes.at("S1") == PatentClass::Middle);
  CHECK(c.classes.at("S2") == PatentClass::Disruptive);
  CHECK(c.classes.at("S3") == PatentClass::Disruptive);
  CHECK(c.warnings.empty());
}

TEST_CASE("classify: degenerate and undefined scores") {
  auto equal = classify_patents(scores_of({0.2, 0.2, 0.2, 0.2, 0.2}));
  for (const auto& [id, cls] : equal.classes) CHECK(cls == PatentClass::Middle);
  CHECK(equal.warnings.size() == 1);

  auto with_undefined = scores_of({-0.5, 0.0, 0.5, 1.0});
  with_undefined.push_back({"U", {}, std::nullopt});
  auto c = classify_patents(with_undefined);
  CHECK(c.classes.size() == 4);
  CHECK(c.undefined == std::vector<std::string>{"U"});

  CHECK_THROWS(classify_patents(scores_of({0.1, 0.2, 0.3})));
}

TEST_CASE("classify: 0.98 and -0.77 fall in the outer classes") {
  std::vector<double> values{0.98, -0.77};
  for (int i = 0; i < 20; ++i) values.push_back(-0.6 + 0.07 * i);
  auto scores = scores_of(values);
  auto c = classify_patents(scores);
  REQUIRE(c.q_high <= 0.9);
  REQUIRE(c.q_low >= -0.7);
  CHECK(c.classes.at("S0") == PatentClass::Disruptive);
  CHECK(c.classes.at("S1") == PatentClass::Consolidating);
}
