#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "common/hash.hpp"
#include "common/rng.hpp"
#include "embedding/embedding.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace aix;
using namespace aix::embedding;
using aix::disruption::PatentClass;

namespace {

EmbeddingStore random_store(std::uint64_t seed, std::size_t n, std::uint32_t dim,
                            const std::string& prefix) {
  Rng rng(seed);
  EmbeddingStore s(dim);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = static_cast<float>(rng.uniform() * 2.0 - 1.0);
    s.add(prefix + std::to_string(i), v);
  }
  return s;
}

std::vector<MatchResult> results_with(std::vector<double> sims) {
  std::vector<MatchResult> out;
  for (std::size_t i = 0; i < sims.size(); ++i)
    out.push_back({"t" + std::to_string(i), "p" + std::to_string(i % 2), sims[i]});
  return out;
}

}  // namespace

TEST_CASE("cosine: examples and errors") {
  std::vector<float> a{1, 0}, b{0, 1}, c{1, 1}, v{0.3f, -2.0f, 5.5f};
  CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(a, b) == 0.0);
  CHECK(cosine(a, c) == doctest::Approx(0.70710678).epsilon(1e-6));
  std::vector<float> zero{0, 0}, three{1, 2, 3};
  CHECK_THROWS(cosine(a, zero));
  CHECK_THROWS(cosine(a, three));
}

TEST_CASE("cosine: invariant under positive scaling") {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    std::vector<float> u(8), v(8), su(8);
    for (int k = 0; k < 8; ++k) {
      u[k] = static_cast<float>(rng.uniform() - 0.5);
      v[k] = static_cast<float>(rng.uniform() - 0.5);
      su[k] = u[k] * 4.0f;
    }
    CHECK(cosine(su, v) == doctest::Approx(cosine(u, v)).epsilon(1e-12));
  }
}

TEST_CASE("store: binary round-trip keeps bits and order") {
  auto s = random_store(5, 17, 9, "x");
  std::stringstream buf;
  s.write(buf);
  auto back = EmbeddingStore::read(buf);
  CHECK(back == s);
  CHECK(back.id(16) == "x16");

  EmbeddingStore empty(4);
  std::stringstream eb;
  empty.write(eb);
  CHECK(EmbeddingStore::read(eb).size() == 0);

  std::stringstream bad("EMB2....");
  CHECK_THROWS(EmbeddingStore::read(bad));
}

TEST_CASE("store: sidecar manifest is checked on load") {
  testutil::TempDir dir;
  auto s = random_store(6, 3, 4, "t");
  auto path = dir.path() / "tasks.emb";
  s.save(path);
  write_manifest(path, {"encoder-x", 4, 3, sha256_file(path)});
  StoreManifest m;
  CHECK(EmbeddingStore::load(path, &m) == s);
  CHECK(m.model == "encoder-x");
  CHECK(manifest_path(path).filename() == "tasks.emb.manifest.json");

  write_manifest(path, {"encoder-x", 4, 5, sha256_file(path)});
  CHECK_THROWS(EmbeddingStore::load(path));
  write_manifest(path, {"encoder-x", 4, 3, std::string(64, '0')});
  CHECK_THROWS(EmbeddingStore::load(path));
}

TEST_CASE("store: duplicate ids and wrong lengths are rejected") {
  EmbeddingStore s(2);
  std::vector<float> v{1, 2};
  s.add("a", v);
  CHECK_THROWS(s.add("a", v));
  std::vector<float> w{1, 2, 3};
  CHECK_THROWS(s.add("b", w));
}

TEST_CASE("match: small cases") {
  EmbeddingStore tasks(2), patents(2);
  std::vector<float> t{1, 1}, p{1, 0};
  tasks.add("t", t);
  patents.add("p", p);
  auto r = match_tasks(tasks, patents);
  REQUIRE(r.size() == 1);
  CHECK(r[0].best_patent_id == "p");
  CHECK(r[0].best_similarity == cosine(t, p));

  auto ten = random_store(8, 10, 6, "P");
  EmbeddingStore dup(6);
  dup.add("T", ten.vector(4));
  auto d = match_tasks(dup, ten);
  CHECK(d[0].best_patent_id == "P4");
  CHECK(d[0].best_similarity == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("match: ties go to the smallest patent id") {
  EmbeddingStore tasks(2), patents(2);
  std::vector<float> t{1, 0}, p{2, 0};
  tasks.add("t", t);
  patents.add("zz", p);
  patents.add("aa", p);
  patents.add("mm", p);
  CHECK(match_tasks(tasks, patents)[0].best_patent_id == "aa");
}

TEST_CASE("match: equals the double-loop oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto tasks = random_store(seed, 20, 12, "t");
    auto patents = random_store(seed + 100, 60, 12, "p");
    auto got = match_tasks(tasks, patents, 3);
    auto want = oracle::match_tasks(tasks, patents);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].best_patent_id == want[i].best_patent_id);
      CHECK(std::abs(got[i].best_similarity - want[i].best_similarity) <= 1e-12);
    }
    CHECK(got == match_tasks(tasks, patents, 1));
  }
}

TEST_CASE("threshold: nearest rank and strict classification") {
  auto tenth = results_with({0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  CHECK(impact_threshold(tenth) == 0.8);
  CHECK_THROWS(impact_threshold(results_with({0.1, 0.2, 0.3})));

  std::map<std::string, PatentClass> classes{{"p0", PatentClass::Disruptive},
                                             {"p1", PatentClass::Middle}};
  auto equal = results_with(std::vector<double>(12, 0.4));
  double th = impact_threshold(equal);
  CHECK(th == 0.4);
  for (const auto& [id, label] : classify_tasks(equal, th, classes))
    CHECK(label == TaskImpact::NotImpacted);

  auto labels = classify_tasks(tenth, 0.8, classes);
  CHECK(labels.at("t8") == TaskImpact::NotImpacted);
  CHECK(labels.at("t9") == TaskImpact::Middle);

  std::map<std::string, PatentClass> partial{{"p0", PatentClass::Disruptive}};
  CHECK_THROWS(classify_tasks(tenth, 0.0, partial));
}

TEST_CASE("threshold: 100 distinct scores leave exactly 10 impacted") {
  Rng rng(21);
  std::vector<double> sims;
  for (int i = 0; i < 100; ++i) sims.push_back(0.2 + 0.005 * i);
  rng.shuffle(std::span<double>(sims));
  auto results = results_with(sims);
  std::map<std::string, PatentClass> classes{{"p0", PatentClass::Disruptive},
                                             {"p1", PatentClass::Consolidating}};
  auto labels = classify_tasks(results, impact_threshold(results), classes);
  std::size_t impacted = 0;
  for (const auto& [id, label] : labels) impacted += is_impacted(label) ? 1 : 0;
  CHECK(impacted == 10);
}

TEST_CASE("threshold: twenty-task hand tally") {
  std::vector<double> sims;
  for (int i = 0; i < 20; ++i) sims.push_back(0.05 * i);
  std::vector<MatchResult> results;
  const char* patent_of[] = {"D", "C", "M"};
  for (int i = 0; i < 20; ++i) results.push_back({"t" + std::to_string(i), patent_of[i % 3], sims[i]});
  std::map<std::string, PatentClass> classes{{"D", PatentClass::Disruptive},
                                             {"C", PatentClass::Consolidating},
                                             {"M", PatentClass::Middle}};
  // Threshold 0.5 leaves t11..t19 impacted: 11,14,17 -> C; 12,15,18 -> M; 13,16,19 -> D.
  auto labels = classify_tasks(results, 0.5, classes);
  std::map<TaskImpact, int> tally;
  for (const auto& [id, label] : labels) ++tally[label];
  CHECK(tally[TaskImpact::NotImpacted] == 11);
  CHECK(tally[TaskImpact::Disruptive] == 3);
  CHECK(tally[TaskImpact::Consolidating] == 3);
  CHECK(tally[TaskImpact::Middle] == 3);
}

TEST_CASE("match files round-trip") {
  testutil::TempDir dir;
  auto results = results_with({0.25, 1.0 / 3.0, -0.5});
  auto p = dir.write("b.csv", render_best_matches(results));
  CHECK(load_best_matches(p) == results);
}

TEST_CASE("store: reads a hand-assembled EMB1 stream from an external encoder") {
  std::string bytes = "EMB1";
  auto put = [&](const void* p, std::size_t n) { bytes.append(static_cast<const char*>(p), n); };
  std::uint32_t dim = 2;
  std::uint64_t count = 3;
  put(&dim, 4);
  put(&count, 8);
  const char* ids[] = {"a", "bb", "a2"};
  const float vals[3][2] = {{0.6f, 0.8f}, {0.6f, 0.8f}, {-1.0f, 0.0f}};
  for (int i = 0; i < 3; ++i) {
    std::uint32_t len = static_cast<std::uint32_t>(std::strlen(ids[i]));
    put(&len, 4);
    put(ids[i], len);
    put(vals[i], 8);
  }
  std::stringstream in(bytes);
  auto s = EmbeddingStore::read(in);
  REQUIRE(s.size() == 3);
  CHECK(s.dim() == 2);
  CHECK(s.id(1) == "bb");
  CHECK(std::memcmp(s.vector(2).data(), vals[2], 8) == 0);
  CHECK(cosine(s.vector(0), s.vector(1)) == 1.0);

  std::stringstream out;
  s.write(out);
  CHECK(out.str() == bytes);
}
