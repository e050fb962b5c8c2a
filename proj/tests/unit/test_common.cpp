#include <doctest.h>

#include <vector>

#include "common/csv.hpp"
#include "common/hash.hpp"
#include "common/parallel.hpp"
#include "common/percentile.hpp"
#include "common/rng.hpp"

using namespace aix;

TEST_CASE("csv parses quoted fields, CRLF and a BOM") {
  auto t = csv::Table::parse("\xEF\xBB\xBF" "a,b\r\n\"x, \"\"y\"\"\",2\r\n\r\n\"multi\nline\",3\n", "t.csv");
  t.require_header({"a", "b"});
  REQUIRE(t.size() == 2);
  CHECK(t.records()[0].fields[0] == "x, \"y\"");
  CHECK(t.records()[1].fields[0] == "multi\nline");
  CHECK(t.records()[1].line == 4);
}

TEST_CASE("csv rejects ragged rows and stray quotes") {
  CHECK_THROWS_AS(csv::Table::parse("a,b\n1\n", "t.csv"), DataError);
  CHECK_THROWS_AS(csv::Table::parse("a,b\n\"1,2\n", "t.csv"), DataError);
  CHECK_THROWS_AS(csv::Table::parse("a,b\n1,2\n", "t.csv").require_header({"a", "c"}), DataError);
}

TEST_CASE("csv writer round-trips awkward fields") {
  csv::Writer w{"id", "text"};
  w.row({"1", "comma, quote \" and\nnewline"});
  auto t = csv::Table::parse(w.str(), "w.csv");
  CHECK(t.records()[0].fields[1] == "comma, quote \" and\nnewline");
}

TEST_CASE("doubles print in shortest round-trip form") {
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(csv::format_double(-0.0) == "0");
  CHECK(csv::format_optional(std::nullopt).empty());
}

TEST_CASE("nearest-rank percentile") {
  CHECK(nearest_rank(10, 90) == 9);
  CHECK(nearest_rank(4, 25) == 1);
  CHECK(nearest_rank(4, 75) == 3);
  CHECK(nearest_rank(190, 95) == 181);
  CHECK(nearest_rank(1, 50) == 1);
  CHECK_THROWS(nearest_rank(0, 50));
  CHECK_THROWS(nearest_rank(5, 0));
  std::vector<double> v{0.9, 0.0, 0.5, 0.3, 0.1, 0.8, 0.2, 0.7, 0.6, 0.4};
  CHECK(nearest_rank_value(v, 90) == 0.8);
}

TEST_CASE("rng is reproducible and bounded") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) CHECK(c.below(3) < 3);
  std::vector<int> v{1, 2, 3, 4, 5, 6};
  Rng d(3);
  d.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(derive_seed(1, "score") != derive_seed(1, "filter"));
  CHECK(derive_seed(1, "score") == derive_seed(1, "score"));
}

TEST_CASE("parallel_for fills every slot regardless of thread count") {
  for (unsigned threads : {1u, 2u, 7u, 64u}) {
    std::vector<int> out(101, -1);
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  }
  CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
                    if (i == 6) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
