#include <doctest.h>

#include <cmath>

#include "stats/stats.hpp"

using namespace aix;
using namespace aix::stats;
using aix::annotate::ConsensusLabel;
using aix::annotate::ConsensusSet;
using aix::annotate::Dimension;
using aix::embedding::TaskImpact;

namespace {

struct Fixture {
  std::map<std::string, TaskImpact> labels;
  ConsensusSet chars;
};

// 12 tasks: 4 disruptive, 3 consolidating, 5 not impacted. How is T on tasks
// 0..4 (K = 5), Repetitiveness R on 0..5, Nature constant P.
Fixture twelve_tasks() {
  Fixture f;
  for (int i = 0; i < 12; ++i) {
    std::string id = "t" + std::to_string(10 + i);
    f.labels[id] = i < 4 ? TaskImpact::Disruptive
                 : i < 7 ? TaskImpact::Consolidating
                         : TaskImpact::NotImpacted;
    f.chars[{id, Dimension::How}] = ConsensusLabel{id, Dimension::How, i < 5 ? 'T' : 'D', 3, 3};
    f.chars[{id, Dimension::Repetitiveness}] =
        ConsensusLabel{id, Dimension::Repetitiveness, i < 6 ? 'R' : 'V', 3, 3};
    f.chars[{id, Dimension::Nature}] = ConsensusLabel{id, Dimension::Nature, 'P', 3, 3};
  }
  return f;
}

const NullModelResult& find(const NullModelRun& run, TaskImpact g, Dimension d, char v) {
  for (const auto& r : run.results)
    if (r.group == g && r.dimension == d && r.value == v) return r;
  FAIL("result not found");
  return run.results.front();
}

bool same(const NullModelRun& a, const NullModelRun& b) {
  if (a.results.size() != b.results.size()) return false;
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    const auto& x = a.results[i];
    const auto& y = b.results[i];
    if (x.observed != y.observed || x.null_mean != y.null_mean || x.null_std != y.null_std ||
        x.z != y.z)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("null model: empirical mean converges to the hypergeometric mean") {
  auto f = twelve_tasks();
  for (std::size_t n_iter : {500u, 10000u}) {
    auto run = null_model_zscores(f.labels, f.chars, n_iter, 42);
    const auto& how = find(run, TaskImpact::Disruptive, Dimension::How, 'T');
    // k = 4 drawn from N = 12 with K = 5 successes.
    const double mean = 5.0 / 12.0;
    const double var_count = 4.0 * (5.0 / 12.0) * (7.0 / 12.0) * (8.0 / 11.0);
    const double sd = std::sqrt(var_count) / 4.0;
    CHECK(std::abs(how.null_mean - mean) <= 4.0 / std::sqrt(double(n_iter)));
    CHECK(std::abs(how.null_mean - mean) <= 3.0 * how.null_std / std::sqrt(double(n_iter)));
    CHECK(how.null_std == doctest::Approx(sd).epsilon(0.1));
    CHECK(how.observed == 1.0);
    REQUIRE(how.z.has_value());
    CHECK(*how.z > 0.0);
    CHECK(how.group_size == 4);
  }
}

TEST_CASE("null model: constant characteristic gives an undefined z") {
  auto f = twelve_tasks();
  auto run = null_model_zscores(f.labels, f.chars, 200, 1);
  const auto& nat = find(run, TaskImpact::Consolidating, Dimension::Nature, 'P');
  CHECK(nat.null_std == 0.0);
  CHECK_FALSE(nat.z.has_value());
  CHECK(nat.observed == 1.0);
}

TEST_CASE("null model: whole-population group") {
  auto f = twelve_tasks();
  for (auto& [id, g] : f.labels) g = TaskImpact::Disruptive;
  auto run = null_model_zscores(f.labels, f.chars, 300, 9);
  CHECK(run.results.size() == 6);
  CHECK(run.warnings.size() == 3);
  for (const auto& r : run.results) {
    CHECK(r.observed == r.null_mean);
    CHECK(r.null_std == 0.0);
    CHECK_FALSE(r.z.has_value());
  }
}

TEST_CASE("null model: deterministic across thread counts, sensitive to seed") {
  auto f = twelve_tasks();
  auto one = null_model_zscores(f.labels, f.chars, 1000, 77, 1);
  auto four = null_model_zscores(f.labels, f.chars, 1000, 77, 4);
  CHECK(same(one, four));
  CHECK(render_zscores(one.results) == render_zscores(four.results));
  auto other = null_model_zscores(f.labels, f.chars, 1000, 78, 1);
  CHECK_FALSE(same(one, other));
}

TEST_CASE("null model: incomplete tasks are excluded, n_iter is validated") {
  auto f = twelve_tasks();
  f.chars.erase({"t10", Dimension::Nature});
  auto run = null_model_zscores(f.labels, f.chars, 50, 3);
  CHECK(run.excluded_tasks == std::vector<std::string>{"t10"});
  CHECK(run.n_tasks == 11);
  CHECK_THROWS(null_model_zscores(f.labels, f.chars, 1, 3));
}

TEST_CASE("two-proportion test") {
  auto r = two_prop_test(30, 100, 20, 100);
  REQUIRE(r.z.has_value());
  CHECK(*r.z == doctest::Approx(1.6329931618554523).epsilon(1e-12));
  CHECK(*r.p_value == doctest::Approx(0.10247043485974938).epsilon(1e-9));

  auto swapped = two_prop_test(20, 100, 30, 100);
  CHECK(*swapped.z == -*r.z);
  CHECK(*swapped.p_value == *r.p_value);

  auto equal = two_prop_test(3, 10, 6, 20);
  CHECK(*equal.z == 0.0);
  CHECK(*equal.p_value == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_FALSE(two_prop_test(0, 5, 0, 7).z.has_value());
  CHECK_FALSE(two_prop_test(5, 5, 7, 7).z.has_value());
  CHECK_THROWS(two_prop_test(1, 0, 1, 2));
  CHECK_THROWS(two_prop_test(3, 2, 1, 2));
}

TEST_CASE("ols") {
  std::vector<double> x{1, 2, 3, 4, 5}, y{3, 5, 7, 9, 11};
  auto exact = ols_fit(x, y);
  CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(exact.intercept == doctest::Approx(1.0).epsilon(1e-14));
  for (double r : exact.residuals) CHECK(std::abs(r) < 1e-12);

  std::vector<double> y2{2.1, 3.9, 6.2, 7.8, 10.1};
  auto fit = ols_fit(x, y2);
  CHECK(fit.slope == doctest::Approx(1.99).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.05).epsilon(1e-10));

  std::vector<double> flat{2, 2, 2};
  std::vector<double> any{1, 2, 3};
  CHECK_THROWS(ols_fit(flat, any));
}

TEST_CASE("pearson") {
  std::vector<double> x{1, 2, 3, 4, 5}, y{2.1, 3.9, 6.2, 7.8, 10.1};
  auto r = pearson(x, y);
  CHECK(r.r == doctest::Approx(0.9986517555689657).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(5.941539111754465e-05).epsilon(1e-6));

  std::vector<double> lin{3, 5, 7, 9, 11}, anti{-1, -3, -5, -7, -9};
  CHECK(pearson(x, lin).r == 1.0);
  CHECK(pearson(x, lin).p_value == 0.0);
  CHECK(pearson(x, anti).r == -1.0);

  std::vector<double> ax, ay;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ax.push_back(3.0 * x[i] - 7.0);
    ay.push_back(0.5 * y[i] + 2.0);
  }
  CHECK(pearson(ax, ay).r == doctest::Approx(r.r).epsilon(1e-12));
}

TEST_CASE("outlier exclusion removes the planted point") {
  std::vector<double> x, y;
  std::vector<std::string> ids;
  const double wiggle[] = {0.3, -0.2, 0.1, -0.4, 0.0, 0.2, -0.1, 0.4, -0.3, 0.1};
  for (int i = 0; i < 10; ++i) {
    x.push_back(i + 1);
    y.push_back(2.0 * (i + 1) + 1.0 + wiggle[i]);
    ids.push_back("s" + std::to_string(i));
  }
  y[4] += 30.0;
  auto res = pearson_with_outlier_exclusion(x, y, ids);
  CHECK(res.excluded == std::vector<std::string>{"s4"});
  CHECK(res.n == 9);
  std::vector<double> xr, yr;
  for (int i = 0; i < 10; ++i)
    if (i != 4) {
      xr.push_back(x[i]);
      yr.push_back(y[i]);
    }
  CHECK(res.r == pearson(xr, yr).r);

  std::vector<double> lx{1, 2, 3, 4, 5, 6}, ly{3, 5, 7, 9, 11, 13};
  std::vector<std::string> lid{"a", "b", "c", "d", "e", "f"};
  auto clean = pearson_with_outlier_exclusion(lx, ly, lid);
  CHECK(clean.excluded.empty());
  CHECK(clean.r == 1.0);
}

TEST_CASE("distribution functions") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(students_t_cdf(2.228, 10) == doctest::Approx(0.9749941140914443).epsilon(1e-10));
  CHECK(students_t_cdf(-1.5, 3) == doctest::Approx(0.11529193262241141).epsilon(1e-10));
  CHECK(students_t_cdf(0.7, 25) == doctest::Approx(0.7548047316069351).epsilon(1e-10));
}
