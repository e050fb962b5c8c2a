#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <aix/aix.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "support/testutil.hpp"

namespace {

const std::string kConfig = std::string(AIX_DATA_DIR) + "/minicorpus/config.ini";

void collect(void* user, aix_log_level, const char* msg) {
  static_cast<std::vector<std::string>*>(user)->push_back(msg);
}

}  // namespace

TEST_CASE("c api: version and status names") {
  CHECK(std::strlen(aix_version()) > 0);
  CHECK(std::string(aix_status_name(AIX_OK)) == "ok");
  CHECK(aix_stage_count() == 11);
  CHECK(std::string(aix_stage_name(0)) == "score");
  CHECK(aix_stage_name(99) == nullptr);
}

TEST_CASE("c api: pipeline errors map to status codes") {
  aix_pipeline* p = nullptr;
  CHECK(aix_pipeline_open("/definitely/not/here.ini", &p) == AIX_E_CONFIG);
  CHECK(p == nullptr);

  REQUIRE(aix_pipeline_open(kConfig.c_str(), &p) == AIX_OK);
  testutil::TempDir dir;
  REQUIRE(aix_pipeline_set_out_dir(p, dir.path().c_str()) == AIX_OK);

  CHECK(aix_pipeline_run_stage(p, "classify") == AIX_E_MISSING_ARTIFACT);
  CHECK(std::string(aix_last_error()).find("`match`") != std::string::npos);

  CHECK(aix_pipeline_set_option(p, "zscores.n_iter", "0") == AIX_OK);
  CHECK(aix_pipeline_run_stage(p, "score") == AIX_E_CONFIG);
  CHECK(std::string(aix_last_error()).find("zscores.n_iter") != std::string::npos);
  CHECK(aix_pipeline_set_option(p, "zscores.n_iter", "50") == AIX_OK);

  CHECK(aix_pipeline_run_stage(p, "bogus") == AIX_E_USAGE);
  CHECK(aix_pipeline_run_stage(nullptr, "score") == AIX_E_USAGE);
  aix_pipeline_close(p);
}

TEST_CASE("c api: stages run through the shared library with logging") {
  aix_pipeline* p = nullptr;
  REQUIRE(aix_pipeline_open(kConfig.c_str(), &p) == AIX_OK);
  testutil::TempDir dir;
  std::vector<std::string> log;
  aix_pipeline_set_out_dir(p, dir.path().c_str());
  aix_pipeline_set_logger(p, collect, &log);
  aix_pipeline_set_seed(p, 7);
  CHECK(aix_pipeline_run_stage(p, "score") == AIX_OK);
  CHECK(aix_pipeline_run_stage(p, "filter") == AIX_OK);
  CHECK(std::filesystem::exists(dir.path() / "ai_patents.csv"));
  CHECK(std::filesystem::exists(dir.path() / "filter.manifest.json"));
  CHECK_FALSE(log.empty());
  aix_pipeline_close(p);
}

TEST_CASE("c api: stores and primitives") {
  testutil::TempDir dir;
  aix_store* s = nullptr;
  REQUIRE(aix_store_create(3, &s) == AIX_OK);
  const float a[] = {1, 0, 0}, b[] = {1, 1, 0};
  CHECK(aix_store_add(s, "a", a, 3) == AIX_OK);
  CHECK(aix_store_add(s, "b", b, 3) == AIX_OK);
  CHECK(aix_store_add(s, "a", a, 3) == AIX_E_DATA);
  CHECK(aix_store_add(s, "c", a, 2) == AIX_E_DATA);
  auto path = (dir.path() / "s.emb").string();
  CHECK(aix_store_save(s, path.c_str()) == AIX_OK);
  aix_store_free(s);

  aix_store* t = nullptr;
  REQUIRE(aix_store_load(path.c_str(), &t) == AIX_OK);
  CHECK(aix_store_count(t) == 2);
  CHECK(aix_store_dim(t) == 3);
  CHECK(std::string(aix_store_id(t, 1)) == "b");
  CHECK(aix_store_vector(t, 1)[1] == 1.0f);
  double c = 0;
  CHECK(aix_cosine(aix_store_vector(t, 0), aix_store_vector(t, 1), 3, &c) == AIX_OK);
  CHECK(c == doctest::Approx(0.70710678).epsilon(1e-6));
  aix_store_free(t);

  double d = 0;
  int defined = 1;
  CHECK(aix_disruption_index(3, 1, 2, &d, &defined) == AIX_OK);
  CHECK(defined == 1);
  CHECK(d == 1.0 / 3.0);
  CHECK(aix_disruption_index(0, 0, 0, &d, &defined) == AIX_OK);
  CHECK(defined == 0);

  aix_two_prop tp{};
  CHECK(aix_two_prop_test(30, 100, 20, 100, &tp) == AIX_OK);
  CHECK(tp.defined == 1);
  CHECK(tp.z == doctest::Approx(1.6329931618554523).epsilon(1e-12));
  CHECK(aix_two_prop_test(1, 0, 1, 1, &tp) == AIX_E_DATA);

  const double x[] = {1, 2, 3, 4}, y[] = {2, 4, 6, 8};
  double r = 0, p = 1;
  CHECK(aix_pearson(x, y, 4, &r, &p) == AIX_OK);
  CHECK(r == 1.0);
  CHECK(aix_store_load("/nope.emb", &t) == AIX_E_IO);
}
