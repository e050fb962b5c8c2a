#include "aix/aix.h"

#include <filesystem>
#include <new>
#include <string>

#include "common/error.hpp"
#include "disruption/disruption.hpp"
#include "embedding/embedding.hpp"
#include "pipeline/config.hpp"
#include "pipeline/pipeline.hpp"
#include "stats/stats.hpp"

struct aix_pipeline {
  std::filesystem::path config;
  aix::pipeline::Overrides overrides;
  aix_log_fn log = nullptr;
  void* log_user = nullptr;
};

struct aix_store {
  aix::embedding::EmbeddingStore store;
};

namespace {

thread_local std::string last_error;

aix_status status_of(aix::ErrorKind kind) {
  switch (kind) {
    case aix::ErrorKind::Usage: return AIX_E_USAGE;
    case aix::ErrorKind::Config: return AIX_E_CONFIG;
    case aix::ErrorKind::Data: return AIX_E_DATA;
    case aix::ErrorKind::Io: return AIX_E_IO;
    case aix::ErrorKind::MissingArtifact: return AIX_E_MISSING_ARTIFACT;
    case aix::ErrorKind::Network: return AIX_E_NETWORK;
    case aix::ErrorKind::Internal: return AIX_E_INTERNAL;
  }
  return AIX_E_INTERNAL;
}

template <class F>
aix_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return AIX_OK;
  } catch (const aix::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return AIX_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return AIX_E_INTERNAL;
  }
}

aix_status null_arg(const char* name) {
  last_error = std::string("null argument: ") + name;
  return AIX_E_USAGE;
}

void set_override(aix_pipeline* p, std::string key, std::string value) {
  for (auto& [k, v] : p->overrides)
    if (k == key) {
      v = std::move(value);
      return;
    }
  p->overrides.emplace_back(std::move(key), std::move(value));
}

}  // namespace

extern "C" {

const char* aix_version(void) { return aix::pipeline::version(); }

const char* aix_last_error(void) { return last_error.c_str(); }

const char* aix_status_name(aix_status status) {
  switch (status) {
    case AIX_OK: return "ok";
    case AIX_E_USAGE: return "usage error";
    case AIX_E_CONFIG: return "config error";
    case AIX_E_DATA: return "data error";
    case AIX_E_IO: return "io error";
    case AIX_E_MISSING_ARTIFACT: return "missing artifact";
    case AIX_E_NETWORK: return "network error";
    case AIX_E_INTERNAL: return "internal error";
  }
  return "unknown";
}

aix_status aix_pipeline_open(const char* config_path, aix_pipeline** out) {
  if (!config_path) return null_arg("config_path");
  if (!out) return null_arg("out");
  return guard([&] {
    if (!std::filesystem::exists(config_path))
      aix::fail(aix::ErrorKind::Config, "config file {} does not exist", config_path);
    *out = new aix_pipeline{std::filesystem::absolute(config_path), {}, nullptr, nullptr};
  });
}

void aix_pipeline_close(aix_pipeline* pipeline) { delete pipeline; }

aix_status aix_pipeline_set_seed(aix_pipeline* p, uint64_t seed) {
  if (!p) return null_arg("pipeline");
  return guard([&] { set_override(p, "run.seed", std::to_string(seed)); });
}

aix_status aix_pipeline_set_threads(aix_pipeline* p, unsigned threads) {
  if (!p) return null_arg("pipeline");
  return guard([&] { set_override(p, "run.threads", std::to_string(threads)); });
}

aix_status aix_pipeline_set_out_dir(aix_pipeline* p, const char* dir) {
  if (!p) return null_arg("pipeline");
  if (!dir) return null_arg("dir");
  return guard([&] {
    set_override(p, "run.out", std::filesystem::absolute(dir).lexically_normal().string());
  });
}

aix_status aix_pipeline_set_option(aix_pipeline* p, const char* key, const char* value) {
  if (!p) return null_arg("pipeline");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return guard([&] { set_override(p, key, value); });
}

aix_status aix_pipeline_set_logger(aix_pipeline* p, aix_log_fn fn, void* user) {
  if (!p) return null_arg("pipeline");
  p->log = fn;
  p->log_user = user;
  last_error.clear();
  return AIX_OK;
}

aix_status aix_pipeline_run_stage(aix_pipeline* p, const char* stage) {
  if (!p) return null_arg("pipeline");
  if (!stage) return null_arg("stage");
  return guard([&] {
    auto cfg = aix::pipeline::load_config(p->config, p->overrides);
    aix::pipeline::Logger logger;
    if (p->log)
      logger = [p](aix::pipeline::LogLevel level, const std::string& msg) {
        p->log(p->log_user,
               level == aix::pipeline::LogLevel::Warning ? AIX_LOG_WARNING : AIX_LOG_INFO,
               msg.c_str());
      };
    aix::pipeline::run_stage(cfg, stage, logger);
  });
}

size_t aix_stage_count(void) { return aix::pipeline::stage_names().size(); }

const char* aix_stage_name(size_t index) {
  auto names = aix::pipeline::stage_names();
  return index < names.size() ? names[index].data() : nullptr;
}

aix_status aix_store_create(uint32_t dim, aix_store** out) {
  if (!out) return null_arg("out");
  return guard([&] { *out = new aix_store{aix::embedding::EmbeddingStore(dim)}; });
}

aix_status aix_store_load(const char* path, aix_store** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard([&] { *out = new aix_store{aix::embedding::EmbeddingStore::load(path)}; });
}

aix_status aix_store_add(aix_store* s, const char* id, const float* vector, uint32_t dim) {
  if (!s) return null_arg("store");
  if (!id) return null_arg("id");
  if (!vector) return null_arg("vector");
  return guard([&] {
    if (dim != s->store.dim())
      aix::fail(aix::ErrorKind::Data, "vector has dim {}, store has {}", dim, s->store.dim());
    s->store.add(id, {vector, dim});
  });
}

aix_status aix_store_save(const aix_store* s, const char* path) {
  if (!s) return null_arg("store");
  if (!path) return null_arg("path");
  return guard([&] { s->store.save(path); });
}

size_t aix_store_count(const aix_store* s) { return s ? s->store.size() : 0; }

uint32_t aix_store_dim(const aix_store* s) { return s ? s->store.dim() : 0; }

const char* aix_store_id(const aix_store* s, size_t index) {
  if (!s || index >= s->store.size()) return nullptr;
  return s->store.id(index).c_str();
}

const float* aix_store_vector(const aix_store* s, size_t index) {
  if (!s || index >= s->store.size()) return nullptr;
  return s->store.vector(index).data();
}

void aix_store_free(aix_store* s) { delete s; }

aix_status aix_cosine(const float* u, const float* v, size_t dim, double* out) {
  if (!u) return null_arg("u");
  if (!v) return null_arg("v");
  if (!out) return null_arg("out");
  return guard([&] { *out = aix::embedding::cosine({u, dim}, {v, dim}); });
}

aix_status aix_disruption_index(uint64_t n_i, uint64_t n_j, uint64_t n_k, double* out,
                                int* defined) {
  if (!out) return null_arg("out");
  if (!defined) return null_arg("defined");
  return guard([&] {
    auto d = aix::disruption::disruption_index({n_i, n_j, n_k});
    *defined = d.has_value();
    *out = d.value_or(0.0);
  });
}

aix_status aix_two_prop_test(uint64_t k1, uint64_t n1, uint64_t k2, uint64_t n2,
                             aix_two_prop* out) {
  if (!out) return null_arg("out");
  return guard([&] {
    auto r = aix::stats::two_prop_test(k1, n1, k2, n2);
    *out = {r.p1, r.p2, r.z.value_or(0.0), r.p_value.value_or(1.0), r.z.has_value()};
  });
}

aix_status aix_pearson(const double* x, const double* y, size_t n, double* r, double* p_value) {
  if (!x) return null_arg("x");
  if (!y) return null_arg("y");
  if (!r) return null_arg("r");
  if (!p_value) return null_arg("p_value");
  return guard([&] {
    auto c = aix::stats::pearson({x, n}, {y, n});
    *r = c.r;
    *p_value = c.p_value;
  });
}

}  // extern "C"
