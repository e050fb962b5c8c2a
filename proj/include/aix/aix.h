#ifndef AIX_AIX_H
#define AIX_AIX_H

#include <stddef.h>
#include <stdint.h>

#if defined(AIX_BUILDING_LIBRARY)
#define AIX_API __attribute__((visibility("default")))
#else
#define AIX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aix_status {
  AIX_OK = 0,
  AIX_E_USAGE = 1,
  AIX_E_CONFIG = 2,
  AIX_E_DATA = 3,
  AIX_E_IO = 4,
  AIX_E_MISSING_ARTIFACT = 5,
  AIX_E_NETWORK = 6,
  AIX_E_INTERNAL = 7
} aix_status;

typedef enum aix_log_level { AIX_LOG_INFO = 0, AIX_LOG_WARNING = 1 } aix_log_level;

typedef void (*aix_log_fn)(void* user, aix_log_level level, const char* message);

AIX_API const char* aix_version(void);

/* Message for the last failing call on this thread; "" when none. */
AIX_API const char* aix_last_error(void);

AIX_API const char* aix_status_name(aix_status status);

/* ---- pipeline ---------------------------------------------------------- */

typedef struct aix_pipeline aix_pipeline;

/* The config file is read and validated on every run, after overrides. */
AIX_API aix_status aix_pipeline_open(const char* config_path, aix_pipeline** out);
AIX_API void aix_pipeline_close(aix_pipeline* pipeline);

AIX_API aix_status aix_pipeline_set_seed(aix_pipeline* pipeline, uint64_t seed);
AIX_API aix_status aix_pipeline_set_threads(aix_pipeline* pipeline, unsigned threads);
AIX_API aix_status aix_pipeline_set_out_dir(aix_pipeline* pipeline, const char* dir);
/* key is "section.name", e.g. "zscores.n_iter". */
AIX_API aix_status aix_pipeline_set_option(aix_pipeline* pipeline, const char* key,
                                           const char* value);
AIX_API aix_status aix_pipeline_set_logger(aix_pipeline* pipeline, aix_log_fn fn, void* user);

/* One stage name, or "run-all". */
AIX_API aix_status aix_pipeline_run_stage(aix_pipeline* pipeline, const char* stage);

AIX_API size_t aix_stage_count(void);
AIX_API const char* aix_stage_name(size_t index);

/* ---- embedding stores -------------------------------------------------- */

typedef struct aix_store aix_store;

AIX_API aix_status aix_store_create(uint32_t dim, aix_store** out);
AIX_API aix_status aix_store_load(const char* path, aix_store** out);
AIX_API aix_status aix_store_add(aix_store* store, const char* id, const float* vector,
                                 uint32_t dim);
AIX_API aix_status aix_store_save(const aix_store* store, const char* path);
AIX_API size_t aix_store_count(const aix_store* store);
AIX_API uint32_t aix_store_dim(const aix_store* store);
/* Pointers stay valid until the store is modified or freed. */
AIX_API const char* aix_store_id(const aix_store* store, size_t index);
AIX_API const float* aix_store_vector(const aix_store* store, size_t index);
AIX_API void aix_store_free(aix_store* store);

/* ---- primitives -------------------------------------------------------- */

AIX_API aix_status aix_cosine(const float* u, const float* v, size_t dim, double* out);

/* *defined is 0 when nothing cites the focal patent or its references. */
AIX_API aix_status aix_disruption_index(uint64_t n_i, uint64_t n_j, uint64_t n_k, double* out,
                                        int* defined);

typedef struct aix_two_prop {
  double p1;
  double p2;
  double z;
  double p_value;
  int defined;
} aix_two_prop;

AIX_API aix_status aix_two_prop_test(uint64_t k1, uint64_t n1, uint64_t k2, uint64_t n2,
                                     aix_two_prop* out);

AIX_API aix_status aix_pearson(const double* x, const double* y, size_t n, double* r,
                               double* p_value);

#ifdef __cplusplus
}
#endif

#endif
