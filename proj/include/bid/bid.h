/*
 * C interface to the Bayesian interpolative decomposition library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a bid_status; on
 * failure bid_last_error() describes the problem for the calling thread.
 */
#ifndef BID_BID_H
#define BID_BID_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BID_BUILDING_LIBRARY)
#    define BID_API __declspec(dllexport)
#  else
#    define BID_API __declspec(dllimport)
#  endif
#else
#  define BID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2..4 match the CLI exit codes. */
typedef enum bid_status {
  BID_OK = 0,
  BID_ERROR_CONFIG = 2,
  BID_ERROR_INPUT = 3,
  BID_ERROR_NUMERICAL = 4,
  BID_ERROR_INTERNAL = 5
} bid_status;

typedef enum bid_method {
  BID_METHOD_GBT = 0,
  BID_METHOD_GBTN = 1,
  BID_METHOD_GBT_AGGRESSIVE = 2,
  BID_METHOD_RID = 3
} bid_method;

typedef enum bid_format {
  BID_FORMAT_AUTO = 0, /* by file extension: .mtx/.mm MatrixMarket, else CSV */
  BID_FORMAT_CSV = 1,
  BID_FORMAT_MATRIX_MARKET = 2
} bid_format;

typedef enum bid_metric {
  BID_METRIC_MSE = 0,               /* MSE(A, C W) after identity enforcement */
  BID_METRIC_MSE_OBSERVED = 1,
  BID_METRIC_MSE_SAMPLER_FINAL = 2, /* MSE(A, X Y) at the last iteration */
  BID_METRIC_MSE_POSTERIOR_MEAN = 3,
  BID_METRIC_MAX_ABS_W = 4,
  BID_METRIC_MAX_MAGNITUDE_EXCESS = 5
} bid_metric;

typedef struct bid_matrix bid_matrix;
typedef struct bid_result bid_result;
typedef struct bid_report bid_report;

typedef struct bid_options {
  bid_method method;
  size_t k;
  size_t iterations;
  size_t burn_in;
  size_t thinning;
  uint64_t seed;
  double oversample; /* rid only */
  int aggressive;    /* gbt only */
  double a, b;
  double alpha_sigma, beta_sigma;
  double mu_mu, tau_mu, alpha_t, beta_t;
  int early_stop;
  size_t probe_count;
} bid_options;

typedef struct bid_preprocess_options {
  int has_cap;
  double cap_value;
  int undo_log;
  int standardize;
  int duplicate_columns;
  size_t min_observed;
} bid_preprocess_options;

typedef struct bid_synth_options {
  size_t rows;
  size_t cols; /* before duplication */
  size_t rank;
  double noise;
  uint64_t seed;
  int duplicate;
} bid_synth_options;

typedef struct bid_diagnose_options {
  size_t burn_in;
  size_t thinning;
  size_t max_lag;
  size_t mixing_lag;
  double mixing_threshold;
} bid_diagnose_options;

BID_API const char* bid_version(void);
BID_API const char* bid_last_error(void);
/* Machine-parsable class name: ok, config_error, input_error, numerical_error, internal_error. */
BID_API const char* bid_status_name(bid_status status);

BID_API void bid_options_default(bid_options* opts);
BID_API void bid_preprocess_options_default(bid_preprocess_options* opts);
BID_API void bid_synth_options_default(bid_synth_options* opts);
BID_API void bid_diagnose_options_default(bid_diagnose_options* opts);
BID_API bid_status bid_parse_method(const char* name, bid_method* out);

BID_API bid_status bid_matrix_load(const char* path, bid_format format, int csv_header,
                                   bid_matrix** out);
/* mask may be NULL (fully observed); nonzero mask bytes mark observed cells. */
BID_API bid_status bid_matrix_from_dense(size_t rows, size_t cols, const double* row_major,
                                         const unsigned char* mask, bid_matrix** out);
BID_API bid_status bid_matrix_save(const bid_matrix* m, const char* path, bid_format format);
BID_API size_t bid_matrix_rows(const bid_matrix* m);
BID_API size_t bid_matrix_cols(const bid_matrix* m);
BID_API size_t bid_matrix_observed(const bid_matrix* m);
BID_API bid_status bid_matrix_copy_values(const bid_matrix* m, double* out, size_t len);
BID_API void bid_matrix_free(bid_matrix* m);

BID_API bid_status bid_preprocess(const bid_matrix* in, const bid_preprocess_options* opts,
                                  bid_matrix** out);

/* Writes the data CSV and a JSON ground-truth sidecar. */
BID_API bid_status bid_synthesize(const bid_synth_options* opts, const char* data_path,
                                  const char* truth_path);

BID_API bid_status bid_decompose(const bid_matrix* data, const bid_options* opts,
                                 bid_result** out);
/* C.csv, W.csv, metadata.json and (Bayesian methods) trace.csv. */
BID_API bid_status bid_result_write(const bid_result* r, const char* out_dir);
BID_API size_t bid_result_k(const bid_result* r);
BID_API size_t bid_result_cols(const bid_result* r);
BID_API size_t bid_result_iterations(const bid_result* r);
BID_API bid_status bid_result_j_set(const bid_result* r, size_t* out, size_t len);
/* Row-major K x N. */
BID_API bid_status bid_result_copy_w(const bid_result* r, double* out, size_t len);
BID_API double bid_result_metric(const bid_result* r, bid_metric metric);
BID_API void bid_result_free(bid_result* r);

/* Runs every (k, method) cell; failures are recorded per cell. Writes
 * benchmark.csv and benchmark_timing.csv under out_dir. */
BID_API bid_status bid_benchmark(const bid_matrix* data, const size_t* ks, size_t k_count,
                                 const bid_method* methods, size_t method_count,
                                 const bid_options* base, const char* out_dir);

/* Reads a trace CSV and writes report.txt and autocorr.csv under out_dir.
 * out may be NULL. */
BID_API bid_status bid_diagnose(const char* trace_path, const bid_diagnose_options* opts,
                                const char* out_dir, bid_report** out);
BID_API int bid_report_mixing_good(const bid_report* r);
/* -1 when the trace never plateaus. */
BID_API long bid_report_plateau(const bid_report* r);
BID_API size_t bid_report_probe_count(const bid_report* r);
BID_API const char* bid_report_probe_name(const bid_report* r, size_t i);
BID_API int bid_report_probe_degenerate(const bid_report* r, size_t i);
BID_API void bid_report_free(bid_report* r);

#ifdef __cplusplus
}
#endif

#endif /* BID_BID_H */
