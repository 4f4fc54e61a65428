#include "bid/bid.h"

#include "bid/commands.hpp"
#include "bid/error.hpp"
#include "bid/io.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <utility>

struct bid_matrix {
  bid::ObservedMatrix m;
};

struct bid_result {
  bid::DecomposeResult result;
  bid::DecomposeConfig config;
};

struct bid_report {
  bid::RunReport report;
};

namespace {

thread_local std::string last_error;

bid_status to_status(bid::ErrorKind kind) {
  switch (kind) {
  case bid::ErrorKind::config: return BID_ERROR_CONFIG;
  case bid::ErrorKind::input: return BID_ERROR_INPUT;
  case bid::ErrorKind::numerical: return BID_ERROR_NUMERICAL;
  }
  return BID_ERROR_INTERNAL;
}

template <typename F>
bid_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return BID_OK;
  } catch (const bid::Error& e) {
    last_error = e.what();
    return to_status(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return BID_ERROR_INPUT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return BID_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return BID_ERROR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw bid::ConfigError(std::string(what) + " must not be null");
}

bid::Method to_method(bid_method m) {
  switch (m) {
  case BID_METHOD_GBT: return bid::Method::gbt;
  case BID_METHOD_GBTN: return bid::Method::gbtn;
  case BID_METHOD_GBT_AGGRESSIVE: return bid::Method::gbt_aggressive;
  case BID_METHOD_RID: return bid::Method::rid;
  }
  throw bid::ConfigError("unknown method code " + std::to_string(static_cast<int>(m)));
}

bid::DecomposeConfig to_config(const bid_options& o) {
  bid::DecomposeConfig cfg;
  cfg.method = to_method(o.method);
  cfg.seed = o.seed;
  cfg.oversample = o.oversample;
  bid::Hyperparameters& hp = cfg.hp;
  hp.k = o.k;
  hp.iterations = o.iterations;
  hp.burn_in = o.burn_in;
  hp.thinning = o.thinning;
  hp.aggressive = o.aggressive != 0;
  hp.a = o.a;
  hp.b = o.b;
  hp.alpha_sigma = o.alpha_sigma;
  hp.beta_sigma = o.beta_sigma;
  hp.mu_mu = o.mu_mu;
  hp.tau_mu = o.tau_mu;
  hp.alpha_t = o.alpha_t;
  hp.beta_t = o.beta_t;
  hp.early_stop = o.early_stop != 0;
  hp.probe_count = o.probe_count;
  if (hp.aggressive && cfg.method == bid::Method::gbt) cfg.method = bid::Method::gbt_aggressive;
  if (hp.aggressive && cfg.method != bid::Method::gbt_aggressive)
    throw bid::ConfigError("aggressive updates are only available for the gbt method");
  return cfg;
}

bid::MatrixFormat resolve_format(bid_format f, const char* path) {
  switch (f) {
  case BID_FORMAT_CSV: return bid::MatrixFormat::csv;
  case BID_FORMAT_MATRIX_MARKET: return bid::MatrixFormat::matrix_market;
  case BID_FORMAT_AUTO: return bid::format_from_path(path);
  }
  throw bid::ConfigError("unknown matrix format code");
}

} // namespace

extern "C" {

const char* bid_version(void) { return "1.0.0"; }

const char* bid_last_error(void) { return last_error.c_str(); }

const char* bid_status_name(bid_status status) {
  switch (status) {
  case BID_OK: return "ok";
  case BID_ERROR_CONFIG: return "config_error";
  case BID_ERROR_INPUT: return "input_error";
  case BID_ERROR_NUMERICAL: return "numerical_error";
  case BID_ERROR_INTERNAL: return "internal_error";
  }
  return "internal_error";
}

void bid_options_default(bid_options* opts) {
  if (!opts) return;
  const bid::Hyperparameters hp;
  *opts = bid_options{};
  opts->method = BID_METHOD_GBT;
  opts->k = 5;
  opts->iterations = hp.iterations;
  opts->burn_in = hp.burn_in;
  opts->thinning = hp.thinning;
  opts->seed = 0;
  opts->oversample = 1.2;
  opts->aggressive = 0;
  opts->a = hp.a;
  opts->b = hp.b;
  opts->alpha_sigma = hp.alpha_sigma;
  opts->beta_sigma = hp.beta_sigma;
  opts->mu_mu = hp.mu_mu;
  opts->tau_mu = hp.tau_mu;
  opts->alpha_t = hp.alpha_t;
  opts->beta_t = hp.beta_t;
  opts->early_stop = 0;
  opts->probe_count = hp.probe_count;
}

void bid_preprocess_options_default(bid_preprocess_options* opts) {
  if (!opts) return;
  const bid::PreprocessConfig cfg;
  opts->has_cap = cfg.cap_value.has_value();
  opts->cap_value = cfg.cap_value.value_or(0.0);
  opts->undo_log = cfg.undo_log;
  opts->standardize = cfg.standardize;
  opts->duplicate_columns = cfg.duplicate_columns;
  opts->min_observed = cfg.min_observed_per_vector;
}

void bid_synth_options_default(bid_synth_options* opts) {
  if (!opts) return;
  const bid::SynthConfig cfg;
  opts->rows = cfg.rows;
  opts->cols = cfg.cols;
  opts->rank = cfg.rank;
  opts->noise = cfg.noise;
  opts->seed = cfg.seed;
  opts->duplicate = cfg.duplicate;
}

void bid_diagnose_options_default(bid_diagnose_options* opts) {
  if (!opts) return;
  const bid::DiagnoseConfig cfg;
  opts->burn_in = cfg.burn_in;
  opts->thinning = cfg.thinning;
  opts->max_lag = cfg.max_lag;
  opts->mixing_lag = cfg.mixing_lag;
  opts->mixing_threshold = cfg.mixing_threshold;
}

bid_status bid_parse_method(const char* name, bid_method* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    switch (bid::parse_method(name)) {
    case bid::Method::gbt: *out = BID_METHOD_GBT; break;
    case bid::Method::gbtn: *out = BID_METHOD_GBTN; break;
    case bid::Method::gbt_aggressive: *out = BID_METHOD_GBT_AGGRESSIVE; break;
    case bid::Method::rid: *out = BID_METHOD_RID; break;
    }
  });
}

bid_status bid_matrix_load(const char* path, bid_format format, int csv_header, bid_matrix** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto m = bid::load_matrix(path, resolve_format(format, path), csv_header != 0);
    *out = new bid_matrix{std::move(m)};
  });
}

bid_status bid_matrix_from_dense(size_t rows, size_t cols, const double* row_major,
                                 const unsigned char* mask, bid_matrix** out) {
  return guarded([&] {
    require(row_major, "row_major");
    require(out, "out");
    *out = nullptr;
    if (rows == 0 || cols == 0) throw bid::InputError("matrix dimensions must be positive");
    std::vector<double> values(row_major, row_major + rows * cols);
    for (double v : values)
      if (!std::isfinite(v)) throw bid::InputError("matrix contains a non-finite value");
    std::vector<std::uint8_t> bits(rows * cols, 1);
    if (mask)
      for (size_t i = 0; i < bits.size(); ++i) bits[i] = mask[i] ? 1 : 0;
    *out = new bid_matrix{
        bid::ObservedMatrix(bid::DenseMatrix(rows, cols, std::move(values)), std::move(bits))};
  });
}

bid_status bid_matrix_save(const bid_matrix* m, const char* path, bid_format format) {
  return guarded([&] {
    require(m, "matrix");
    require(path, "path");
    if (resolve_format(format, path) == bid::MatrixFormat::csv)
      bid::save_csv(path, m->m);
    else
      bid::save_matrix_market(path, m->m);
  });
}

size_t bid_matrix_rows(const bid_matrix* m) { return m ? m->m.rows() : 0; }
size_t bid_matrix_cols(const bid_matrix* m) { return m ? m->m.cols() : 0; }
size_t bid_matrix_observed(const bid_matrix* m) { return m ? m->m.observed_count() : 0; }

bid_status bid_matrix_copy_values(const bid_matrix* m, double* out, size_t len) {
  return guarded([&] {
    require(m, "matrix");
    require(out, "out");
    const auto data = m->m.values.data();
    if (len < data.size()) throw bid::ConfigError("output buffer too small");
    std::memcpy(out, data.data(), data.size() * sizeof(double));
  });
}

void bid_matrix_free(bid_matrix* m) { delete m; }

bid_status bid_preprocess(const bid_matrix* in, const bid_preprocess_options* opts,
                          bid_matrix** out) {
  return guarded([&] {
    require(in, "input");
    require(opts, "options");
    require(out, "out");
    *out = nullptr;
    bid::PreprocessConfig cfg;
    cfg.cap_value = opts->has_cap ? std::optional<double>(opts->cap_value) : std::nullopt;
    cfg.undo_log = opts->undo_log != 0;
    cfg.standardize = opts->standardize != 0;
    cfg.duplicate_columns = opts->duplicate_columns != 0;
    cfg.min_observed_per_vector = opts->min_observed;
    *out = new bid_matrix{bid::preprocess(in->m, cfg)};
  });
}

bid_status bid_synthesize(const bid_synth_options* opts, const char* data_path,
                          const char* truth_path) {
  return guarded([&] {
    require(opts, "options");
    require(data_path, "data_path");
    require(truth_path, "truth_path");
    bid::SynthConfig cfg;
    cfg.rows = opts->rows;
    cfg.cols = opts->cols;
    cfg.rank = opts->rank;
    cfg.noise = opts->noise;
    cfg.seed = opts->seed;
    cfg.duplicate = opts->duplicate != 0;
    const auto inst = bid::synthesize(cfg);
    bid::write_synth(inst, cfg, data_path, truth_path);
  });
}

bid_status bid_decompose(const bid_matrix* data, const bid_options* opts, bid_result** out) {
  return guarded([&] {
    require(data, "data");
    require(opts, "options");
    require(out, "out");
    *out = nullptr;
    const bid::DecomposeConfig cfg = to_config(*opts);
    auto result = bid::decompose(data->m, cfg);
    *out = new bid_result{std::move(result), cfg};
  });
}

bid_status bid_result_write(const bid_result* r, const char* out_dir) {
  return guarded([&] {
    require(r, "result");
    require(out_dir, "out_dir");
    bid::write_decompose(r->result, r->config, out_dir);
  });
}

size_t bid_result_k(const bid_result* r) { return r ? r->result.j_set.size() : 0; }
size_t bid_result_cols(const bid_result* r) { return r ? r->result.w.cols() : 0; }
size_t bid_result_iterations(const bid_result* r) {
  return r && r->result.trace ? r->result.trace->iterations() : 0;
}

bid_status bid_result_j_set(const bid_result* r, size_t* out, size_t len) {
  return guarded([&] {
    require(r, "result");
    require(out, "out");
    if (len < r->result.j_set.size()) throw bid::ConfigError("output buffer too small");
    for (size_t i = 0; i < r->result.j_set.size(); ++i) out[i] = r->result.j_set[i];
  });
}

bid_status bid_result_copy_w(const bid_result* r, double* out, size_t len) {
  return guarded([&] {
    require(r, "result");
    require(out, "out");
    const auto data = r->result.w.data();
    if (len < data.size()) throw bid::ConfigError("output buffer too small");
    std::memcpy(out, data.data(), data.size() * sizeof(double));
  });
}

double bid_result_metric(const bid_result* r, bid_metric metric) {
  if (!r) return std::numeric_limits<double>::quiet_NaN();
  const auto& res = r->result;
  switch (metric) {
  case BID_METRIC_MSE: return res.mse;
  case BID_METRIC_MSE_OBSERVED: return res.mse_observed;
  case BID_METRIC_MSE_SAMPLER_FINAL: return res.mse_sampler_final;
  case BID_METRIC_MSE_POSTERIOR_MEAN: return res.mse_posterior_mean;
  case BID_METRIC_MAX_ABS_W: return res.max_abs_w;
  case BID_METRIC_MAX_MAGNITUDE_EXCESS: return res.max_magnitude_excess;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void bid_result_free(bid_result* r) { delete r; }

bid_status bid_benchmark(const bid_matrix* data, const size_t* ks, size_t k_count,
                         const bid_method* methods, size_t method_count, const bid_options* base,
                         const char* out_dir) {
  return guarded([&] {
    require(data, "data");
    require(ks, "ks");
    require(methods, "methods");
    require(base, "options");
    require(out_dir, "out_dir");
    bid_options copy = *base;
    copy.aggressive = 0;
    const bid::DecomposeConfig cfg = to_config(copy);
    std::vector<size_t> kv(ks, ks + k_count);
    std::vector<bid::Method> mv;
    for (size_t i = 0; i < method_count; ++i) mv.push_back(to_method(methods[i]));
    const auto cells = bid::benchmark(data->m, kv, mv, cfg);
    bid::write_benchmark(cells, out_dir);
  });
}

bid_status bid_diagnose(const char* trace_path, const bid_diagnose_options* opts,
                        const char* out_dir, bid_report** out) {
  return guarded([&] {
    require(trace_path, "trace_path");
    require(opts, "options");
    require(out_dir, "out_dir");
    if (out) *out = nullptr;
    bid::DiagnoseConfig cfg;
    cfg.burn_in = opts->burn_in;
    cfg.thinning = opts->thinning;
    cfg.max_lag = opts->max_lag;
    cfg.mixing_lag = opts->mixing_lag;
    cfg.mixing_threshold = opts->mixing_threshold;
    if (cfg.thinning == 0) throw bid::ConfigError("thinning must be at least 1");
    if (cfg.max_lag <= cfg.mixing_lag) throw bid::ConfigError("max_lag must exceed mixing_lag");
    const bid::Table table = bid::load_table(trace_path);
    bid::RunReport report = bid::diagnose(table, cfg);
    bid::write_report(report, cfg, out_dir);
    if (out) *out = new bid_report{std::move(report)};
  });
}

int bid_report_mixing_good(const bid_report* r) { return r && r->report.mixing_good ? 1 : 0; }

long bid_report_plateau(const bid_report* r) {
  if (!r || !r->report.iterations_to_plateau) return -1;
  return static_cast<long>(*r->report.iterations_to_plateau);
}

size_t bid_report_probe_count(const bid_report* r) { return r ? r->report.probes.size() : 0; }

const char* bid_report_probe_name(const bid_report* r, size_t i) {
  if (!r || i >= r->report.probes.size()) return nullptr;
  return r->report.probes[i].name.c_str();
}

int bid_report_probe_degenerate(const bid_report* r, size_t i) {
  if (!r || i >= r->report.probes.size()) return -1;
  return r->report.probes[i].error.empty() ? 0 : 1;
}

void bid_report_free(bid_report* r) { delete r; }

} // extern "C"
