// Command-line front end. Links only against the C interface in bid/bid.h.

#include "bid/bid.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

struct MatrixDeleter {
  void operator()(bid_matrix* m) const { bid_matrix_free(m); }
};
struct ResultDeleter {
  void operator()(bid_result* r) const { bid_result_free(r); }
};
struct ReportDeleter {
  void operator()(bid_report* r) const { bid_report_free(r); }
};
using MatrixPtr = std::unique_ptr<bid_matrix, MatrixDeleter>;
using ResultPtr = std::unique_ptr<bid_result, ResultDeleter>;
using ReportPtr = std::unique_ptr<bid_report, ReportDeleter>;

// Single machine-parsable line on stderr, exit code from the status.
int fail(bid_status status, const std::string& context) {
  std::fprintf(stderr, "error: %s: %s: %s\n", bid_status_name(status), context.c_str(),
               bid_last_error());
  return static_cast<int>(status);
}

int config_fail(const std::string& message) {
  std::fprintf(stderr, "error: config_error: %s\n", message.c_str());
  return BID_ERROR_CONFIG;
}

struct SamplerFlags {
  std::string method = "gbt";
  std::vector<std::size_t> ks;
  std::size_t iterations = 500;
  std::size_t burn_in = 100;
  std::size_t thinning = 5;
  std::uint64_t seed = 0;
  std::optional<double> oversample;
  bool aggressive = false;
  bool early_stop = false;
};

struct PreprocessFlags {
  bool enabled = false;
  std::optional<double> cap;
  bool undo_log = false;
  bool no_standardize = false;
  bool duplicate_columns = false;
  std::optional<std::size_t> min_observed;
};

struct InputFlags {
  std::string input;
  std::string out;
  bool header = false;
};

void add_sampler_flags(CLI::App* cmd, SamplerFlags& f, bool repeat_k) {
  if (repeat_k)
    cmd->add_option("--k", f.ks, "Target rank (repeatable)")->required();
  else
    cmd->add_option("--k", f.ks, "Target rank")->required()->expected(1);
  cmd->add_option("--iterations", f.iterations, "Gibbs iterations");
  cmd->add_option("--burn-in", f.burn_in, "Burn-in iterations");
  cmd->add_option("--thinning", f.thinning, "Thinning interval");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--oversample", f.oversample, "Column oversampling factor (rid only)");
  cmd->add_flag("--early-stop", f.early_stop, "Stop when the loss plateaus");
}

void add_preprocess_flags(CLI::App* cmd, PreprocessFlags& f) {
  cmd->add_flag("--preprocess", f.enabled, "Run the preprocessing pipeline");
  cmd->add_option("--cap", f.cap, "Cap observed values (implies --preprocess)");
  cmd->add_flag("--undo-log", f.undo_log, "Exponentiate observed values first (implies --preprocess)");
  cmd->add_flag("--no-standardize", f.no_standardize,
                "Skip per-column standardization (implies --preprocess)");
  cmd->add_flag("--duplicate-columns", f.duplicate_columns,
                "Append a copy of every column (implies --preprocess)");
  cmd->add_option("--min-observed", f.min_observed,
                  "Drop rows/columns with fewer observed entries (implies --preprocess)");
}

void add_input_flags(CLI::App* cmd, InputFlags& f) {
  cmd->add_option("input", f.input, "Input matrix (.csv, .mtx)")->required();
  cmd->add_option("out,--out", f.out, "Output directory");
  cmd->add_flag("--header", f.header, "CSV input has a header row");
}

bid_status load_input(const InputFlags& in, const PreprocessFlags& pp, MatrixPtr& out) {
  bid_matrix* raw = nullptr;
  bid_status st = bid_matrix_load(in.input.c_str(), BID_FORMAT_AUTO, in.header, &raw);
  if (st != BID_OK) return st;
  MatrixPtr loaded(raw);
  const bool enabled = pp.enabled || pp.cap || pp.undo_log || pp.no_standardize ||
                       pp.duplicate_columns || pp.min_observed;
  if (!enabled) {
    out = std::move(loaded);
    return BID_OK;
  }
  bid_preprocess_options opts;
  bid_preprocess_options_default(&opts);
  if (pp.cap) opts.cap_value = *pp.cap;
  opts.undo_log = pp.undo_log;
  opts.standardize = !pp.no_standardize;
  opts.duplicate_columns = pp.duplicate_columns;
  if (pp.min_observed) opts.min_observed = *pp.min_observed;
  bid_matrix* processed = nullptr;
  st = bid_preprocess(loaded.get(), &opts, &processed);
  if (st != BID_OK) return st;
  out.reset(processed);
  return BID_OK;
}

bid_status fill_options(const SamplerFlags& f, bid_options& opts) {
  bid_options_default(&opts);
  opts.iterations = f.iterations;
  opts.burn_in = f.burn_in;
  opts.thinning = f.thinning;
  opts.seed = f.seed;
  opts.early_stop = f.early_stop;
  if (f.oversample) opts.oversample = *f.oversample;
  if (!f.ks.empty()) opts.k = f.ks.front();
  return BID_OK;
}

int run_decompose(const InputFlags& in, const PreprocessFlags& pp, const SamplerFlags& f) {
  if (in.out.empty()) return config_fail("decompose needs an output directory");
  bid_options opts;
  fill_options(f, opts);
  bid_method method;
  if (bid_parse_method(f.method.c_str(), &method) != BID_OK)
    return fail(BID_ERROR_CONFIG, "--method");
  opts.method = method;
  opts.aggressive = f.aggressive;
  if (f.oversample && method != BID_METHOD_RID)
    return config_fail("--oversample is only valid with --method rid");
  if (f.aggressive && method != BID_METHOD_GBT && method != BID_METHOD_GBT_AGGRESSIVE)
    return config_fail("--aggressive is only valid with --method gbt");

  MatrixPtr data;
  if (bid_status st = load_input(in, pp, data); st != BID_OK) return fail(st, in.input);
  bid_result* raw = nullptr;
  if (bid_status st = bid_decompose(data.get(), &opts, &raw); st != BID_OK)
    return fail(st, "decompose");
  ResultPtr result(raw);
  if (bid_status st = bid_result_write(result.get(), in.out.c_str()); st != BID_OK)
    return fail(st, in.out);
  std::printf("method=%s k=%zu mse=%.6g mse_observed=%.6g max_abs_w=%.6g\n", f.method.c_str(),
              bid_result_k(result.get()), bid_result_metric(result.get(), BID_METRIC_MSE),
              bid_result_metric(result.get(), BID_METRIC_MSE_OBSERVED),
              bid_result_metric(result.get(), BID_METRIC_MAX_ABS_W));
  return 0;
}

int run_benchmark(const InputFlags& in, const PreprocessFlags& pp, const SamplerFlags& f,
                  const std::vector<std::string>& methods) {
  if (in.out.empty()) return config_fail("benchmark needs an output directory");
  bid_options opts;
  fill_options(f, opts);
  std::vector<bid_method> codes;
  for (const auto& name : methods) {
    bid_method m;
    if (bid_parse_method(name.c_str(), &m) != BID_OK) return fail(BID_ERROR_CONFIG, "--methods");
    codes.push_back(m);
  }
  MatrixPtr data;
  if (bid_status st = load_input(in, pp, data); st != BID_OK) return fail(st, in.input);
  if (bid_status st = bid_benchmark(data.get(), f.ks.data(), f.ks.size(), codes.data(),
                                    codes.size(), &opts, in.out.c_str());
      st != BID_OK)
    return fail(st, "benchmark");
  std::printf("wrote %s\n", (std::filesystem::path(in.out) / "benchmark.csv").string().c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian interpolative decomposition (GBT / GBTN Gibbs samplers, randomized ID)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bid_version()));

  InputFlags dec_in;
  PreprocessFlags dec_pp;
  SamplerFlags dec;
  auto* decompose = app.add_subcommand("decompose", "Decompose a matrix as A ~ C W");
  add_input_flags(decompose, dec_in);
  add_preprocess_flags(decompose, dec_pp);
  add_sampler_flags(decompose, dec, false);
  decompose->add_option("--method", dec.method, "gbt, gbtn, gbt-aggressive or rid");
  decompose->add_flag("--aggressive", dec.aggressive, "Aggressive updates (gbt only)");

  InputFlags bench_in;
  PreprocessFlags bench_pp;
  SamplerFlags bench;
  std::vector<std::string> bench_methods{"gbt", "rid"};
  auto* benchmark = app.add_subcommand("benchmark", "Compare methods across ranks");
  add_input_flags(benchmark, bench_in);
  add_preprocess_flags(benchmark, bench_pp);
  add_sampler_flags(benchmark, bench, true);
  benchmark->add_option("--method", bench_methods, "Methods to compare (repeatable)")
      ->delimiter(',');

  bid_synth_options synth_opts;
  bid_synth_options_default(&synth_opts);
  std::string synth_out;
  std::string synth_truth;
  bool synth_no_dup = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic ID instance");
  synth->add_option("out", synth_out, "Output CSV path")->required();
  synth->add_option("--truth", synth_truth, "Ground-truth sidecar (default <out>.truth.json)");
  synth->add_option("--rows", synth_opts.rows, "Rows");
  synth->add_option("--cols", synth_opts.cols, "Columns before duplication");
  synth->add_option("--rank", synth_opts.rank, "True rank K");
  synth->add_option("--noise", synth_opts.noise, "Gaussian noise standard deviation");
  synth->add_option("--seed", synth_opts.seed, "Random seed");
  synth->add_flag("--no-duplicate", synth_no_dup, "Do not duplicate columns");

  bid_diagnose_options diag_opts;
  bid_diagnose_options_default(&diag_opts);
  std::string diag_trace;
  std::string diag_out;
  auto* diagnose = app.add_subcommand("diagnose", "Autocorrelation and convergence report");
  diagnose->add_option("trace", diag_trace, "trace.csv from decompose")->required();
  diagnose->add_option("out,--out", diag_out, "Output directory (default: next to the trace)");
  diagnose->add_option("--burn-in", diag_opts.burn_in, "Burn-in iterations");
  diagnose->add_option("--thinning", diag_opts.thinning, "Thinning interval");
  diagnose->add_option("--max-lag", diag_opts.max_lag, "Maximum autocorrelation lag");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return config_fail(e.what());
  }

  if (*decompose) return run_decompose(dec_in, dec_pp, dec);
  if (*benchmark) return run_benchmark(bench_in, bench_pp, bench, bench_methods);
  if (*synth) {
    synth_opts.duplicate = !synth_no_dup;
    if (synth_truth.empty()) synth_truth = synth_out + ".truth.json";
    if (bid_status st = bid_synthesize(&synth_opts, synth_out.c_str(), synth_truth.c_str());
        st != BID_OK)
      return fail(st, "synth");
    std::printf("wrote %s and %s\n", synth_out.c_str(), synth_truth.c_str());
    return 0;
  }
  if (*diagnose) {
    if (diag_out.empty())
      diag_out = std::filesystem::path(diag_trace).parent_path().string();
    if (diag_out.empty()) diag_out = ".";
    bid_report* raw = nullptr;
    if (bid_status st = bid_diagnose(diag_trace.c_str(), &diag_opts, diag_out.c_str(), &raw);
        st != BID_OK)
      return fail(st, diag_trace);
    ReportPtr report(raw);
    const long plateau = bid_report_plateau(report.get());
    std::printf("mixing: %s\n", bid_report_mixing_good(report.get()) ? "good" : "poor");
    if (plateau >= 0)
      std::printf("iterations_to_plateau: %ld\n", plateau);
    else
      std::printf("iterations_to_plateau: none\n");
    for (std::size_t i = 0; i < bid_report_probe_count(report.get()); ++i)
      if (bid_report_probe_degenerate(report.get(), i) == 1)
        std::printf("probe %s: degenerate chain\n", bid_report_probe_name(report.get(), i));
    return 0;
  }
  return config_fail("no subcommand");
}
