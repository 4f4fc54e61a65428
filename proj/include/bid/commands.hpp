#pragma once

#include "bid/diagnostics.hpp"
#include "bid/io.hpp"
#include "bid/model.hpp"
#include "bid/sampler.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bid {

enum class Method { gbt, gbtn, gbt_aggressive, rid };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct SynthConfig {
  std::size_t rows = 30;
  std::size_t cols = 20;  // before duplication
  std::size_t rank = 5;
  double noise = 0.0;
  std::uint64_t seed = 0;
  bool duplicate = true;
};

struct SynthInstance {
  ObservedMatrix data;
  std::vector<std::size_t> basis;      // true basis columns before duplication
  std::vector<std::size_t> basis_all;  // including duplicated copies
  DenseMatrix weights;                 // rank x cols, identity on the basis
};

/// Random N(0,1) basis columns, the other columns as uniform [-1,1]
/// combinations of them, columns duplicated as [A | A], then Gaussian noise.
SynthInstance synthesize(const SynthConfig& cfg);
void write_synth(const SynthInstance& inst, const SynthConfig& cfg,
                 const std::filesystem::path& data_path, const std::filesystem::path& truth_path);

struct DecomposeConfig {
  Method method = Method::gbt;
  Hyperparameters hp;
  std::uint64_t seed = 0;
  double oversample = 1.2;
};

void validate(const DecomposeConfig& cfg, std::size_t n);

struct DecomposeResult {
  Method method = Method::gbt;
  std::vector<std::size_t> j_set;
  DenseMatrix c;
  DenseMatrix w;
  std::optional<DenseMatrix> w_raw;   // Bayesian methods: Y[J,:] before identity enforcement
  std::optional<GibbsTrace> trace;    // Bayesian methods only
  double mse = 0.0;                   // MSE(A, C W)
  double mse_observed = 0.0;
  double mse_sampler_final = 0.0;     // MSE(A, X Y) at the last iteration
  double mse_posterior_mean = 0.0;    // mean over burn-in/thinned iterations
  double max_abs_w = 0.0;
  double max_magnitude_excess = 0.0;
  std::size_t accepted_swaps = 0;
};

DecomposeResult decompose(const ObservedMatrix& data, const DecomposeConfig& cfg);

/// C.csv, W.csv, metadata.json and (Bayesian methods) trace.csv under dir.
void write_decompose(const DecomposeResult& result, const DecomposeConfig& cfg,
                     const std::filesystem::path& dir);

struct BenchmarkCell {
  std::size_t k = 0;
  Method method = Method::gbt;
  std::string status;  // "ok" or the error text
  DecomposeResult result;
  double wall_seconds = 0.0;
};

std::vector<BenchmarkCell> benchmark(const ObservedMatrix& data, const std::vector<std::size_t>& ks,
                                     const std::vector<Method>& methods, const DecomposeConfig& base);
/// benchmark.csv holds the deterministic metrics; benchmark_timing.csv the wall times.
void write_benchmark(const std::vector<BenchmarkCell>& cells, const std::filesystem::path& dir);

struct DiagnoseConfig {
  std::size_t burn_in = 100;
  std::size_t thinning = 5;
  std::size_t max_lag = 30;
  std::size_t mixing_lag = 10;
  double mixing_threshold = 0.1;
  PlateauRule plateau;
};

RunReport diagnose(const Table& trace, const DiagnoseConfig& cfg);
/// report.txt (key = value) and autocorr.csv under dir.
void write_report(const RunReport& report, const DiagnoseConfig& cfg,
                  const std::filesystem::path& dir);

} // namespace bid
