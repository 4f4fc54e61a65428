#include "bid/commands.hpp"

#include "bid/error.hpp"
#include "bid/postprocess.hpp"
#include "bid/rid.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace bid {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* method_name(Method m) {
  switch (m) {
  case Method::gbt: return "gbt";
  case Method::gbtn: return "gbtn";
  case Method::gbt_aggressive: return "gbt-aggressive";
  case Method::rid: return "rid";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "gbt") return Method::gbt;
  if (name == "gbtn") return Method::gbtn;
  if (name == "gbt-aggressive") return Method::gbt_aggressive;
  if (name == "rid") return Method::rid;
  throw ConfigError("unknown method '" + name + "' (expected gbt, gbtn, gbt-aggressive or rid)");
}

SynthInstance synthesize(const SynthConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1) throw ConfigError("synth: rows and cols must be positive");
  if (cfg.rank < 1 || cfg.rank > cfg.cols || cfg.rank > cfg.rows)
    throw ConfigError("synth: rank must lie in [1, min(rows, cols)]");
  if (!(cfg.noise >= 0.0) || !std::isfinite(cfg.noise))
    throw ConfigError("synth: noise must be non-negative");

  RandomSource rng(cfg.seed);
  SynthInstance inst;
  const StateVector basis = StateVector::random_subset(cfg.cols, cfg.rank, rng);
  inst.basis = basis.basis();

  DenseMatrix c(cfg.rows, cfg.rank);
  for (double& v : c.data()) v = rng.normal();

  inst.weights = DenseMatrix(cfg.rank, cfg.cols);
  std::size_t next = 0;
  for (std::size_t col = 0; col < cfg.cols; ++col) {
    if (basis.is_basis(col)) {
      inst.weights(next++, col) = 1.0;
    } else {
      for (std::size_t r = 0; r < cfg.rank; ++r) inst.weights(r, col) = 2.0 * rng.uniform() - 1.0;
    }
  }
  const DenseMatrix a = multiply(c, inst.weights);

  const std::size_t n = cfg.duplicate ? 2 * cfg.cols : cfg.cols;
  DenseMatrix values(cfg.rows, n);
  for (std::size_t i = 0; i < cfg.rows; ++i)
    for (std::size_t j = 0; j < n; ++j) values(i, j) = a(i, j % cfg.cols);
  if (cfg.noise > 0.0)
    for (double& v : values.data()) v += cfg.noise * rng.normal();

  inst.basis_all = inst.basis;
  if (cfg.duplicate)
    for (std::size_t b : inst.basis) inst.basis_all.push_back(b + cfg.cols);
  inst.data = ObservedMatrix(std::move(values));
  return inst;
}

void write_synth(const SynthInstance& inst, const SynthConfig& cfg, const fs::path& data_path,
                 const fs::path& truth_path) {
  save_csv(data_path, inst.data);
  ordered_json truth;
  truth["rows"] = cfg.rows;
  truth["cols"] = cfg.cols;
  truth["rank"] = cfg.rank;
  truth["noise"] = cfg.noise;
  truth["seed"] = cfg.seed;
  truth["duplicated"] = cfg.duplicate;
  truth["j_set"] = inst.basis;
  truth["j_set_with_duplicates"] = inst.basis_all;
  ordered_json w = ordered_json::array();
  for (std::size_t r = 0; r < inst.weights.rows(); ++r) {
    auto row = inst.weights.row(r);
    w.push_back(std::vector<double>(row.begin(), row.end()));
  }
  truth["weights"] = std::move(w);
  write_file(truth_path, truth.dump(2) + "\n");
}

void validate(const DecomposeConfig& cfg, std::size_t n) {
  if (cfg.method == Method::rid) {
    if (cfg.hp.k < 1 || cfg.hp.k > n) throw ConfigError("k must lie in [1, number of columns]");
    if (!(cfg.oversample >= 1.0)) throw ConfigError("oversample must be >= 1");
    return;
  }
  if (cfg.hp.aggressive && cfg.method != Method::gbt && cfg.method != Method::gbt_aggressive)
    throw ConfigError("--aggressive is only valid with the gbt method");
  validate(cfg.hp, n);
}

namespace {

Hyperparameters effective_hp(const DecomposeConfig& cfg) {
  Hyperparameters hp = cfg.hp;
  hp.variant = cfg.method == Method::gbtn ? Variant::gbtn : Variant::gbt;
  if (cfg.method == Method::gbt_aggressive) hp.aggressive = true;
  return hp;
}

} // namespace

DecomposeResult decompose(const ObservedMatrix& data, const DecomposeConfig& cfg) {
  if (data.values.empty()) throw InputError("input matrix is empty");
  validate(cfg, data.cols());
  RandomSource rng(cfg.seed);
  DecomposeResult out;
  out.method = cfg.method;

  if (cfg.method == Method::rid) {
    RidResult rid = randomized_id(data.values, cfg.hp.k, cfg.oversample, rng);
    std::vector<std::size_t> order(rid.j_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return rid.j_set[x] < rid.j_set[y]; });
    for (std::size_t o : order) out.j_set.push_back(rid.j_set[o]);
    out.c = data.values.select_columns(out.j_set);
    out.w = rid.w.select_rows(order);
    out.max_abs_w = max_abs(out.w);
    out.max_magnitude_excess = max_magnitude_excess(out.w);
    enforce_identity(out.w, out.j_set);
    out.mse = mse(data.values, out.c, out.w);
    out.mse_observed = data.observed_count() ? mse_observed(data, out.c, out.w) : 0.0;
    out.mse_sampler_final = out.mse;
    out.mse_posterior_mean = out.mse;
    return out;
  }

  const Hyperparameters hp = effective_hp(cfg);
  GibbsRun run = run_sampler(data, hp, rng);
  CanonicalId id = extract_canonical(run.state, data);
  out.j_set = std::move(id.j_set);
  out.c = std::move(id.c);
  out.w = std::move(id.w);
  out.w_raw = std::move(id.w_raw);
  out.mse = mse(data.values, out.c, out.w);
  out.mse_observed = data.observed_count() ? mse_observed(data, out.c, out.w) : 0.0;
  out.mse_sampler_final = run.trace.mse_per_iter.back();
  out.mse_posterior_mean =
      run.trace.iterations() > hp.burn_in
          ? posterior_mean_loss(run.trace.mse_per_iter, hp.burn_in, hp.thinning)
          : posterior_mean_loss(run.trace.mse_per_iter, 0, hp.thinning);
  out.max_abs_w = max_abs(out.w);
  out.max_magnitude_excess = max_magnitude_excess(out.w);
  out.accepted_swaps = run.trace.accepted_swaps;
  out.trace = std::move(run.trace);
  return out;
}

void write_decompose(const DecomposeResult& result, const DecomposeConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  save_dense_csv(dir / "C.csv", result.c);
  save_dense_csv(dir / "W.csv", result.w);
  if (result.trace) save_trace(dir / "trace.csv", *result.trace);

  const Hyperparameters hp = effective_hp(cfg);
  ordered_json meta;
  meta["method"] = method_name(result.method);
  meta["k"] = result.j_set.size();
  meta["seed"] = cfg.seed;
  meta["rows"] = result.c.rows();
  meta["cols"] = result.w.cols();
  meta["j_set"] = result.j_set;
  meta["mse"] = result.mse;
  meta["mse_observed"] = result.mse_observed;
  meta["max_abs_w"] = result.max_abs_w;
  meta["max_magnitude_excess"] = result.max_magnitude_excess;
  if (result.method == Method::rid) {
    meta["oversample"] = cfg.oversample;
  } else {
    meta["mse_sampler_final"] = result.mse_sampler_final;
    meta["mse_posterior_mean"] = result.mse_posterior_mean;
    meta["iterations_run"] = result.trace ? result.trace->iterations() : 0;
    meta["accepted_swaps"] = result.accepted_swaps;
    meta["iterations"] = hp.iterations;
    meta["burn_in"] = hp.burn_in;
    meta["thinning"] = hp.thinning;
    meta["aggressive"] = hp.aggressive;
    meta["a"] = hp.a;
    meta["b"] = hp.b;
    meta["alpha_sigma"] = hp.alpha_sigma;
    meta["beta_sigma"] = hp.beta_sigma;
    if (hp.variant == Variant::gbtn) {
      meta["mu_mu"] = hp.mu_mu;
      meta["tau_mu"] = hp.tau_mu;
      meta["alpha_t"] = hp.alpha_t;
      meta["beta_t"] = hp.beta_t;
    } else {
      meta["gbt_mu"] = hp.gbt_mu;
      meta["gbt_tau"] = hp.gbt_tau;
    }
  }
  write_file(dir / "metadata.json", meta.dump(2) + "\n");
}

std::vector<BenchmarkCell> benchmark(const ObservedMatrix& data, const std::vector<std::size_t>& ks,
                                     const std::vector<Method>& methods,
                                     const DecomposeConfig& base) {
  if (ks.empty()) throw ConfigError("benchmark needs at least one k");
  if (methods.empty()) throw ConfigError("benchmark needs at least one method");
  std::vector<BenchmarkCell> cells;
  for (std::size_t k : ks) {
    for (Method m : methods) {
      BenchmarkCell cell;
      cell.k = k;
      cell.method = m;
      DecomposeConfig cfg = base;
      cfg.method = m;
      cfg.hp.k = k;
      cfg.hp.aggressive = false;
      const auto start = std::chrono::steady_clock::now();
      try {
        cell.result = decompose(data, cfg);
        cell.status = "ok";
      } catch (const Error& e) {
        cell.status = std::string(error_class_name(e.kind())) + ": " + e.what();
      }
      cell.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

} // namespace

void write_benchmark(const std::vector<BenchmarkCell>& cells, const fs::path& dir) {
  fs::create_directories(dir);
  std::string table = "k,method,status,mse,mse_observed,mse_posterior_mean,max_abs_w,max_magnitude_excess\n";
  std::string timing = "k,method,wall_seconds\n";
  for (const auto& c : cells) {
    const bool ok = c.status == "ok";
    auto metric = [&](double v) { return ok ? format_double(v) : std::string(); };
    table += std::to_string(c.k) + "," + method_name(c.method) + "," + csv_escape(c.status) + "," +
             metric(c.result.mse) + "," + metric(c.result.mse_observed) + "," +
             metric(c.result.mse_posterior_mean) + "," + metric(c.result.max_abs_w) + "," +
             metric(c.result.max_magnitude_excess) + "\n";
    timing += std::to_string(c.k) + "," + method_name(c.method) + "," + format_double(c.wall_seconds) + "\n";
  }
  write_file(dir / "benchmark.csv", table);
  write_file(dir / "benchmark_timing.csv", timing);
}

RunReport diagnose(const Table& trace, const DiagnoseConfig& cfg) {
  const auto* mse_col = trace.find("mse");
  if (!mse_col || mse_col->empty()) throw InputError("trace has no 'mse' column");
  RunReport report;
  report.mse_final = mse_col->back();
  if (const auto* obs = trace.find("mse_observed")) report.mse_observed_final = obs->back();
  const std::size_t burn = mse_col->size() > cfg.burn_in ? cfg.burn_in : 0;
  report.mse_posterior_mean = posterior_mean_loss(*mse_col, burn, cfg.thinning);
  report.iterations_to_plateau = iterations_to_plateau(*mse_col, cfg.plateau);

  bool any_ok = false;
  bool all_mix = true;
  for (std::size_t i = 0; i < trace.names.size(); ++i) {
    if (trace.names[i].rfind("y_", 0) != 0) continue;
    ProbeDiagnostic probe;
    probe.name = trace.names[i];
    std::span<const double> chain = trace.columns[i];
    // Post-burn-in samples when the chain is long enough to support max_lag.
    if (chain.size() > cfg.burn_in + cfg.max_lag + 1) chain = chain.subspan(cfg.burn_in);
    const std::size_t lag = std::min(cfg.max_lag, chain.empty() ? 0 : chain.size() - 1);
    try {
      probe.autocorr = autocorrelation(chain, lag);
      any_ok = true;
      all_mix = all_mix && chain_mixes(probe.autocorr, cfg.mixing_lag, cfg.mixing_threshold);
    } catch (const Error& e) {
      probe.error = std::string(error_class_name(e.kind())) + ": " + e.what();
    }
    report.probes.push_back(std::move(probe));
  }
  report.mixing_good = any_ok && all_mix;
  return report;
}

void write_report(const RunReport& report, const DiagnoseConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  std::string text;
  auto kv = [&](const std::string& k, const std::string& v) { text += k + " = " + v + "\n"; };
  kv("mse_final", format_double(report.mse_final));
  kv("mse_observed_final", format_double(report.mse_observed_final));
  kv("mse_posterior_mean", format_double(report.mse_posterior_mean));
  kv("iterations_to_plateau", report.iterations_to_plateau
                                  ? std::to_string(*report.iterations_to_plateau)
                                  : std::string("none"));
  kv("mixing", report.mixing_good ? "good" : "poor");
  kv("mixing_rule", "|autocorr| < " + format_double(cfg.mixing_threshold) + " for lags > " +
                        std::to_string(cfg.mixing_lag));
  std::size_t max_len = 0;
  for (const auto& p : report.probes) {
    if (!p.error.empty()) {
      kv("probe." + p.name, "degenerate (" + p.error + ")");
      continue;
    }
    double worst = 0.0;
    for (std::size_t lag = cfg.mixing_lag + 1; lag < p.autocorr.size(); ++lag)
      worst = std::max(worst, std::abs(p.autocorr[lag]));
    kv("probe." + p.name, "ok max_abs_autocorr_beyond_lag=" + format_double(worst));
    max_len = std::max(max_len, p.autocorr.size());
  }
  write_file(dir / "report.txt", text);

  std::string csv = "lag";
  for (const auto& p : report.probes) csv += "," + p.name;
  csv += "\n";
  for (std::size_t lag = 0; lag < max_len; ++lag) {
    csv += std::to_string(lag);
    for (const auto& p : report.probes)
      csv += "," + (lag < p.autocorr.size() ? format_double(p.autocorr[lag]) : std::string());
    csv += "\n";
  }
  write_file(dir / "autocorr.csv", csv);
}

} // namespace bid
