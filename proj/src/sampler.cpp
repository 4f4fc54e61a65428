#include "bid/sampler.hpp"

#include "bid/diagnostics.hpp"
#include "bid/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace bid {

namespace {

constexpr double log_odds_clamp = 700.0;

double clamp_log_odds(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, -log_odds_clamp, log_odds_clamp);
}

bool accept_log_odds(double log_odds, RandomSource& rng) {
  const double p = 1.0 / (1.0 + std::exp(-log_odds));
  return rng.uniform() < p;
}

// Transposed prediction P^T = (X Y)^T, N x M, using only the basis columns of X.
DenseMatrix prediction_transposed(const DenseMatrix& x, const DenseMatrix& y,
                                  const std::vector<std::size_t>& basis) {
  const std::size_t m = x.rows();
  const std::size_t n = y.cols();
  DenseMatrix pt(n, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j : basis) {
      const double xij = x(i, j);
      if (xij == 0.0) continue;
      auto yrow = y.row(j);
      for (std::size_t l = 0; l < n; ++l) pt(l, i) += xij * yrow[l];
    }
  }
  return pt;
}

double rss(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& y,
           const std::vector<std::size_t>& basis) {
  const DenseMatrix pt = prediction_transposed(x, y, basis);
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double d = a(i, l) - pt(l, i);
      s += d * d;
    }
  return s;
}

void require_gbtn(const Hyperparameters& hp, const char* what) {
  if (hp.variant != Variant::gbtn)
    throw ConfigError(std::string(what) + " is only defined for the GBTN variant");
}

// Gibbs sweep over every y_kl with an explicit X; the prediction cache makes
// each update O(M).
void sweep_impl(const DenseMatrix& x, DenseMatrix& y, const StateVector& r, double sigma2,
                DenseMatrix& gtn_mu, DenseMatrix& gtn_tau, const ObservedMatrix& data,
                const Hyperparameters& hp, RandomSource& rng) {
  const std::size_t m = x.rows();
  const std::size_t n = y.rows();
  const DenseMatrix& a = data.values;
  const std::vector<std::size_t> basis = r.basis();
  DenseMatrix pt = prediction_transposed(x, y, basis);
  const DenseMatrix xt = x.transpose();
  const DenseMatrix at = a.transpose();
  const bool gbtn = hp.variant == Variant::gbtn;

  for (std::size_t k = 0; k < n; ++k) {
    auto xk = xt.row(k);
    double sxx = 0.0;
    for (double v : xk) sxx += v * v;
    for (std::size_t l = 0; l < n; ++l) {
      const double tau_kl = gtn_tau(k, l);
      const double mu_kl = gtn_mu(k, l);
      const double y_old = y(k, l);
      GtnParams post{mu_kl, tau_kl, hp.a, hp.b};
      if (sxx > 0.0) {
        auto p = pt.row(l);
        auto al = at.row(l);
        double dot = 0.0;
        for (std::size_t i = 0; i < m; ++i) dot += xk[i] * (al[i] - (p[i] - xk[i] * y_old));
        post.tau = sxx / sigma2 + tau_kl;
        post.mu = (dot / sigma2 + tau_kl * mu_kl) / post.tau;
      }
      const double y_new = sample_gtn(post, rng);
      y(k, l) = y_new;
      if (sxx > 0.0 && y_new != y_old) {
        auto p = pt.row(l);
        const double delta = y_new - y_old;
        for (std::size_t i = 0; i < m; ++i) p[i] += xk[i] * delta;
      }
      if (gbtn) {
        const double t = gtn_tau(k, l) + hp.tau_mu;
        const double mean = (gtn_tau(k, l) * y_new + hp.tau_mu * hp.mu_mu) / t;
        gtn_mu(k, l) = sample_normal(mean, t, rng);
        const double d = y_new - gtn_mu(k, l);
        gtn_tau(k, l) = sample_gamma({hp.alpha_t + 0.5, hp.beta_t + 0.5 * d * d}, rng);
      }
    }
  }
}

std::optional<std::pair<std::size_t, std::size_t>> propose_pair(const StateVector& r,
                                                                 RandomSource& rng) {
  const auto basis = r.basis();
  const auto rest = r.interpolated();
  if (basis.empty() || rest.empty()) return std::nullopt;
  const std::size_t j = basis[static_cast<std::size_t>(rng.index(basis.size()))];
  const std::size_t i = rest[static_cast<std::size_t>(rng.index(rest.size()))];
  return std::make_pair(j, i);
}

void swap_x_columns(IdState& state, const DenseMatrix& a, std::size_t j, std::size_t i) {
  state.x.fill_column(j, 0.0);
  for (std::size_t row = 0; row < a.rows(); ++row) state.x(row, i) = a(row, i);
}

bool swap_step(IdState& state, const ObservedMatrix& data, RandomSource& rng, bool cross_check) {
  const auto pair = propose_pair(state.r, rng);
  if (!pair) return false;
  const auto [j, i] = *pair;
  const double log_odds = state_swap_odds(state, data, j, i);
  if (cross_check) {
    const double full = state_swap_odds_full(state, data, j, i);
    if (std::abs(full - log_odds) > 1e-8 * std::max(1.0, std::abs(full)))
      throw NumericalError("incremental swap log-odds disagrees with full recomputation");
  }
  if (!accept_log_odds(log_odds, rng)) return false;
  state.r.swap_in(j, i);
  swap_x_columns(state, data.values, j, i);
  return true;
}

// Probes sit in rows of the initial basis; rows of interpolated columns are
// plain prior draws.
std::vector<ProbePosition> choose_probes(const StateVector& r, std::size_t count,
                                         RandomSource& rng) {
  const std::vector<std::size_t> rows = r.basis();
  const std::size_t n = r.size();
  const std::size_t total = rows.size() * n;
  count = std::min(count, total);
  std::vector<std::size_t> picked;
  while (picked.size() < count) {
    const auto c = static_cast<std::size_t>(rng.index(total));
    if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
  }
  std::vector<ProbePosition> out;
  for (std::size_t c : picked) out.push_back({rows[c / n], c % n});
  return out;
}

void record(GibbsTrace& trace, const IdState& s, const ObservedMatrix& data) {
  const DenseMatrix approx = multiply(s.x, s.y);
  trace.mse_per_iter.push_back(mse_of(data.values, approx));
  trace.mse_observed_per_iter.push_back(
      data.observed_count() > 0 ? mse_observed_of(data, approx) : 0.0);
  trace.sigma2_chain.push_back(s.sigma2);
  for (std::size_t p = 0; p < trace.probes.size(); ++p)
    trace.y_entry_chains[p].push_back(s.y(trace.probes[p].k, trace.probes[p].l));
}

bool should_stop(const GibbsTrace& trace, const Hyperparameters& hp) {
  if (!hp.early_stop) return false;
  const auto& m = trace.mse_per_iter;
  if (m.size() < hp.early_stop_window + 1) return false;
  for (std::size_t s = m.size() - hp.early_stop_window; s < m.size(); ++s) {
    const double prev = m[s - 1];
    const double change = std::abs(m[s] - prev);
    if (prev != 0.0 ? change / std::abs(prev) >= hp.early_stop_tol : change != 0.0) return false;
  }
  return true;
}

void check_inputs(const ObservedMatrix& data, const Hyperparameters& hp) {
  if (data.values.empty()) throw InputError("data matrix is empty");
  validate(hp, data.cols());
}

} // namespace

GtnParams y_conditional(const IdState& state, const ObservedMatrix& data, std::size_t k,
                        std::size_t l, const Hyperparameters& hp) {
  const DenseMatrix& x = state.x;
  const DenseMatrix& a = data.values;
  const double tau_kl = state.gtn_tau(k, l);
  const double mu_kl = state.gtn_mu(k, l);
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) sxx += x(i, k) * x(i, k);
  if (sxx == 0.0) return {mu_kl, tau_kl, hp.a, hp.b};
  double dot = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double xik = x(i, k);
    if (xik == 0.0) continue;
    double other = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (j != k) other += x(i, j) * state.y(j, l);
    dot += xik * (a(i, l) - other);
  }
  const double tau = sxx / state.sigma2 + tau_kl;
  return {(dot / state.sigma2 + tau_kl * mu_kl) / tau, tau, hp.a, hp.b};
}

double residual_sum_squares(const IdState& state, const DenseMatrix& a) {
  return rss(a, state.x, state.y, state.r.basis());
}

GammaParams sigma2_conditional(const IdState& state, const ObservedMatrix& data,
                               const Hyperparameters& hp) {
  const double mn = static_cast<double>(data.rows() * data.cols());
  return {0.5 * mn + hp.alpha_sigma, 0.5 * residual_sum_squares(state, data.values) + hp.beta_sigma};
}

NormalParams mu_conditional(const IdState& state, std::size_t k, std::size_t l,
                            const Hyperparameters& hp) {
  require_gbtn(hp, "mu_kl update");
  const double tau_kl = state.gtn_tau(k, l);
  const double t = tau_kl + hp.tau_mu;
  return {(tau_kl * state.y(k, l) + hp.tau_mu * hp.mu_mu) / t, t};
}

GammaParams tau_conditional(const IdState& state, std::size_t k, std::size_t l,
                            const Hyperparameters& hp) {
  require_gbtn(hp, "tau_kl update");
  const double d = state.y(k, l) - state.gtn_mu(k, l);
  return {hp.alpha_t + 0.5, hp.beta_t + 0.5 * d * d};
}

double sample_y_entry(IdState& state, const ObservedMatrix& data, std::size_t k, std::size_t l,
                      const Hyperparameters& hp, RandomSource& rng) {
  const double v = sample_gtn(y_conditional(state, data, k, l, hp), rng);
  state.y(k, l) = v;
  return v;
}

double state_swap_odds(const IdState& state, const ObservedMatrix& data, std::size_t j,
                       std::size_t i) {
  if (j >= state.r.size() || i >= state.r.size() || !state.r.is_basis(j) || state.r.is_basis(i))
    throw ConfigError("swap odds require r_j = 1 and r_i = 0");
  const DenseMatrix& a = data.values;
  const DenseMatrix pt = prediction_transposed(state.x, state.y, state.r.basis());
  // R' = R + a_j y_j^T - a_i y_i^T; accumulate ||R'||^2 - ||R||^2 = sum 2 R D + D^2.
  auto yj = state.y.row(j);
  auto yi = state.y.row(i);
  double delta = 0.0;
  for (std::size_t m = 0; m < a.rows(); ++m) {
    const double amj = a(m, j);
    const double ami = a(m, i);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double resid = a(m, l) - pt(l, m);
      const double d = amj * yj[l] - ami * yi[l];
      delta += d * (2.0 * resid + d);
    }
  }
  return clamp_log_odds(-delta / (2.0 * state.sigma2));
}

double state_swap_odds_full(const IdState& state, const ObservedMatrix& data, std::size_t j,
                            std::size_t i) {
  if (!state.r.is_basis(j) || state.r.is_basis(i))
    throw ConfigError("swap odds require r_j = 1 and r_i = 0");
  const DenseMatrix& a = data.values;
  StateVector swapped = state.r;
  swapped.swap_in(j, i);
  const double before = mse_of(a, multiply(build_x(a, state.r), state.y));
  const double after = mse_of(a, multiply(build_x(a, swapped), state.y));
  const double mn = static_cast<double>(a.size());
  return clamp_log_odds(-(after - before) * mn / (2.0 * state.sigma2));
}

bool sample_state_vector(IdState& state, const ObservedMatrix& data, RandomSource& rng) {
  return swap_step(state, data, rng, false);
}

double sample_sigma2(IdState& state, const ObservedMatrix& data, const Hyperparameters& hp,
                     RandomSource& rng) {
  state.sigma2 = sample_inverse_gamma(sigma2_conditional(state, data, hp), rng);
  return state.sigma2;
}

double sample_mu_kl(IdState& state, std::size_t k, std::size_t l, const Hyperparameters& hp,
                    RandomSource& rng) {
  const NormalParams post = mu_conditional(state, k, l, hp);
  state.gtn_mu(k, l) = sample_normal(post.mean, post.precision, rng);
  return state.gtn_mu(k, l);
}

double sample_tau_kl(IdState& state, std::size_t k, std::size_t l, const Hyperparameters& hp,
                     RandomSource& rng) {
  state.gtn_tau(k, l) = sample_gamma(tau_conditional(state, k, l, hp), rng);
  return state.gtn_tau(k, l);
}

void sweep_y(IdState& state, const ObservedMatrix& data, const Hyperparameters& hp,
             RandomSource& rng) {
  sweep_impl(state.x, state.y, state.r, state.sigma2, state.gtn_mu, state.gtn_tau, data, hp, rng);
}

GibbsRun run_gibbs(const ObservedMatrix& data, const Hyperparameters& hp, RandomSource& rng) {
  check_inputs(data, hp);
  GibbsRun run;
  IdState& s = run.state;
  s = init_state(data, hp, rng);
  GibbsTrace& trace = run.trace;
  trace.probes = choose_probes(s.r, hp.probe_count, rng);
  trace.y_entry_chains.assign(trace.probes.size(), {});
  const bool can_swap = s.r.count() < s.r.size();

  for (std::size_t t = 0; t < hp.iterations; ++t) {
    if (can_swap) {
      ++trace.proposed_swaps;
      if (swap_step(s, data, rng, hp.check_invariants)) ++trace.accepted_swaps;
    }
    sample_sigma2(s, data, hp, rng);
    sweep_y(s, data, hp, rng);
    record(trace, s, data);
    if (hp.check_invariants) validate_state(s, data, hp);
    if (should_stop(trace, hp)) break;
  }
  return run;
}

GibbsRun run_gibbs_aggressive(const ObservedMatrix& data, const Hyperparameters& hp,
                              RandomSource& rng) {
  check_inputs(data, hp);
  if (hp.variant != Variant::gbt)
    throw ConfigError("the aggressive sampler is only defined for GBT");

  struct Proposal {
    StateVector r;
    DenseMatrix x;
    DenseMatrix y;
  };
  const DenseMatrix& a = data.values;
  auto make_proposal = [&](const IdState& from) -> std::optional<Proposal> {
    const auto pair = propose_pair(from.r, rng);
    if (!pair) return std::nullopt;
    Proposal p{from.r, {}, from.y};
    p.r.swap_in(pair->first, pair->second);
    p.x = build_x(a, p.r);
    return p;
  };

  GibbsRun run;
  IdState& s = run.state;
  s = init_state(data, hp, rng);
  GibbsTrace& trace = run.trace;
  trace.probes = choose_probes(s.r, hp.probe_count, rng);
  trace.y_entry_chains.assign(trace.probes.size(), {});
  std::optional<Proposal> proposal = make_proposal(s);

  for (std::size_t t = 0; t < hp.iterations; ++t) {
    // Choose between the current configuration (r1, Y1) and the proposal (r2, Y2).
    if (proposal) {
      ++trace.proposed_swaps;
      const double rss_current = rss(a, s.x, s.y, s.r.basis());
      const double rss_proposal = rss(a, proposal->x, proposal->y, proposal->r.basis());
      const double log_odds = clamp_log_odds((rss_current - rss_proposal) / (2.0 * s.sigma2));
      if (accept_log_odds(log_odds, rng)) {
        s.r = std::move(proposal->r);
        s.y = std::move(proposal->y);
        ++trace.accepted_swaps;
      }
    }
    rebuild_x(s, a);
    proposal = make_proposal(s);
    sample_sigma2(s, data, hp, rng);
    sweep_y(s, data, hp, rng);
    if (proposal) {
      proposal->y = s.y;
      sweep_impl(proposal->x, proposal->y, proposal->r, s.sigma2, s.gtn_mu, s.gtn_tau, data, hp,
                 rng);
    }
    record(trace, s, data);
    if (hp.check_invariants) {
      validate_state(s, data, hp);
      if (proposal) {
        std::size_t diff = 0;
        for (std::size_t n = 0; n < s.r.size(); ++n) diff += s.r.is_basis(n) != proposal->r.is_basis(n);
        if (diff != 2) throw NumericalError("state invariant: proposal is not a single swap");
      }
    }
    if (should_stop(trace, hp)) break;
  }
  return run;
}

GibbsRun run_sampler(const ObservedMatrix& data, const Hyperparameters& hp, RandomSource& rng) {
  return hp.aggressive ? run_gibbs_aggressive(data, hp, rng) : run_gibbs(data, hp, rng);
}

} // namespace bid
