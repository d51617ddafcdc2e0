#include "d4l/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace d4l {

void ProxPdaConfig::validate() const {
  if (!(beta_coeff > 0)) throw std::invalid_argument("prox-pda: beta_coeff > 0");
  if (max_iters < 0) throw std::invalid_argument("prox-pda: max_iters >= 0");
  if (delta_stride < 1) throw std::invalid_argument("prox-pda: delta_stride >= 1");
  inner.validate();
  merit.validate();
}

ProxPdaState prox_pda_init(const ProblemInstance& p, const Digraph& g,
                           std::uint64_t seed) {
  p.validate();
  if (!g.symmetric())
    throw std::invalid_argument("prox_pda_init: undirected (symmetric) graph required");
  if (p.family != Family::ElasticNetDL)
    throw std::invalid_argument("prox_pda_init: elastic-net family required");
  if (g.num_nodes() != p.num_agents())
    throw std::invalid_argument("prox_pda_init: graph size does not match agent count");

  ProxPdaState s;
  s.D = initial_dictionaries(p, seed);
  s.X.reserve(p.shards.size());
  for (const auto& shard : p.shards)
    s.X.push_back(Mat::Zero(p.num_atoms, shard.cols()));
  for (auto [j, i] : g.edges())
    if (j < i) s.edges.emplace_back(j, i);
  s.Omega.assign(s.edges.size(), Mat::Zero(p.rows(), p.num_atoms));
  return s;
}

void prox_pda_ip_step(ProxPdaState& s, const Digraph& g, const ProblemInstance& p,
                      const ProxPdaConfig& cfg) {
  const int agents = p.num_agents();
  const double beta_next = cfg.beta_coeff * static_cast<double>(s.iter + 1);

  // S2: theta_i, code update, dictionary update
  std::vector<double> theta(agents);
  for (int i = 0; i < agents; ++i)
    theta[i] = (s.D[i] * s.X[i] - p.shards[i]).squaredNorm();

  std::vector<Mat> x_next(agents);
  for (int i = 0; i < agents; ++i) {
    const Mat& d = s.D[i];
    const Mat& shard = p.shards[i];
    const Mat x_prev = s.X[i];
    CompositeSubproblem sub;
    sub.smooth_grad = [&, i](const Mat& x) -> Mat {
      return d.transpose() * (d * x - shard) + (beta_next * theta[i]) * (x - x_prev) +
             beta_next * (d.transpose() * (d * (x - x_prev)));
    };
    const double sd = spectral_norm(d);
    sub.curvature = std::max((1.0 + beta_next) * sd * sd + beta_next * theta[i], 1e-8);
    sub.prox = [&](const Mat& v, double st) {
      return prox_elastic_net(v, st * p.params.lambda, st * p.params.mu, false);
    };
    InnerResult r = inner_solve(sub, x_prev, cfg.inner, InnerStopRule::StepLength);
    if (!r.converged) ++s.inner_warnings;
    x_next[i] = std::move(r.z);
  }

  std::vector<Mat> d_next(agents);
  for (int i = 0; i < agents; ++i) {
    // linear coefficient: incidence-weighted duals minus the neighborhood pull
    Mat lin = Mat::Zero(p.rows(), p.num_atoms);
    for (std::size_t e = 0; e < s.edges.size(); ++e) {
      if (s.edges[e].first == i) lin += s.Omega[e];
      else if (s.edges[e].second == i) lin -= s.Omega[e];
    }
    const double deg = static_cast<double>(g.out_degree(i));  // |N_i|, self included
    Mat pull = (deg - 1.0) * s.D[i];
    for (int j : g.in_neighbors(i)) pull += s.D[j];
    const Mat x = x_next[i];
    const Mat& shard = p.shards[i];
    CompositeSubproblem sub;
    sub.smooth_grad = [&, i](const Mat& d) -> Mat {
      return (d * x - shard) * x.transpose() + lin + 2.0 * beta_next * deg * d -
             beta_next * pull;
    };
    const double sx = spectral_norm(x);
    sub.curvature = std::max(sx * sx + 2.0 * beta_next * deg, 1e-8);
    sub.prox = [&](const Mat& v, double) { return project_dictionary(p, v); };
    InnerResult r = inner_solve(sub, s.D[i], cfg.inner, InnerStopRule::StepLength);
    if (!r.converged) ++s.inner_warnings;
    d_next[i] = std::move(r.z);
  }

  // dual ascent per edge
  for (std::size_t e = 0; e < s.edges.size(); ++e)
    s.Omega[e] += beta_next * (d_next[s.edges[e].first] - d_next[s.edges[e].second]);

  s.X = std::move(x_next);
  s.D = std::move(d_next);
  s.beta = beta_next;
  s.msg_count += 2;
  ++s.iter;
}

namespace {

TraceRow baseline_row(const ProblemInstance& p, const std::vector<Mat>& dicts,
                      const std::vector<Mat>& codes, std::int64_t iter,
                      std::int64_t msg, double gamma, const MeritConfig& merit,
                      int delta_stride, double wall_ms) {
  TraceRow row;
  row.iter = iter;
  row.msg_exchanges = msg;
  row.gamma = gamma;
  const Mat dbar = mean_dictionary(dicts);
  row.objective = objective(p, dbar, codes);
  row.consensus_err = consensus_error(dicts);
  if (iter % delta_stride == 0) {
    row.delta_D = stationarity_D(p, dbar, codes, merit);
    row.delta_X = stationarity_X(p, dbar, codes, merit);
    row.delta_max_val = delta_max(*row.delta_D, *row.delta_X);
  }
  row.wall_ms = wall_ms;
  return row;
}

}  // namespace

BaselineRunResult run_prox_pda(const ProblemInstance& p, const Digraph& g,
                               const ProxPdaConfig& cfg, const TraceSink& sink) {
  cfg.validate();
  ProxPdaState s = prox_pda_init(p, g, cfg.seed);
  BaselineRunResult res;
  auto emit = [&](double wall_ms) {
    const TraceRow row = baseline_row(p, s.D, s.X, s.iter, s.msg_count, 0.0,
                                      cfg.merit, cfg.delta_stride, wall_ms);
    if (sink) sink(row);
    res.last_row = row;
    ++res.rows_emitted;
  };
  emit(0.0);
  while (s.iter < cfg.max_iters &&
         (cfg.msg_budget < 0 || s.msg_count < cfg.msg_budget)) {
    const auto t0 = std::chrono::steady_clock::now();
    prox_pda_ip_step(s, g, p, cfg);
    const double wall_ms =
        cfg.measure_time
            ? std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0).count()
            : 0.0;
    emit(wall_ms);
  }
  res.dicts = std::move(s.D);
  res.codes = std::move(s.X);
  res.inner_warnings = s.inner_warnings;
  return res;
}

AtcState atc_init(const ProblemInstance& p, const RunConfig& cfg) {
  p.validate();
  cfg.validate();
  AtcState s;
  s.D = initial_dictionaries(p, cfg.seed);
  s.X.reserve(p.shards.size());
  for (const auto& shard : p.shards)
    s.X.push_back(Mat::Zero(p.num_atoms, shard.cols()));
  s.phi.assign(p.shards.size(), 1.0);
  s.gamma = cfg.gamma;
  return s;
}

StepStats atc_step(AtcState& s, const Digraph& g, const ProblemInstance& p,
                   const RunConfig& cfg) {
  const int agents = p.num_agents();
  if (g.num_nodes() != agents)
    throw std::invalid_argument("atc_step: graph size does not match agent count");
  const double gamma = s.gamma.current();
  const WeightMatrix w = cfg.weights == WeightRule::PushSum
                             ? push_sum_weights(g)
                             : metropolis_hastings_weights(g);
  const bool doubly = w.kind == WeightKind::DoublyStochastic;

  // adapt: one projected-gradient dictionary step on the local gradient only
  StepStats stats;
  std::vector<Mat> u(agents), x_next(agents);
  for (int i = 0; i < agents; ++i) {
    const Mat grad = grad_D_fi(p, s.D[i], s.X[i], i);
    const Mat d_tilde =
        prox_dictionary_composite(p, s.D[i] - grad / cfg.tau_D, 1.0 / cfg.tau_D);
    u[i] = s.D[i] + gamma * (d_tilde - s.D[i]);
    const double tau_x =
        tau_X_value(p, u[i], cfg.tau_x_rule, cfg.tau_x_eps, cfg.tau_x_mu_tilde);
    SubproblemReport rep;
    x_next[i] = solve_X_subproblem(p, i, u[i], s.X[i], tau_x, cfg.surrogate,
                                   cfg.inner, &rep);
    stats.inner_iters_X += rep.inner_iters;
    if (rep.hit_max) ++s.inner_warnings;
  }

  // combine: push-sum mixing of (phi, phi U)
  std::vector<double> phi_next(agents);
  std::vector<Mat> d_next(agents);
  for (int i = 0; i < agents; ++i) {
    if (doubly) {
      phi_next[i] = s.phi[i];
      Mat acc = Mat::Zero(p.rows(), p.num_atoms);
      for (int j : g.in_neighbors(i)) acc += w.entries(i, j) * u[j];
      d_next[i] = acc;
    } else {
      double phi_acc = 0.0;
      Mat acc = Mat::Zero(p.rows(), p.num_atoms);
      for (int j : g.in_neighbors(i)) {
        const double c = w.entries(i, j) * s.phi[j];
        phi_acc += c;
        acc += c * u[j];
      }
      if (!(phi_acc > 0.0))
        throw std::runtime_error("atc_step: phi reached a nonpositive value");
      phi_next[i] = phi_acc;
      d_next[i] = acc / phi_acc;
    }
  }
  s.D = std::move(d_next);
  s.X = std::move(x_next);
  s.phi = std::move(phi_next);
  s.msg_count += 1;  // single exchange: no tracking variable to transmit
  s.gamma.advance();
  ++s.iter;
  return stats;
}

BaselineRunResult run_atc(const ProblemInstance& p, const GraphSequence& seq,
                          const RunConfig& cfg, const TraceSink& sink) {
  seq.validate();
  AtcState s = atc_init(p, cfg);
  BaselineRunResult res;
  auto emit = [&](const StepStats& stats, double wall_ms) {
    TraceRow row = baseline_row(p, s.D, s.X, s.iter, s.msg_count,
                                s.gamma.current(), cfg.merit, cfg.delta_stride,
                                wall_ms);
    row.inner_iters_X = stats.inner_iters_X;
    if (sink) sink(row);
    res.last_row = row;
    ++res.rows_emitted;
  };
  emit(StepStats{}, 0.0);
  while (s.iter < cfg.max_iters &&
         (cfg.msg_budget < 0 || s.msg_count < cfg.msg_budget)) {
    const auto t0 = std::chrono::steady_clock::now();
    const StepStats stats = atc_step(s, seq.slot(s.iter), p, cfg);
    const double wall_ms =
        cfg.measure_time
            ? std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0).count()
            : 0.0;
    emit(stats, wall_ms);
  }
  res.dicts = std::move(s.D);
  res.codes = std::move(s.X);
  res.inner_warnings = s.inner_warnings;
  return res;
}

}  // namespace d4l
