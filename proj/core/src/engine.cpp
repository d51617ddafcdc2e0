#include "d4l/engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "d4l/rng.hpp"

namespace d4l {

void InvariantReport::merge(const InvariantReport& other) {
  phi_mass = std::max(phi_mass, other.phi_mass);
  tracking_mass = std::max(tracking_mass, other.tracking_mass);
  row_stochastic = std::max(row_stochastic, other.row_stochastic);
  weighted_average = std::max(weighted_average, other.weighted_average);
  feasibility = std::max(feasibility, other.feasibility);
  phi_min = std::min(phi_min, other.phi_min);
}

void RunConfig::validate() const {
  if (max_iters < 0) throw std::invalid_argument("run config: max_iters >= 0");
  if (delta_stride < 1) throw std::invalid_argument("run config: delta_stride >= 1");
  if (!(tau_D > 0)) throw std::invalid_argument("run config: tau_D > 0");
  inner.validate();
  merit.validate();
}

std::vector<Mat> NetworkState::dictionaries() const {
  std::vector<Mat> d;
  d.reserve(agents.size());
  for (const auto& a : agents) d.push_back(a.D);
  return d;
}

std::vector<Mat> NetworkState::codes() const {
  std::vector<Mat> x;
  x.reserve(agents.size());
  for (const auto& a : agents) x.push_back(a.X);
  return x;
}

std::vector<Mat> NetworkState::thetas() const {
  std::vector<Mat> t;
  t.reserve(agents.size());
  for (const auto& a : agents) t.push_back(a.Theta);
  return t;
}

std::vector<Mat> initial_dictionaries(const ProblemInstance& p, std::uint64_t seed,
                                      bool* used_fallback) {
  const int m = p.rows();
  const int k = p.num_atoms;
  Rng rng(seed);
  std::vector<Mat> dicts;
  dicts.reserve(p.shards.size());
  bool fallback = false;
  for (const auto& shard : p.shards) {
    Mat d(m, k);
    const int n = static_cast<int>(shard.cols());
    if (n >= k) {
      // K distinct columns by partial Fisher-Yates
      std::vector<int> idx(n);
      for (int c = 0; c < n; ++c) idx[c] = c;
      for (int c = 0; c < k; ++c) {
        const int pick = c + rng.uniform_int(n - c);
        std::swap(idx[c], idx[pick]);
        d.col(c) = shard.col(idx[c]);
      }
    } else {
      fallback = true;
      for (int c = 0; c < k; ++c)
        for (int r = 0; r < m; ++r) d(r, c) = rng.gaussian();
    }
    dicts.push_back(project_dictionary(p, d));
  }
  if (used_fallback) *used_fallback = fallback;
  return dicts;
}

NetworkState init_network(const ProblemInstance& p, const RunConfig& cfg) {
  p.validate();
  cfg.validate();
  NetworkState s;
  s.rng_seed = cfg.seed;
  s.gamma = cfg.gamma;
  bool fallback = false;
  std::vector<Mat> dicts = initial_dictionaries(p, cfg.seed, &fallback);
  s.init_fallback = fallback;
  s.agents.resize(p.shards.size());
  for (int i = 0; i < p.num_agents(); ++i) {
    AgentState& a = s.agents[i];
    a.D = std::move(dicts[i]);
    a.X = Mat::Zero(p.num_atoms, p.shards[i].cols());
    a.phi = 1.0;
    a.cached_grad = grad_D_fi(p, a.D, a.X, i);
    a.Theta = a.cached_grad;
  }
  return s;
}

namespace {

void abort_nonfinite(const Mat& m, int agent, const char* phase) {
  if (!m.allFinite())
    throw std::runtime_error("d4l_step: nonfinite value at agent " +
                             std::to_string(agent) + ", phase " + phase);
}

// Runs fn(i) over [0, count) either inline or on worker threads. Each index
// touches only its own outputs, so scheduling cannot change results.
void parallel_for(int count, bool parallel, int threads,
                  const std::function<void(int)>& fn) {
  if (!parallel || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(1, std::min(n, count));
  std::vector<std::thread> pool;
  pool.reserve(n);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n);
  for (int t = 0; t < n; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double feasibility_excess(const ProblemInstance& p, const Mat& d) {
  const double alpha = p.params.alpha;
  double excess = 0.0;
  switch (p.dict_constraint()) {
    case DictConstraint::ColumnBall:
      for (Eigen::Index k = 0; k < d.cols(); ++k)
        excess = std::max(excess, d.col(k).norm() - alpha);
      break;
    case DictConstraint::NonnegRowBall:
      excess = std::max(excess, -d.minCoeff());
      [[fallthrough]];
    case DictConstraint::RowBall:
      for (Eigen::Index r = 0; r < d.rows(); ++r)
        excess = std::max(excess, d.row(r).norm() - alpha);
      break;
  }
  return std::max(0.0, excess);
}

}  // namespace

StepStats d4l_step(NetworkState& s, const ProblemInstance& p, const Digraph& g,
                   const RunConfig& cfg) {
  const int agents = p.num_agents();
  if (g.num_nodes() != agents)
    throw std::invalid_argument("d4l_step: graph size does not match agent count");
  const double gamma = s.gamma.current();
  const double scale_i = static_cast<double>(agents);

  const WeightMatrix w = cfg.weights == WeightRule::PushSum
                             ? push_sum_weights(g)
                             : metropolis_hastings_weights(g);
  const bool doubly = w.kind == WeightKind::DoublyStochastic;

  // S2: local optimization (per agent, independent)
  std::vector<Mat> u(agents), x_next(agents);
  std::vector<StepStats> stats(agents);
  std::vector<char> hit_max(agents, 0);
  parallel_for(agents, cfg.parallel, cfg.threads, [&](int i) {
    const AgentState& a = s.agents[i];
    SubproblemReport rep_d;
    const Mat d_tilde = solve_D_subproblem(p, i, a.D, a.X, a.Theta, agents,
                                           cfg.tau_D, cfg.surrogate, cfg.inner, &rep_d);
    abort_nonfinite(d_tilde, i, "S2a (dictionary best response)");
    u[i] = a.D + gamma * (d_tilde - a.D);
    const double tau_x =
        tau_X_value(p, u[i], cfg.tau_x_rule, cfg.tau_x_eps, cfg.tau_x_mu_tilde);
    SubproblemReport rep_x;
    x_next[i] = solve_X_subproblem(p, i, u[i], a.X, tau_x, cfg.surrogate,
                                   cfg.inner, &rep_x);
    abort_nonfinite(x_next[i], i, "S2b (code update)");
    stats[i].inner_iters_D = rep_d.inner_iters;
    stats[i].inner_iters_X = rep_x.inner_iters;
    hit_max[i] = rep_d.hit_max || rep_x.hit_max;
  });

  // S3a: push-sum mixing of (phi, phi U); in-neighbor sums run in ascending
  // index order so sequential and parallel traces coincide bitwise
  std::vector<double> phi_next(agents);
  std::vector<Mat> d_next(agents);
  parallel_for(agents, cfg.parallel, cfg.threads, [&](int i) {
    if (doubly) {
      phi_next[i] = s.agents[i].phi;
      Mat acc = Mat::Zero(p.rows(), p.num_atoms);
      for (int j : g.in_neighbors(i)) acc += w.entries(i, j) * u[j];
      d_next[i] = acc;
    } else {
      double phi_acc = 0.0;
      Mat acc = Mat::Zero(p.rows(), p.num_atoms);
      for (int j : g.in_neighbors(i)) {
        const double c = w.entries(i, j) * s.agents[j].phi;
        phi_acc += c;
        acc += c * u[j];
      }
      if (!(phi_acc > 0.0))
        throw std::runtime_error("d4l_step: phi reached a nonpositive value at agent " +
                                 std::to_string(i));
      phi_next[i] = phi_acc;
      d_next[i] = acc / phi_acc;
    }
    abort_nonfinite(d_next[i], i, "S3a (dictionary mixing)");
  });

  // S3b: perturbed mixing of Theta; the gradient cache is refreshed exactly
  // once here, keeping the tracking telescoping identity exact
  std::vector<Mat> theta_next(agents), grad_next(agents);
  parallel_for(agents, cfg.parallel, cfg.threads, [&](int i) {
    Mat acc = Mat::Zero(p.rows(), p.num_atoms);
    for (int j : g.in_neighbors(i))
      acc += (w.entries(i, j) * s.agents[j].phi) * s.agents[j].Theta;
    grad_next[i] = grad_D_fi(p, d_next[i], x_next[i], i);
    theta_next[i] =
        acc / phi_next[i] + (grad_next[i] - s.agents[i].cached_grad) / phi_next[i];
    abort_nonfinite(theta_next[i], i, "S3b (tracking update)");
  });

  // invariant monitor, before committing
  if (cfg.check_invariants) {
    InvariantReport rep;
    double phi_sum = 0.0;
    for (int i = 0; i < agents; ++i) phi_sum += phi_next[i];
    rep.phi_mass = std::abs(phi_sum - scale_i);
    for (int i = 0; i < agents; ++i) rep.phi_min = std::min(rep.phi_min, phi_next[i]);

    for (int i = 0; i < agents; ++i) {
      double row = 0.0;
      for (int j : g.in_neighbors(i))
        row += doubly ? w.entries(i, j)
                      : w.entries(i, j) * s.agents[j].phi / phi_next[i];
      rep.row_stochastic = std::max(rep.row_stochastic, std::abs(row - 1.0));
    }

    Mat dbar_phi = Mat::Zero(p.rows(), p.num_atoms);
    Mat ubar_phi = Mat::Zero(p.rows(), p.num_atoms);
    for (int i = 0; i < agents; ++i) {
      dbar_phi += phi_next[i] * d_next[i];
      ubar_phi += s.agents[i].phi * u[i];
    }
    rep.weighted_average =
        ((dbar_phi - ubar_phi) / scale_i).cwiseAbs().maxCoeff();

    Mat mass = Mat::Zero(p.rows(), p.num_atoms);
    Mat grad_sum = Mat::Zero(p.rows(), p.num_atoms);
    for (int i = 0; i < agents; ++i) {
      mass += phi_next[i] * theta_next[i];
      grad_sum += grad_next[i];
    }
    rep.tracking_mass =
        (mass - grad_sum).norm() / std::max(1.0, grad_sum.norm());

    for (int i = 0; i < agents; ++i)
      rep.feasibility = std::max(rep.feasibility, feasibility_excess(p, d_next[i]));

    s.invariants.merge(rep);
  }

  // commit
  for (int i = 0; i < agents; ++i) {
    AgentState& a = s.agents[i];
    a.D = std::move(d_next[i]);
    a.X = std::move(x_next[i]);
    a.Theta = std::move(theta_next[i]);
    a.phi = phi_next[i];
    a.cached_grad = std::move(grad_next[i]);
  }
  StepStats total;
  for (int i = 0; i < agents; ++i) {
    total.inner_iters_D += stats[i].inner_iters_D;
    total.inner_iters_X += stats[i].inner_iters_X;
    if (hit_max[i]) ++s.inner_warnings;
  }
  s.msg_count += 2;  // one exchange for U, one for Theta
  s.gamma.advance();
  ++s.iter;
  return total;
}

RunResult run(const ProblemInstance& p, const GraphSequence& seq,
              const RunConfig& cfg, const TraceSink& sink) {
  seq.validate();
  if (seq.num_nodes() != p.num_agents())
    throw std::invalid_argument("run: graph and problem disagree on agent count");
  const int window = seq.window_B.value_or(static_cast<int>(seq.slots.size()));
  if (!check_b_strong_connectivity(seq, window))
    std::cerr << "warning: graph sequence is not B-strongly connected (B=" << window
              << "); consensus is not guaranteed\n";

  RunResult res;
  res.state = init_network(p, cfg);
  NetworkState& s = res.state;

  const auto emit = [&](const StepStats& stats, double wall_ms) {
    TraceRow row;
    row.iter = s.iter;
    row.msg_exchanges = s.msg_count;
    row.gamma = s.gamma.current();
    const std::vector<Mat> dicts = s.dictionaries();
    const std::vector<Mat> codes = s.codes();
    const Mat dbar = mean_dictionary(dicts);
    row.objective = objective(p, dbar, codes);
    row.consensus_err = consensus_error(dicts);
    if (s.iter % cfg.delta_stride == 0) {
      row.delta_D = stationarity_D(p, dbar, codes, cfg.merit);
      row.delta_X = stationarity_X(p, dbar, codes, cfg.merit);
      row.delta_max_val = delta_max(*row.delta_D, *row.delta_X);
    }
    row.tracking_residual = tracking_residual(p, dicts, codes, s.thetas());
    row.inner_iters_D = stats.inner_iters_D;
    row.inner_iters_X = stats.inner_iters_X;
    row.wall_ms = wall_ms;
    if (sink) sink(row);
    res.last_row = row;
    ++res.rows_emitted;
    return row;
  };

  emit(StepStats{}, 0.0);
  while (s.iter < cfg.max_iters &&
         (cfg.msg_budget < 0 || s.msg_count < cfg.msg_budget)) {
    const auto t0 = std::chrono::steady_clock::now();
    const StepStats stats = d4l_step(s, p, seq.slot(s.iter), cfg);
    const double wall_ms =
        cfg.measure_time
            ? std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0).count()
            : 0.0;
    const TraceRow row = emit(stats, wall_ms);
    const bool e_ok = cfg.tol_e < 0 || row.consensus_err <= cfg.tol_e;
    const bool d_ok =
        cfg.tol_delta < 0 || (row.delta_max_val && *row.delta_max_val <= cfg.tol_delta);
    if ((cfg.tol_e >= 0 || cfg.tol_delta >= 0) && e_ok && d_ok) {
      res.stopped_by_tolerance = true;
      break;
    }
  }
  return res;
}

}  // namespace d4l
