#pragma once

#include <cstdint>
#include <vector>

#include "d4l/graph.hpp"
#include "d4l/metrics.hpp"
#include "d4l/problems.hpp"
#include "d4l/subsolvers.hpp"
#include "d4l/trace.hpp"

namespace d4l {

// One agent: local dictionary copy, private codes, gradient-tracking
// variable, push-sum scalar, and the cached local gradient at the current
// (D, X). The cache is refreshed exactly once per iteration so the
// telescoping identity behind tracking-mass conservation holds exactly.
struct AgentState {
  Mat D;
  Mat X;
  Mat Theta;
  double phi = 1.0;
  Mat cached_grad;
};

// Worst observed violation of each exact run invariant, updated every
// iteration while invariant checking is on.
struct InvariantReport {
  double phi_mass = 0.0;         // |sum phi - I|
  double tracking_mass = 0.0;    // relative tracking identity error
  double row_stochastic = 0.0;   // max |row sum of W - 1|
  double weighted_average = 0.0; // max entry |Dbar_{phi+} - Ubar_{phi}|
  double feasibility = 0.0;      // max dictionary constraint excess
  double phi_min = 1.0;          // smallest phi seen

  void merge(const InvariantReport& other);
};

struct RunConfig {
  SurrogateChoice surrogate;
  WeightRule weights = WeightRule::PushSum;
  double tau_D = 10.0;
  TauXRule tau_x_rule = TauXRule::AdaptiveMax;
  double tau_x_eps = 1.0;
  double tau_x_mu_tilde = 0.0;
  GammaSchedule gamma = GammaSchedule::recursive(0.5, 1e-2);
  std::int64_t max_iters = 1000;
  std::int64_t msg_budget = -1;  // < 0: no message-exchange cap
  double tol_delta = -1.0;       // < 0: disabled
  double tol_e = -1.0;           // < 0: disabled
  int delta_stride = 1;
  std::uint64_t seed = 0;
  bool parallel = false;
  int threads = 0;  // 0: hardware concurrency
  bool check_invariants = true;
  bool measure_time = true;
  InnerSolverConfig inner;
  MeritConfig merit;

  void validate() const;
};

struct NetworkState {
  std::vector<AgentState> agents;
  std::int64_t iter = 0;
  GammaSchedule gamma;
  std::int64_t msg_count = 0;
  std::uint64_t rng_seed = 0;
  InvariantReport invariants;
  std::int64_t inner_warnings = 0;  // inner-solver iteration-cap hits
  bool init_fallback = false;       // gaussian init used because K > n_i

  std::vector<Mat> dictionaries() const;
  std::vector<Mat> codes() const;
  std::vector<Mat> thetas() const;
};

// Shared initial dictionaries: K uniformly chosen distinct data columns per
// agent projected onto the set (gaussian fallback when the shard is too
// narrow). Used by the engine and by all baselines so a common seed gives a
// common starting point.
std::vector<Mat> initial_dictionaries(const ProblemInstance& p, std::uint64_t seed,
                                      bool* used_fallback = nullptr);

// phi = 1, X = 0, Theta = local gradient at the start point.
NetworkState init_network(const ProblemInstance& p, const RunConfig& cfg);

struct StepStats {
  std::int64_t inner_iters_D = 0;
  std::int64_t inner_iters_X = 0;
};

// One full iteration over the given slot graph, in order:
//  S2a  per agent: dictionary best response and step
//           U_(i) = D_(i) + gamma (Dtilde_(i) - D_(i))
//  S2b  per agent: code update at U_(i)
//  S3a  push-sum mixing of (phi, phi U) with column-stochastic weights;
//           doubly stochastic weights skip phi and mix U directly
//  S3b  perturbed mixing of Theta with the local gradient increment.
// Two message exchanges are counted and gamma advances once. Nonfinite
// values abort with a diagnostic naming the agent and phase.
StepStats d4l_step(NetworkState& s, const ProblemInstance& p, const Digraph& g,
                   const RunConfig& cfg);

struct RunResult {
  NetworkState state;
  TraceRow last_row;
  std::int64_t rows_emitted = 0;
  bool stopped_by_tolerance = false;
};

// Runs until the iteration horizon, the message budget, or the (Delta, e)
// tolerances are met, emitting one trace row at initialization and one per
// iteration. Deterministic for a given seed; parallel mode reduces in fixed
// order and yields traces identical to sequential runs.
RunResult run(const ProblemInstance& p, const GraphSequence& seq,
              const RunConfig& cfg, const TraceSink& sink);

}  // namespace d4l
