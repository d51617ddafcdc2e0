#pragma once

#include "d4l/engine.hpp"

namespace d4l {

// Primal-dual baseline for undirected static graphs with an increasing
// penalty beta^v = 0.002 v. One per-edge dual matrix; incidence orientation
// is +1 at the smaller node index, -1 at the larger.
struct ProxPdaState {
  std::vector<Mat> D;
  std::vector<Mat> X;
  std::vector<Mat> Omega;                   // one per edge
  std::vector<std::pair<int, int>> edges;   // (a, b) with a < b
  std::int64_t iter = 0;
  double beta = 0.0;
  std::int64_t msg_count = 0;
  std::int64_t inner_warnings = 0;
};

struct ProxPdaConfig {
  double beta_coeff = 0.002;
  InnerSolverConfig inner;
  std::uint64_t seed = 0;
  std::int64_t max_iters = 1000;
  std::int64_t msg_budget = -1;
  int delta_stride = 1;
  MeritConfig merit;
  bool measure_time = true;

  void validate() const;
};

// Requires a symmetric graph and the elastic-net family.
ProxPdaState prox_pda_init(const ProblemInstance& p, const Digraph& g,
                           std::uint64_t seed);

// One iteration of the penalized primal-dual scheme: code update, dictionary
// update (both by the warm-started inner solver, stopped on the Frobenius
// length between consecutive iterates), then dual ascent per edge. Counts
// two message exchanges.
void prox_pda_ip_step(ProxPdaState& s, const Digraph& g, const ProblemInstance& p,
                      const ProxPdaConfig& cfg);

struct BaselineRunResult {
  TraceRow last_row;
  std::int64_t rows_emitted = 0;
  std::vector<Mat> dicts;
  std::vector<Mat> codes;
  std::int64_t inner_warnings = 0;
};

BaselineRunResult run_prox_pda(const ProblemInstance& p, const Digraph& g,
                               const ProxPdaConfig& cfg, const TraceSink& sink);

// Adapt-Then-Combine with the push-sum consensus protocol but no gradient
// tracking: each agent takes one projected-gradient dictionary step using
// only its own gradient, updates its codes at the interim dictionary, then
// mixes (phi, phi U). One message exchange per iteration.
struct AtcState {
  std::vector<Mat> D;
  std::vector<Mat> X;
  std::vector<double> phi;
  std::int64_t iter = 0;
  GammaSchedule gamma;
  std::int64_t msg_count = 0;
  std::int64_t inner_warnings = 0;
};

AtcState atc_init(const ProblemInstance& p, const RunConfig& cfg);

StepStats atc_step(AtcState& s, const Digraph& g, const ProblemInstance& p,
                   const RunConfig& cfg);

BaselineRunResult run_atc(const ProblemInstance& p, const GraphSequence& seq,
                          const RunConfig& cfg, const TraceSink& sink);

}  // namespace d4l
