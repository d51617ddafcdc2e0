#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "d4l/baselines.hpp"
#include "d4l/engine.hpp"

namespace d4l {

// Flat experiment description. Loadable from a flat JSON object; every field
// has a CLI flag override in the d4l tool.
struct ExperimentConfig {
  std::string algorithm = "d4l";  // d4l | atc | prox-pda-ip
  std::string label;              // column prefix in compare output

  // problem
  std::string family = "elastic-net";
  std::string data = "synth";  // synth | matrix:<path> | pgm:<path>
  int agents = 10;
  int atoms = 4;  // K
  double lambda = 0.35355339059327373;  // 1/sqrt(8), the desk default
  double mu = 0.35355339059327373;
  double lambda_d = 0.1;
  double mu_d = 0.1;
  double alpha = 1.0;

  // synth data source
  int synth_rows = 8;
  int synth_k_true = 4;
  int synth_cols = 200;
  double synth_sparsity = 0.3;
  double synth_noise = 0.1;

  // pgm data source
  int patch_side = 8;

  // graph
  std::string graph_file;  // load when set, generate otherwise
  int graph_clusters = 2;
  double graph_p1 = 0.9;
  double graph_p2 = 0.3;
  std::uint64_t graph_seed = 1;
  int graph_slots = 1;
  bool graph_reject = true;  // rejection-sample slots to strong connectivity
  int window_b = 0;          // 0: number of slots
  std::string weights = "push-sum";  // push-sum | metropolis

  // algorithm parameters
  std::string f_surrogate = "linearized";  // plain | linearized
  std::string h_surrogate = "linearized";
  double tau_d = 10.0;
  std::string tau_x_rule = "adaptive-max";  // constant | adaptive-max | banded
  double tau_x_eps = 1.0;
  double tau_x_mu_tilde = 0.0;
  std::string gamma_rule = "recursive";  // recursive | power
  double gamma0 = 0.5;
  double gamma_eps = 0.01;
  double gamma_coeff = 0.5;
  double gamma_power = 0.75;
  double beta_coeff = 0.002;  // prox-pda-ip penalty slope

  // run control
  std::int64_t horizon = 1000;   // iterations
  std::int64_t msg_budget = -1;  // exchanges; < 0 disabled
  double tol_delta = -1.0;
  double tol_e = -1.0;
  int delta_stride = 1;
  std::uint64_t seed = 0;
  bool parallel = false;
  int threads = 0;
  bool check_invariants = true;
  bool timing = true;

  // inner solver
  double inner_step0 = 0.9;
  double inner_eps = 1e-3;
  double inner_tol = 1e-6;
  int inner_max_iters = 500;

  // merit
  double merit_tau_d = 1.0;
  double merit_tau_x = 1.0;

  // output
  std::string out_dir = ".";
  std::string trace_name = "trace.csv";
  std::string summary_name = "summary.json";
  std::string save_state;  // optional state dump path

  void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);
void apply_config_json(ExperimentConfig& cfg, const std::string& json_text);
std::string experiment_config_json(const ExperimentConfig& cfg);

RunConfig to_run_config(const ExperimentConfig& cfg);

// Problem + graph assembly, shared by run and compare.
struct ExperimentSetup {
  ProblemInstance problem;
  GraphSequence graphs;
};
ExperimentSetup build_setup(const ExperimentConfig& cfg);

struct ExperimentResult {
  int exit_code = 0;
  TraceRow final_row;
  double wall_seconds = 0.0;
  std::string trace_path;
  std::string summary_path;
  InvariantReport invariants;
  std::int64_t inner_warnings = 0;
};

// Wires problem + graph + algorithm, runs, writes the trace CSV and a JSON
// summary. Returns nonzero exit_code on configuration or numerical failure
// (a partial trace is flushed in the numerical case).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Runs each config (which must share problem, graph, and seed), then merges
// the traces keyed by message exchanges (forward-filled onto the union
// grid), one column group per algorithm label.
void compare_experiments(const std::vector<ExperimentConfig>& cfgs,
                         const std::string& out_csv);

// Saved engine state for offline invariant checking.
void save_state_json(const std::string& path, const ProblemInstance& p,
                     const NetworkState& s);
struct SavedState {
  ProblemInstance problem;
  NetworkState state;
};
SavedState load_state_json(const std::string& path);

// Re-verifies the exact run invariants on a saved state; prints one line per
// check, returns 0 when all pass.
int check_state(const SavedState& saved, std::ostream& report);

}  // namespace d4l
