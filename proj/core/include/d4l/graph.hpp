#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "d4l/matrix_io.hpp"

namespace d4l {

// Directed communication graph. An edge (j, i) means "j sends to i".
// Self-loops are implicit: every node is always in its own in- and
// out-neighborhood and self-loops are never stored or serialized.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int num_nodes);

  int num_nodes() const { return num_nodes_; }

  // Adds j -> i. Throws on out-of-range nodes; self-loops are ignored.
  void add_edge(int j, int i);
  bool has_edge(int j, int i) const;  // true for j == i

  // Sorted, always contain the node itself.
  std::vector<int> in_neighbors(int i) const;
  std::vector<int> out_neighbors(int j) const;
  int out_degree(int j) const;  // includes the self-loop

  // Stored (non-self) edges as sorted (j, i) pairs.
  std::vector<std::pair<int, int>> edges() const;
  std::size_t edge_count() const;

  bool symmetric() const;  // every stored arc has its reverse

  static Digraph complete(int num_nodes);

 private:
  int num_nodes_ = 0;
  std::vector<std::set<int>> out_;  // out_[j] = {i : j -> i, i != j}
  std::vector<std::set<int>> in_;   // in_[i]  = {j : j -> i, j != i}
};

// Finite list of slots cycled forever; decidability of B-strong
// connectivity reduces to checking one full cycle.
struct GraphSequence {
  std::vector<Digraph> slots;
  std::optional<int> window_B;

  int num_nodes() const;
  const Digraph& slot(std::int64_t nu) const;
  void validate() const;  // nonempty, uniform node count
};

enum class WeightKind { ColumnStochastic, DoublyStochastic };

struct WeightMatrix {
  Mat entries;
  WeightKind kind = WeightKind::ColumnStochastic;
};

// Two-cluster-probability random digraph generator: an arc u->v (u != v) is
// drawn with probability p1 when u, v share a cluster and p2 otherwise.
// When n_c does not divide I the first I mod n_c clusters take the extra
// node. Deterministic for a given seed.
Digraph generate_clustered_digraph(int num_nodes, int num_clusters, double p1,
                                   double p2, std::uint64_t seed);

// Rejection-sampled variant: regenerates with seed+1, seed+2, ... until the
// sample is strongly connected; throws after max_attempts.
Digraph generate_strongly_connected_digraph(int num_nodes, int num_clusters,
                                            double p1, double p2,
                                            std::uint64_t seed,
                                            int max_attempts = 1000);

int cluster_of(int node, int num_nodes, int num_clusters);

// Tarjan SCC based.
bool is_strongly_connected(const Digraph& g);

// True iff the union graph over every window [kB, (k+1)B-1] is strongly
// connected, for all k up to one full cycle of the slot list.
bool check_b_strong_connectivity(const GraphSequence& seq, int window);

// Push-sum weights: a_ij = 1/d_j for j in the in-neighborhood of i (d_j the
// out-degree of j including its self-loop). Columns sum to one.
WeightMatrix push_sum_weights(const Digraph& g);

// Metropolis-Hastings weights for symmetric graphs:
// w_ij = 1/(1 + max(deg_i, deg_j)) off-diagonal, diagonal absorbs the rest.
// Throws if the edge set is not symmetric.
WeightMatrix metropolis_hastings_weights(const Digraph& g);

// Checks the zero pattern against g (positive entries >= kappa exactly where
// the digraph has an arc or on the diagonal) plus stochasticity of the kind.
// Throws std::runtime_error describing the first violation.
void validate_weight_matrix(const WeightMatrix& w, const Digraph& g,
                            double kappa = 1e-9);

// Spectral norm by power iteration on A^T A. Deterministic (fixed-seed start
// vector), relative tolerance on the Rayleigh quotient, hard iteration cap.
double spectral_norm(const Mat& a, double rel_tol = 1e-10,
                     int max_iters = 10000);

// Simulates phi^{v+1} = A^v phi^v from phi^0 = 1, forms the normalized
// mixing matrices W^v = (Phi^{v+1})^-1 A^v Phi^v, accumulates the running
// product W^{v:0} and records its spectral distance to J = (1/I) 1 1^T.
// Throws if any phi becomes nonpositive (malformed weights).
std::vector<std::pair<std::int64_t, double>> product_decay_curve(
    const GraphSequence& seq, const std::vector<WeightMatrix>& slot_weights,
    std::int64_t horizon);

enum class WeightRule { PushSum, MetropolisHastings };

std::vector<WeightMatrix> make_slot_weights(const GraphSequence& seq,
                                            WeightRule rule);

// Graph text format: "I E" header then E lines "j i" (0-based, j -> i).
// Sequence files concatenate graph blocks separated by a "---" line.
void save_digraph(std::ostream& os, const Digraph& g);
Digraph load_digraph(std::istream& is);
void save_graph_sequence(const std::string& path, const GraphSequence& seq);
GraphSequence load_graph_sequence(const std::string& path);

}  // namespace d4l
