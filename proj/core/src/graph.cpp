#include "d4l/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stack>
#include <stdexcept>

#include "d4l/rng.hpp"

namespace d4l {

Digraph::Digraph(int num_nodes) : num_nodes_(num_nodes) {
  if (num_nodes < 1) throw std::invalid_argument("Digraph: need at least one node");
  out_.resize(num_nodes);
  in_.resize(num_nodes);
}

void Digraph::add_edge(int j, int i) {
  if (j < 0 || j >= num_nodes_ || i < 0 || i >= num_nodes_)
    throw std::out_of_range("Digraph::add_edge: node out of range");
  if (j == i) return;  // self-loops are implicit
  out_[j].insert(i);
  in_[i].insert(j);
}

bool Digraph::has_edge(int j, int i) const {
  if (j < 0 || j >= num_nodes_ || i < 0 || i >= num_nodes_) return false;
  if (j == i) return true;
  return out_[j].count(i) > 0;
}

std::vector<int> Digraph::in_neighbors(int i) const {
  std::vector<int> res(in_[i].begin(), in_[i].end());
  res.insert(std::lower_bound(res.begin(), res.end(), i), i);
  return res;
}

std::vector<int> Digraph::out_neighbors(int j) const {
  std::vector<int> res(out_[j].begin(), out_[j].end());
  res.insert(std::lower_bound(res.begin(), res.end(), j), j);
  return res;
}

int Digraph::out_degree(int j) const {
  return static_cast<int>(out_[j].size()) + 1;
}

std::vector<std::pair<int, int>> Digraph::edges() const {
  std::vector<std::pair<int, int>> res;
  for (int j = 0; j < num_nodes_; ++j)
    for (int i : out_[j]) res.emplace_back(j, i);
  return res;
}

std::size_t Digraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : out_) n += s.size();
  return n;
}

bool Digraph::symmetric() const {
  for (int j = 0; j < num_nodes_; ++j)
    for (int i : out_[j])
      if (!out_[i].count(j)) return false;
  return true;
}

Digraph Digraph::complete(int num_nodes) {
  Digraph g(num_nodes);
  for (int j = 0; j < num_nodes; ++j)
    for (int i = 0; i < num_nodes; ++i)
      if (i != j) g.add_edge(j, i);
  return g;
}

int GraphSequence::num_nodes() const {
  return slots.empty() ? 0 : slots.front().num_nodes();
}

const Digraph& GraphSequence::slot(std::int64_t nu) const {
  return slots[static_cast<std::size_t>(nu % static_cast<std::int64_t>(slots.size()))];
}

void GraphSequence::validate() const {
  if (slots.empty()) throw std::invalid_argument("GraphSequence: no slots");
  for (const auto& g : slots)
    if (g.num_nodes() != slots.front().num_nodes())
      throw std::invalid_argument("GraphSequence: slots disagree on node count");
}

int cluster_of(int node, int num_nodes, int num_clusters) {
  const int base = num_nodes / num_clusters;
  const int rem = num_nodes % num_clusters;
  // first `rem` clusters take base+1 nodes
  const int big = rem * (base + 1);
  if (node < big) return node / (base + 1);
  return rem + (node - big) / base;
}

Digraph generate_clustered_digraph(int num_nodes, int num_clusters, double p1,
                                   double p2, std::uint64_t seed) {
  if (num_nodes < 1) throw std::invalid_argument("generate_clustered_digraph: I >= 1");
  if (num_clusters < 1 || num_clusters > num_nodes)
    throw std::invalid_argument("generate_clustered_digraph: need 1 <= n_c <= I");
  if (p1 < 0 || p1 > 1 || p2 < 0 || p2 > 1)
    throw std::invalid_argument("generate_clustered_digraph: probabilities in [0,1]");
  Digraph g(num_nodes);
  Rng rng(seed);
  for (int u = 0; u < num_nodes; ++u) {
    const int cu = cluster_of(u, num_nodes, num_clusters);
    for (int v = 0; v < num_nodes; ++v) {
      if (u == v) continue;
      const double p = (cluster_of(v, num_nodes, num_clusters) == cu) ? p1 : p2;
      if (rng.bernoulli(p)) g.add_edge(u, v);
    }
  }
  return g;
}

Digraph generate_strongly_connected_digraph(int num_nodes, int num_clusters,
                                            double p1, double p2,
                                            std::uint64_t seed,
                                            int max_attempts) {
  for (int a = 0; a < max_attempts; ++a) {
    Digraph g = generate_clustered_digraph(num_nodes, num_clusters, p1, p2,
                                           seed + static_cast<std::uint64_t>(a));
    if (is_strongly_connected(g)) return g;
  }
  throw std::runtime_error(
      "generate_strongly_connected_digraph: no strongly connected sample "
      "within attempt budget");
}

namespace {

// Iterative Tarjan; counts strongly connected components, early exit > 1.
int count_scc(const Digraph& g) {
  const int n = g.num_nodes();
  std::vector<int> index(n, -1), lowlink(n, 0);
  std::vector<char> on_stack(n, 0);
  std::stack<int> scc_stack;
  int next_index = 0, components = 0;

  struct Frame {
    int v;
    std::vector<int> succ;
    std::size_t next;
  };

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::stack<Frame> call;
    call.push({root, g.out_neighbors(root), 0});
    index[root] = lowlink[root] = next_index++;
    scc_stack.push(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.top();
      if (f.next < f.succ.size()) {
        const int w = f.succ[f.next++];
        if (w == f.v) continue;
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          scc_stack.push(w);
          on_stack[w] = 1;
          call.push({w, g.out_neighbors(w), 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        if (lowlink[f.v] == index[f.v]) {
          ++components;
          int w;
          do {
            w = scc_stack.top();
            scc_stack.pop();
            on_stack[w] = 0;
          } while (w != f.v);
        }
        const int child = f.v;
        call.pop();
        if (!call.empty())
          lowlink[call.top().v] = std::min(lowlink[call.top().v], lowlink[child]);
      }
    }
  }
  return components;
}

}  // namespace

bool is_strongly_connected(const Digraph& g) {
  if (g.num_nodes() <= 1) return true;
  return count_scc(g) == 1;
}

bool check_b_strong_connectivity(const GraphSequence& seq, int window) {
  if (window < 1) throw std::invalid_argument("check_b_strong_connectivity: B >= 1");
  seq.validate();
  const std::int64_t slots = static_cast<std::int64_t>(seq.slots.size());
  // one full cycle of windows: lcm(slots, B)/B window positions suffice
  std::int64_t cycle = slots;
  {
    std::int64_t a = slots, b = window;
    while (b) { std::int64_t t = a % b; a = b; b = t; }
    cycle = slots / a * window;  // lcm
  }
  for (std::int64_t k = 0; k * window < cycle; ++k) {
    Digraph u(seq.num_nodes());
    for (std::int64_t t = k * window; t < (k + 1) * window; ++t)
      for (auto [j, i] : seq.slot(t).edges()) u.add_edge(j, i);
    if (!is_strongly_connected(u)) return false;
  }
  return true;
}

WeightMatrix push_sum_weights(const Digraph& g) {
  const int n = g.num_nodes();
  WeightMatrix w;
  w.kind = WeightKind::ColumnStochastic;
  w.entries = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double a = 1.0 / static_cast<double>(g.out_degree(j));
    w.entries(j, j) = a;
    for (int i : g.out_neighbors(j))
      if (i != j) w.entries(i, j) = a;
  }
  return w;
}

WeightMatrix metropolis_hastings_weights(const Digraph& g) {
  if (!g.symmetric())
    throw std::invalid_argument("metropolis_hastings_weights: edge set must be symmetric");
  const int n = g.num_nodes();
  WeightMatrix w;
  w.kind = WeightKind::DoublyStochastic;
  w.entries = Mat::Zero(n, n);
  auto deg = [&](int v) { return g.out_degree(v) - 1; };  // non-self neighbors
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.in_neighbors(i)) {
      if (j == i) continue;
      const double a = 1.0 / (1.0 + static_cast<double>(std::max(deg(i), deg(j))));
      w.entries(i, j) = a;
      off += a;
    }
    w.entries(i, i) = 1.0 - off;
  }
  return w;
}

void validate_weight_matrix(const WeightMatrix& w, const Digraph& g, double kappa) {
  const int n = g.num_nodes();
  if (w.entries.rows() != n || w.entries.cols() != n)
    throw std::runtime_error("weight matrix: shape mismatch with digraph");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = w.entries(i, j);
      const bool arc = (i == j) || g.has_edge(j, i);
      if (arc && a < kappa)
        throw std::runtime_error("weight matrix: entry below kappa on an arc");
      if (!arc && a != 0.0)
        throw std::runtime_error("weight matrix: nonzero entry off the graph pattern");
    }
  }
  for (int j = 0; j < n; ++j) {
    if (std::abs(w.entries.col(j).sum() - 1.0) > 1e-12)
      throw std::runtime_error("weight matrix: column sum deviates from 1");
  }
  if (w.kind == WeightKind::DoublyStochastic) {
    for (int i = 0; i < n; ++i)
      if (std::abs(w.entries.row(i).sum() - 1.0) > 1e-12)
        throw std::runtime_error("weight matrix: row sum deviates from 1");
  }
}

double spectral_norm(const Mat& a, double rel_tol, int max_iters) {
  if (a.size() == 0) return 0.0;
  const Eigen::Index n = a.cols();
  // fixed-seed start vector; a deterministic generic direction
  Rng rng(0x5eed5eedULL);
  Vec v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = rng.gaussian();
  double nv = v.norm();
  if (nv == 0.0) v.setOnes(), nv = v.norm();
  v /= nv;
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vec w = a.transpose() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double lambda_new = v.dot(w);  // Rayleigh quotient for A^T A
    v = w / nw;
    if (it > 0 && std::abs(lambda_new - lambda) <= rel_tol * std::max(1.0, std::abs(lambda_new))) {
      lambda = lambda_new;
      break;
    }
    lambda = lambda_new;
  }
  return std::sqrt(std::max(0.0, lambda));
}

std::vector<WeightMatrix> make_slot_weights(const GraphSequence& seq, WeightRule rule) {
  std::vector<WeightMatrix> res;
  res.reserve(seq.slots.size());
  for (const auto& g : seq.slots)
    res.push_back(rule == WeightRule::PushSum ? push_sum_weights(g)
                                              : metropolis_hastings_weights(g));
  return res;
}

std::vector<std::pair<std::int64_t, double>> product_decay_curve(
    const GraphSequence& seq, const std::vector<WeightMatrix>& slot_weights,
    std::int64_t horizon) {
  seq.validate();
  if (horizon < 1) throw std::invalid_argument("product_decay_curve: horizon >= 1");
  if (slot_weights.size() != seq.slots.size())
    throw std::invalid_argument("product_decay_curve: one weight matrix per slot");
  const int n = seq.num_nodes();
  const Mat j_phi0 = Mat::Ones(n, n) / static_cast<double>(n);  // (1/I) 1 phi0^T, phi0 = 1

  Vec phi = Vec::Ones(n);
  Mat product = Mat::Identity(n, n);
  std::vector<std::pair<std::int64_t, double>> curve;
  curve.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t nu = 0; nu < horizon; ++nu) {
    const Mat& a = slot_weights[static_cast<std::size_t>(
        nu % static_cast<std::int64_t>(slot_weights.size()))].entries;
    const Vec phi_next = a * phi;
    for (int i = 0; i < n; ++i)
      if (!(phi_next(i) > 0.0))
        throw std::runtime_error("product_decay_curve: phi reached a nonpositive value");
    const Mat w = phi_next.cwiseInverse().asDiagonal() * a * phi.asDiagonal();
    product = w * product;
    curve.emplace_back(nu, spectral_norm(product - j_phi0));
    phi = phi_next;
  }
  return curve;
}

void save_digraph(std::ostream& os, const Digraph& g) {
  const auto es = g.edges();
  os << g.num_nodes() << ' ' << es.size() << '\n';
  for (auto [j, i] : es) os << j << ' ' << i << '\n';
}

Digraph load_digraph(std::istream& is) {
  int n = 0;
  std::size_t e = 0;
  if (!(is >> n >> e)) throw std::runtime_error("load_digraph: bad header");
  Digraph g(n);
  for (std::size_t k = 0; k < e; ++k) {
    int j = 0, i = 0;
    if (!(is >> j >> i)) throw std::runtime_error("load_digraph: truncated edge list");
    g.add_edge(j, i);
  }
  return g;
}

void save_graph_sequence(const std::string& path, const GraphSequence& seq) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_graph_sequence: cannot open " + path);
  for (std::size_t k = 0; k < seq.slots.size(); ++k) {
    if (k) f << "---\n";
    save_digraph(f, seq.slots[k]);
  }
}

GraphSequence load_graph_sequence(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_graph_sequence: cannot open " + path);
  GraphSequence seq;
  std::string block;
  std::string line;
  auto flush_block = [&]() {
    if (block.find_first_not_of(" \t\r\n") == std::string::npos) return;
    std::istringstream is(block);
    seq.slots.push_back(load_digraph(is));
    block.clear();
  };
  while (std::getline(f, line)) {
    if (line.rfind("---", 0) == 0) {
      flush_block();
      block.clear();
    } else {
      block += line;
      block += '\n';
    }
  }
  flush_block();
  seq.validate();
  return seq;
}

}  // namespace d4l
