#include "d4l/problems.hpp"

#include <cmath>
#include <stdexcept>

#include "d4l/graph.hpp"  // spectral_norm

namespace d4l {

int ProblemInstance::rows() const {
  return shards.empty() ? 0 : static_cast<int>(shards.front().rows());
}

int ProblemInstance::num_agents() const { return static_cast<int>(shards.size()); }

Eigen::Index ProblemInstance::total_cols() const {
  Eigen::Index n = 0;
  for (const auto& s : shards) n += s.cols();
  return n;
}

DictConstraint ProblemInstance::dict_constraint() const {
  switch (family) {
    case Family::ElasticNetDL: return DictConstraint::ColumnBall;
    case Family::SparseSVD: return DictConstraint::RowBall;
    case Family::NNSC: return DictConstraint::NonnegRowBall;
  }
  throw std::logic_error("unreachable");
}

void ProblemInstance::validate() const {
  if (shards.empty()) throw std::invalid_argument("problem: no shards");
  const auto m = shards.front().rows();
  for (const auto& s : shards) {
    if (s.rows() != m) throw std::invalid_argument("problem: shards disagree on row count");
    if (s.cols() < 1) throw std::invalid_argument("problem: empty shard");
  }
  if (num_atoms < 1) throw std::invalid_argument("problem: K >= 1 required");
  if (params.lambda < 0) throw std::invalid_argument("problem: lambda >= 0 required");
  if (!(params.mu > 0)) throw std::invalid_argument("problem: mu > 0 required");
  if (!(params.alpha > 0)) throw std::invalid_argument("problem: alpha > 0 required");
  if (family == Family::SparseSVD) {
    if (params.lambda_d < 0 || params.mu_d < 0)
      throw std::invalid_argument("problem: SparseSVD regularizers must be nonnegative");
  }
}

std::string family_name(Family f) {
  switch (f) {
    case Family::ElasticNetDL: return "elastic-net";
    case Family::SparseSVD: return "ssvd";
    case Family::NNSC: return "nnsc";
  }
  throw std::logic_error("unreachable");
}

Family family_from_name(const std::string& name) {
  if (name == "elastic-net") return Family::ElasticNetDL;
  if (name == "ssvd") return Family::SparseSVD;
  if (name == "nnsc") return Family::NNSC;
  throw std::invalid_argument("unknown problem family: " + name);
}

double dict_regularizer(const ProblemInstance& p, const Mat& dict) {
  if (p.family != Family::SparseSVD) return 0.0;
  return p.params.lambda_d * dict.cwiseAbs().sum() +
         0.5 * p.params.mu_d * dict.squaredNorm();
}

double code_regularizer(const ProblemInstance& p, const Mat& x) {
  return p.params.lambda * x.cwiseAbs().sum() + 0.5 * p.params.mu * x.squaredNorm();
}

namespace {

void check_shapes(const ProblemInstance& p, const Mat& dict, const Mat& x, int shard) {
  if (shard < 0 || shard >= p.num_agents())
    throw std::invalid_argument("shard index out of range");
  if (dict.rows() != p.rows() || dict.cols() != p.num_atoms)
    throw std::invalid_argument("dictionary shape mismatch");
  if (x.rows() != p.num_atoms || x.cols() != p.shards[shard].cols())
    throw std::invalid_argument("code shape mismatch");
}

}  // namespace

double objective(const ProblemInstance& p, const Mat& dict,
                 const std::vector<Mat>& codes) {
  if (static_cast<int>(codes.size()) != p.num_agents())
    throw std::invalid_argument("objective: one code matrix per shard");
  if (!dictionary_feasible(p, dict, 1e-8))
    throw std::invalid_argument("objective: dictionary infeasible beyond tolerance");
  double u = 0.0;
  for (int i = 0; i < p.num_agents(); ++i) {
    check_shapes(p, dict, codes[i], i);
    if (p.x_nonneg() && codes[i].minCoeff() < -1e-8)
      throw std::invalid_argument("objective: negative code in NNSC beyond tolerance");
    u += 0.5 * (p.shards[i] - dict * codes[i]).squaredNorm();
    u += code_regularizer(p, codes[i]);
  }
  return u + dict_regularizer(p, dict);
}

Mat grad_D_fi(const ProblemInstance& p, const Mat& dict, const Mat& x, int shard) {
  check_shapes(p, dict, x, shard);
  return (dict * x - p.shards[shard]) * x.transpose();
}

Mat grad_X_fi(const ProblemInstance& p, const Mat& dict, const Mat& x, int shard) {
  check_shapes(p, dict, x, shard);
  return dict.transpose() * (dict * x - p.shards[shard]);
}

double lipschitz_LX(const Mat& dict) {
  const double s = spectral_norm(dict);
  return s * s;
}

Mat project_dictionary(const ProblemInstance& p, Mat z) {
  const double alpha = p.params.alpha;
  switch (p.dict_constraint()) {
    case DictConstraint::ColumnBall:
      for (Eigen::Index k = 0; k < z.cols(); ++k) {
        const double n = z.col(k).norm();
        if (n > alpha) z.col(k) *= alpha / n;
      }
      return z;
    case DictConstraint::NonnegRowBall:
      z = z.cwiseMax(0.0);
      [[fallthrough]];
    case DictConstraint::RowBall:
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double n = z.row(r).norm();
        if (n > alpha) z.row(r) *= alpha / n;
      }
      return z;
  }
  throw std::logic_error("unreachable");
}

bool dictionary_feasible(const ProblemInstance& p, const Mat& dict, double tol) {
  const double alpha = p.params.alpha;
  switch (p.dict_constraint()) {
    case DictConstraint::ColumnBall:
      for (Eigen::Index k = 0; k < dict.cols(); ++k)
        if (dict.col(k).norm() > alpha + tol) return false;
      return true;
    case DictConstraint::NonnegRowBall:
      if (dict.minCoeff() < -1e-12 - tol) return false;
      [[fallthrough]];
    case DictConstraint::RowBall:
      for (Eigen::Index r = 0; r < dict.rows(); ++r)
        if (dict.row(r).norm() > alpha + tol) return false;
      return true;
  }
  throw std::logic_error("unreachable");
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

Mat prox_elastic_net(const Mat& v, double lambda_eff, double mu_eff, bool nonneg) {
  if (lambda_eff < 0 || mu_eff < 0)
    throw std::invalid_argument("prox_elastic_net: nonnegative parameters required");
  Mat out(v.rows(), v.cols());
  const double scale = 1.0 / (1.0 + mu_eff);
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      double x = v(r, c);
      if (nonneg && x < 0.0) x = 0.0;
      out(r, c) = soft_threshold(x, lambda_eff) * scale;
    }
  }
  return out;
}

}  // namespace d4l
