#pragma once

#include <string>
#include <vector>

#include "d4l/matrix_io.hpp"

namespace d4l {

// The three instantiated dictionary-learning families. All share the
// quadratic fidelity f_i(D, X_i) = 1/2 ||S_i - D X_i||_F^2 and the elastic
// net code regularizer g_i = lambda ||X_i||_11 + mu/2 ||X_i||_F^2; they
// differ in the dictionary set and in G(D):
//   ElasticNetDL  D in {column norms <= alpha},            G = 0
//   SparseSVD     D in {row norms <= alpha},               G = lambda_d ||D||_11 + mu_d/2 ||D||_F^2
//   NNSC          D in {D >= 0, row norms <= alpha}, X >= 0, G = 0
enum class Family { ElasticNetDL, SparseSVD, NNSC };

enum class DictConstraint { ColumnBall, RowBall, NonnegRowBall };

struct ProblemParams {
  double lambda = 0.0;
  double mu = 0.0;      // > 0: g_i strongly convex
  double lambda_d = 0.0;  // SparseSVD only
  double mu_d = 0.0;      // SparseSVD only
  double alpha = 1.0;
};

struct ProblemInstance {
  Family family = Family::ElasticNetDL;
  std::vector<Mat> shards;  // S_i, all M x n_i with common M
  int num_atoms = 0;        // K
  ProblemParams params;

  int rows() const;        // M
  int num_agents() const;  // I
  Eigen::Index total_cols() const;  // N

  DictConstraint dict_constraint() const;
  bool x_nonneg() const { return family == Family::NNSC; }

  void validate() const;  // throws std::invalid_argument on a bad instance
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// U(D, X) = sum_i [ 1/2||S_i - D X_i||_F^2 + lambda||X_i||_11 + mu/2||X_i||_F^2 ] + G(D).
// Inputs are loosely feasibility-checked; clear violations throw.
double objective(const ProblemInstance& p, const Mat& dict,
                 const std::vector<Mat>& codes);

double dict_regularizer(const ProblemInstance& p, const Mat& dict);  // G(D)
double code_regularizer(const ProblemInstance& p, const Mat& x);     // g_i(X_i)

// Exact gradients of the quadratic fidelity.
Mat grad_D_fi(const ProblemInstance& p, const Mat& dict, const Mat& x, int shard);
Mat grad_X_fi(const ProblemInstance& p, const Mat& dict, const Mat& x, int shard);

// Lipschitz modulus of grad_X f_i(D, .): sigma_max(D)^2, by power iteration.
double lipschitz_LX(const Mat& dict);

// Euclidean projection onto the family's dictionary set. Per-column or
// per-row radial rescaling; NNSC clamps to the orthant first (exact for the
// orthant-ball intersection).
Mat project_dictionary(const ProblemInstance& p, Mat z);

bool dictionary_feasible(const ProblemInstance& p, const Mat& dict,
                         double tol = 1e-10);

// Entrywise proximal map of lambda_eff|.| + mu_eff/2 (.)^2 (plus the
// nonnegative-orthant indicator when nonneg): V -> T_{lambda_eff}(V)/(1+mu_eff),
// clamping at zero first when nonneg.
Mat prox_elastic_net(const Mat& v, double lambda_eff, double mu_eff, bool nonneg);
double soft_threshold(double x, double t);

}  // namespace d4l
