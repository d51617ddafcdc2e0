#pragma once

#include <functional>
#include <string>

#include "d4l/problems.hpp"

namespace d4l {

// Surrogate choices for the two per-agent subproblems. "Plain" keeps the
// quadratic fidelity and adds a proximal term; "Linearized" replaces the
// fidelity by its first-order model, which yields closed-form updates for
// the families implemented here.
enum class FSurrogate { Plain, Linearized };
enum class HSurrogate { Plain, Linearized };

struct SurrogateChoice {
  FSurrogate f_kind = FSurrogate::Linearized;
  HSurrogate h_kind = HSurrogate::Linearized;
};

struct InnerSolverConfig {
  double step0 = 0.9;      // initial relaxation, in (0, 1]
  double eps_inner = 1e-3; // step contraction constant
  double tol = 1e-6;       // stopping threshold
  int max_iters = 500;

  void validate() const;
};

enum class InnerStopRule {
  FixedPointResidual,  // infinity-norm distance to one exact unit prox-linear step
  StepLength,          // Frobenius length between consecutive iterates
};

// One strongly convex composite subproblem: smooth part given by its
// gradient and a curvature bound, nonsmooth part (including the feasible
// set) given by its scaled proximal map prox(v, s) = argmin s*ns(y) + 1/2||y-v||^2.
struct CompositeSubproblem {
  std::function<Mat(const Mat&)> smooth_grad;
  double curvature = 1.0;  // upper bound on the smooth Hessian spectrum, > 0
  std::function<Mat(const Mat&, double)> prox;
};

struct InnerResult {
  Mat z;
  int iters = 0;
  double residual = 0.0;
  bool converged = false;
};

// Warm-started relaxed proximal-(sub)gradient iteration
//   z^{r+1} = z^r + gamma^r (prox(z^r - grad(z^r)/L, 1/L) - z^r),
// with the diminishing relaxation gamma^r = gamma^{r-1}(1 - eps*gamma^{r-1})
// from step0. Under FixedPointResidual the loop stops once the infinity-norm
// distance between z^r and one exact unit prox-linear step falls below tol.
// Iterates stay feasible whenever the warm start is. When max_iters is hit
// the best (last) iterate is returned with converged = false.
InnerResult inner_solve(const CompositeSubproblem& sub, Mat warm,
                        const InnerSolverConfig& cfg,
                        InnerStopRule rule = InnerStopRule::FixedPointResidual);

struct SubproblemReport {
  int inner_iters = 0;
  bool hit_max = false;
};

// Scaled proximal map of G + indicator of the dictionary set:
// argmin_{y in D} s*G(y) + 1/2||y - v||^2. Exact for all three families
// (entrywise shrink, then radial per-column/per-row projection; the sets are
// sign preserving so prox-then-project is the exact composite prox).
Mat prox_dictionary_composite(const ProblemInstance& p, const Mat& v, double step);

// argmin_{D in set} <lin_grad, D - anchor> + tau/2 ||D - anchor||_F^2 + G(D).
Mat prox_linear_dictionary_step(const ProblemInstance& p, const Mat& anchor,
                                const Mat& lin_grad, double tau);

// Dictionary subproblem of one agent: minimize
//   f~_i(D; D_i, X_i) + <I Theta_i - grad_D f_i(D_i, X_i), D - D_i> + G(D)
// over the dictionary set. Linearized f~ uses the closed form
// P[D_i - (I/tau_D) Theta_i] (with G folded into the prox for SparseSVD);
// plain f~ runs the warm-started inner solver.
Mat solve_D_subproblem(const ProblemInstance& p, int agent, const Mat& dict_i,
                       const Mat& code_i, const Mat& theta_i, int num_agents,
                       double tau_D, SurrogateChoice choice,
                       const InnerSolverConfig& cfg,
                       SubproblemReport* report = nullptr);

// Sparse-coding subproblem of one agent at the interim dictionary U_i:
// minimize h~_i(X; U_i, X_i) + g_i(X) over the code set. Linearized h~ uses
// the scaled soft-threshold closed form; plain h~ runs the inner solver.
Mat solve_X_subproblem(const ProblemInstance& p, int agent, const Mat& u_i,
                       const Mat& code_i, double tau_X, SurrogateChoice choice,
                       const InnerSolverConfig& cfg,
                       SubproblemReport* report = nullptr);

enum class TauXRule { Constant, AdaptiveMax, Banded };

TauXRule tau_x_rule_from_name(const std::string& name);
std::string tau_x_rule_name(TauXRule rule);

// Proximal weight for the code subproblem.
//   Constant:    a feasible-set upper bound on sigma_max(D)^2
//                (K alpha^2 for column balls, M alpha^2 for row balls), or
//                eps_tilde if larger.
//   AdaptiveMax: max(sigma_max(U_i)^2, eps_tilde).
//   Banded:      the adaptive value clamped into
//                [max(L, eps_tilde), L + mu_tilde]; requires
//                0 < eps_tilde <= mu_tilde < mu.
double tau_X_value(const ProblemInstance& p, const Mat& u_i, TauXRule rule,
                   double eps_tilde, double mu_tilde = 0.0);

enum class GammaRule { Recursive, PowerLaw };

// Diminishing step-size state. Recursive: gamma^0 = gamma0 and
// gamma^v = gamma^{v-1}(1 - eps0 gamma^{v-1}); strictly decreasing and
// positive for gamma0 in (0,1], eps0 in (0, 1/gamma0). PowerLaw:
// gamma^v = coeff/(v+1)^p with coeff in (0,1], p in (1/2, 1).
class GammaSchedule {
 public:
  GammaSchedule() : GammaSchedule(recursive(0.5, 1e-2)) {}
  static GammaSchedule recursive(double gamma0, double eps0);
  static GammaSchedule power_law(double coeff, double exponent);

  double current() const { return value_; }
  void advance();

  GammaRule rule() const { return rule_; }
  double value() const { return value_; }
  std::int64_t index() const { return index_; }

 private:
  GammaRule rule_ = GammaRule::Recursive;
  double value_ = 0.5;
  double eps_ = 1e-2;     // recursive
  double coeff_ = 0.5;    // power law
  double exponent_ = 0.75;
  std::int64_t index_ = 0;
};

}  // namespace d4l
