#include "d4l/subsolvers.hpp"

#include <cmath>
#include <stdexcept>

#include "d4l/graph.hpp"  // spectral_norm

namespace d4l {

void InnerSolverConfig::validate() const {
  if (!(step0 > 0) || step0 > 1)
    throw std::invalid_argument("inner solver: step0 in (0,1] required");
  if (!(tol > 0)) throw std::invalid_argument("inner solver: tol > 0 required");
  if (eps_inner < 0) throw std::invalid_argument("inner solver: eps_inner >= 0 required");
  if (max_iters < 1) throw std::invalid_argument("inner solver: max_iters >= 1 required");
}

InnerResult inner_solve(const CompositeSubproblem& sub, Mat warm,
                        const InnerSolverConfig& cfg, InnerStopRule rule) {
  cfg.validate();
  if (!(sub.curvature > 0))
    throw std::invalid_argument("inner_solve: positive curvature bound required");
  const double step = 1.0 / sub.curvature;

  InnerResult res;
  res.z = std::move(warm);
  double gamma = cfg.step0;
  for (int r = 0; r < cfg.max_iters; ++r) {
    const Mat g = sub.smooth_grad(res.z);
    if (rule == InnerStopRule::FixedPointResidual) {
      // unit prox-linear fixed-point residual
      const Mat hat = sub.prox(res.z - g, 1.0);
      res.residual = (res.z - hat).cwiseAbs().maxCoeff();
      if (res.residual <= cfg.tol) {
        res.iters = r;
        res.converged = true;
        return res;
      }
    }
    const Mat target = sub.prox(res.z - step * g, step);
    const Mat next = res.z + gamma * (target - res.z);
    if (rule == InnerStopRule::StepLength) {
      res.residual = (next - res.z).norm();
      if (res.residual <= cfg.tol) {
        res.z = next;
        res.iters = r + 1;
        res.converged = true;
        return res;
      }
    }
    res.z = next;
    gamma = gamma * (1.0 - cfg.eps_inner * gamma);
  }
  res.iters = cfg.max_iters;
  res.converged = false;
  return res;
}

Mat prox_dictionary_composite(const ProblemInstance& p, const Mat& v, double step) {
  if (p.family != Family::SparseSVD) return project_dictionary(p, v);
  const double t = step * p.params.lambda_d;
  const double scale = 1.0 / (1.0 + step * p.params.mu_d);
  Mat u(v.rows(), v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    for (Eigen::Index r = 0; r < v.rows(); ++r)
      u(r, c) = soft_threshold(v(r, c), t) * scale;
  return project_dictionary(p, u);
}

Mat prox_linear_dictionary_step(const ProblemInstance& p, const Mat& anchor,
                                const Mat& lin_grad, double tau) {
  if (!(tau > 0)) throw std::invalid_argument("prox_linear_dictionary_step: tau > 0");
  return prox_dictionary_composite(p, anchor - lin_grad / tau, 1.0 / tau);
}

namespace {

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string("subsolver: nonfinite input: ") + what);
}

}  // namespace

Mat solve_D_subproblem(const ProblemInstance& p, int agent, const Mat& dict_i,
                       const Mat& code_i, const Mat& theta_i, int num_agents,
                       double tau_D, SurrogateChoice choice,
                       const InnerSolverConfig& cfg, SubproblemReport* report) {
  if (!(tau_D > 0)) throw std::invalid_argument("solve_D_subproblem: tau_D > 0");
  require_finite(dict_i, "D_i");
  require_finite(code_i, "X_i");
  require_finite(theta_i, "Theta_i");
  const double scale_i = static_cast<double>(num_agents);

  if (choice.f_kind == FSurrogate::Linearized) {
    // closed form: the surrogate gradient cancels the local gradient in the
    // tracking term, leaving P[D_i - (I/tau_D) Theta_i] (G in the prox)
    return prox_dictionary_composite(p, dict_i - (scale_i / tau_D) * theta_i,
                                     1.0 / tau_D);
  }

  // plain surrogate: quadratic fidelity kept, solved by the inner solver
  const Mat lin = scale_i * theta_i - grad_D_fi(p, dict_i, code_i, agent);
  const Mat& shard = p.shards[agent];
  CompositeSubproblem sub;
  sub.smooth_grad = [&, lin](const Mat& d) -> Mat {
    return (d * code_i - shard) * code_i.transpose() + tau_D * (d - dict_i) + lin;
  };
  const double sx = spectral_norm(code_i);
  sub.curvature = sx * sx + tau_D;
  sub.prox = [&](const Mat& v, double s) { return prox_dictionary_composite(p, v, s); };
  InnerResult r = inner_solve(sub, dict_i, cfg);
  if (report) {
    report->inner_iters += r.iters;
    report->hit_max = report->hit_max || !r.converged;
  }
  return std::move(r.z);
}

Mat solve_X_subproblem(const ProblemInstance& p, int agent, const Mat& u_i,
                       const Mat& code_i, double tau_X, SurrogateChoice choice,
                       const InnerSolverConfig& cfg, SubproblemReport* report) {
  if (!(tau_X > 0)) throw std::invalid_argument("solve_X_subproblem: tau_X > 0");
  require_finite(u_i, "U_i");
  require_finite(code_i, "X_i");
  const double lambda = p.params.lambda;
  const double mu = p.params.mu;
  const bool nonneg = p.x_nonneg();

  if (choice.h_kind == HSurrogate::Linearized) {
    const Mat v = code_i - grad_X_fi(p, u_i, code_i, agent) / tau_X;
    return prox_elastic_net(v, lambda / tau_X, mu / tau_X, nonneg);
  }

  const Mat& shard = p.shards[agent];
  CompositeSubproblem sub;
  sub.smooth_grad = [&](const Mat& x) -> Mat {
    return u_i.transpose() * (u_i * x - shard) + tau_X * (x - code_i);
  };
  const double su = spectral_norm(u_i);
  sub.curvature = su * su + tau_X;
  sub.prox = [&](const Mat& v, double s) {
    return prox_elastic_net(v, s * lambda, s * mu, nonneg);
  };
  InnerResult r = inner_solve(sub, code_i, cfg);
  if (report) {
    report->inner_iters += r.iters;
    report->hit_max = report->hit_max || !r.converged;
  }
  return std::move(r.z);
}

TauXRule tau_x_rule_from_name(const std::string& name) {
  if (name == "constant") return TauXRule::Constant;
  if (name == "adaptive-max") return TauXRule::AdaptiveMax;
  if (name == "banded") return TauXRule::Banded;
  throw std::invalid_argument("unknown tau_X rule: " + name);
}

std::string tau_x_rule_name(TauXRule rule) {
  switch (rule) {
    case TauXRule::Constant: return "constant";
    case TauXRule::AdaptiveMax: return "adaptive-max";
    case TauXRule::Banded: return "banded";
  }
  throw std::logic_error("unreachable");
}

double tau_X_value(const ProblemInstance& p, const Mat& u_i, TauXRule rule,
                   double eps_tilde, double mu_tilde) {
  if (!(eps_tilde > 0)) throw std::invalid_argument("tau_X_value: eps_tilde > 0");
  switch (rule) {
    case TauXRule::Constant: {
      // sup over the set of sigma_max(D)^2, bounded through the norm budget
      const double a2 = p.params.alpha * p.params.alpha;
      const double bound = (p.dict_constraint() == DictConstraint::ColumnBall)
                               ? a2 * static_cast<double>(p.num_atoms)
                               : a2 * static_cast<double>(p.rows());
      return std::max(bound, eps_tilde);
    }
    case TauXRule::AdaptiveMax:
      return std::max(lipschitz_LX(u_i), eps_tilde);
    case TauXRule::Banded: {
      if (!(eps_tilde <= mu_tilde) || !(mu_tilde < p.params.mu))
        throw std::invalid_argument(
            "tau_X_value: banded rule requires 0 < eps_tilde <= mu_tilde < mu");
      const double l = lipschitz_LX(u_i);
      return std::min(std::max(l, eps_tilde), l + mu_tilde);
    }
  }
  throw std::logic_error("unreachable");
}

GammaSchedule GammaSchedule::recursive(double gamma0, double eps0) {
  if (!(gamma0 > 0) || gamma0 > 1)
    throw std::invalid_argument("gamma schedule: gamma0 in (0,1] required");
  if (!(eps0 > 0) || !(eps0 < 1.0 / gamma0))
    throw std::invalid_argument("gamma schedule: eps0 in (0, 1/gamma0) required");
  GammaSchedule s;
  s.rule_ = GammaRule::Recursive;
  s.value_ = gamma0;
  s.eps_ = eps0;
  return s;
}

GammaSchedule GammaSchedule::power_law(double coeff, double exponent) {
  if (!(coeff > 0) || coeff > 1)
    throw std::invalid_argument("gamma schedule: coeff in (0,1] required");
  if (!(exponent > 0.5) || !(exponent < 1))
    throw std::invalid_argument("gamma schedule: exponent in (1/2,1) required");
  GammaSchedule s;
  s.rule_ = GammaRule::PowerLaw;
  s.coeff_ = coeff;
  s.exponent_ = exponent;
  s.value_ = coeff;  // coeff/(0+1)^p
  return s;
}

void GammaSchedule::advance() {
  ++index_;
  if (rule_ == GammaRule::Recursive) {
    value_ = value_ * (1.0 - eps_ * value_);
  } else {
    value_ = coeff_ / std::pow(static_cast<double>(index_) + 1.0, exponent_);
  }
}

}  // namespace d4l
