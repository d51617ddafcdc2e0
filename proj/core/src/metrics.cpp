#include "d4l/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace d4l {

void MeritConfig::validate() const {
  if (!(tau_hat_D > 0) || !(tau_hat_X > 0))
    throw std::invalid_argument("merit config: positive tau_hat required");
}

Mat mean_dictionary(const std::vector<Mat>& dicts) {
  if (dicts.empty()) throw std::invalid_argument("mean_dictionary: empty stack");
  Mat acc = Mat::Zero(dicts.front().rows(), dicts.front().cols());
  for (const auto& d : dicts) acc += d;
  return acc / static_cast<double>(dicts.size());
}

double consensus_error(const std::vector<Mat>& dicts) {
  const Mat bar = mean_dictionary(dicts);
  double e = 0.0;
  for (const auto& d : dicts) {
    if (d.rows() != bar.rows() || d.cols() != bar.cols())
      throw std::invalid_argument("consensus_error: shape mismatch");
    e = std::max(e, (d - bar).cwiseAbs().maxCoeff());
  }
  return e;
}

double stationarity_X(const ProblemInstance& p, const Mat& dict_bar,
                      const std::vector<Mat>& codes, const MeritConfig& cfg) {
  cfg.validate();
  const double tau = cfg.tau_hat_X;
  double delta = 0.0;
  for (int i = 0; i < p.num_agents(); ++i) {
    const Mat v = codes[i] - grad_X_fi(p, dict_bar, codes[i], i) / tau;
    const Mat hat = prox_elastic_net(v, p.params.lambda / tau, p.params.mu / tau,
                                     p.x_nonneg());
    delta = std::max(delta, (hat - codes[i]).cwiseAbs().maxCoeff());
  }
  return delta;
}

double stationarity_D(const ProblemInstance& p, const Mat& dict_bar,
                      const std::vector<Mat>& codes, const MeritConfig& cfg) {
  cfg.validate();
  Mat grad_sum = Mat::Zero(dict_bar.rows(), dict_bar.cols());
  for (int i = 0; i < p.num_agents(); ++i)
    grad_sum += grad_D_fi(p, dict_bar, codes[i], i);
  const Mat hat = prox_linear_dictionary_step(p, dict_bar, grad_sum, cfg.tau_hat_D);
  return (hat - dict_bar).cwiseAbs().maxCoeff();
}

double delta_max(double delta_D, double delta_X) {
  return std::max(delta_D, delta_X);
}

double tracking_residual(const ProblemInstance& p, const std::vector<Mat>& dicts,
                         const std::vector<Mat>& codes,
                         const std::vector<Mat>& thetas) {
  const int n = p.num_agents();
  const double scale = static_cast<double>(n);
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    Mat sum = Mat::Zero(dicts[i].rows(), dicts[i].cols());
    for (int j = 0; j < n; ++j) sum += grad_D_fi(p, dicts[i], codes[j], j);
    res = std::max(res, (scale * thetas[i] - sum).norm());
  }
  return res;
}

ImageQuality image_quality(const Mat& clean, const Mat& test, double max_ref) {
  if (clean.rows() != test.rows() || clean.cols() != test.cols())
    throw std::invalid_argument("image_quality: shape mismatch");
  ImageQuality q;
  q.mse = (clean - test).squaredNorm() / static_cast<double>(clean.size());
  if (q.mse == 0.0) {
    q.exact = true;
    return q;
  }
  const double rmse = std::sqrt(q.mse);
  const double peak = max_ref > 0.0 ? max_ref : clean.maxCoeff();
  q.snr_db = 20.0 * std::log10(clean.norm() / rmse);
  q.psnr_db = 20.0 * std::log10(peak / rmse);
  return q;
}

}  // namespace d4l
