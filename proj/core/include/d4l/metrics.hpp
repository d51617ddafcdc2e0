#pragma once

#include <optional>
#include <vector>

#include "d4l/problems.hpp"
#include "d4l/subsolvers.hpp"

namespace d4l {

// Weights used inside the stationarity merit maps.
struct MeritConfig {
  double tau_hat_D = 1.0;
  double tau_hat_X = 1.0;
  InnerSolverConfig inner;

  void validate() const;
};

Mat mean_dictionary(const std::vector<Mat>& dicts);

// e = max over agents and entries of |D_(i) - mean(D)|.
double consensus_error(const std::vector<Mat>& dicts);

// Distance of X from one exact proximal best-response step at the mean
// dictionary, in the infinity norm over all agents and entries. Zero exactly
// at X-stationary points.
double stationarity_X(const ProblemInstance& p, const Mat& dict_bar,
                      const std::vector<Mat>& codes, const MeritConfig& cfg);

// Distance of the mean dictionary from one exact proximal-linear step on the
// full fidelity gradient (with G), over the dictionary set.
double stationarity_D(const ProblemInstance& p, const Mat& dict_bar,
                      const std::vector<Mat>& codes, const MeritConfig& cfg);

double delta_max(double delta_D, double delta_X);

// max_i || I Theta_(i) - sum_j grad_D f_j(D_(i), X_j) ||_F, each f_j
// evaluated at agent i's dictionary copy.
double tracking_residual(const ProblemInstance& p, const std::vector<Mat>& dicts,
                         const std::vector<Mat>& codes,
                         const std::vector<Mat>& thetas);

struct ImageQuality {
  double mse = 0.0;
  double snr_db = 0.0;
  double psnr_db = 0.0;
  bool exact = false;  // MSE == 0; the dB fields are meaningless then
};

// MSE is the mean squared entry difference. SNR = 20 log10(||vec(F0)||_2 /
// sqrt(MSE)), PSNR = 20 log10(peak / sqrt(MSE)) with peak = max entry of F0
// unless a positive max_ref overrides it.
ImageQuality image_quality(const Mat& clean, const Mat& test, double max_ref = 0.0);

}  // namespace d4l
