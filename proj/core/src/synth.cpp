#include "d4l/synth.hpp"

#include <stdexcept>

#include "d4l/rng.hpp"

namespace d4l {

SynthInstance synth_instance(int rows, int k_true, int cols, double sparsity,
                             double noise_sigma, std::uint64_t seed) {
  if (rows < 1 || k_true < 1 || cols < 1)
    throw std::invalid_argument("synth_instance: positive dimensions required");
  if (!(sparsity > 0) || sparsity > 1)
    throw std::invalid_argument("synth_instance: sparsity in (0, 1] required");
  if (noise_sigma < 0)
    throw std::invalid_argument("synth_instance: noise_sigma >= 0 required");

  Rng rng(seed);
  SynthInstance inst;
  inst.D_true.resize(rows, k_true);
  for (int c = 0; c < k_true; ++c) {
    for (int r = 0; r < rows; ++r) inst.D_true(r, c) = rng.gaussian();
    const double n = inst.D_true.col(c).norm();
    if (n > 0) inst.D_true.col(c) /= n;
  }
  inst.X_true = Mat::Zero(k_true, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < k_true; ++r)
      if (rng.bernoulli(sparsity)) inst.X_true(r, c) = rng.gaussian();
  inst.S = inst.D_true * inst.X_true;
  if (noise_sigma > 0) {
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) inst.S(r, c) += noise_sigma * rng.gaussian();
  }
  return inst;
}

Mat make_block_image(int size, int blocks, std::uint64_t seed) {
  if (size < 1 || blocks < 1 || blocks > size)
    throw std::invalid_argument("make_block_image: need 1 <= blocks <= size");
  Rng rng(seed);
  Mat levels(blocks, blocks);
  for (int r = 0; r < blocks; ++r)
    for (int c = 0; c < blocks; ++c) levels(r, c) = 0.15 + 0.7 * rng.uniform();
  Mat img(size, size);
  for (int r = 0; r < size; ++r) {
    const int br = std::min(r * blocks / size, blocks - 1);
    for (int c = 0; c < size; ++c) {
      const int bc = std::min(c * blocks / size, blocks - 1);
      img(r, c) = levels(br, bc);
    }
  }
  return img;
}

Mat add_gaussian_noise(const Mat& image, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  Mat out = image;
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) += sigma * rng.gaussian();
  return out;
}

}  // namespace d4l
