#pragma once

#include <cstdint>

#include "d4l/matrix_io.hpp"

namespace d4l {

struct SynthInstance {
  Mat S;       // M x N data
  Mat D_true;  // M x K_true, unit-norm columns
  Mat X_true;  // K_true x N, sparse
};

// Planted factorization S = D* X* + sigma * noise. D* has gaussian entries
// with columns normalized to unit norm; each X* entry is nonzero with
// probability `sparsity`, gaussian when nonzero; noise is i.i.d. gaussian.
// Draw order (column-major per matrix, D* then X* then noise) is fixed, so
// outputs are bitwise reproducible per seed.
SynthInstance synth_instance(int rows, int k_true, int cols, double sparsity,
                             double noise_sigma, std::uint64_t seed);

// Piecewise-constant test image: a blocks x blocks grid of random gray
// levels in [0.15, 0.85], size x size pixels.
Mat make_block_image(int size, int blocks, std::uint64_t seed);

Mat add_gaussian_noise(const Mat& image, double sigma, std::uint64_t seed);

}  // namespace d4l
