#pragma once

#include <vector>

#include "d4l/matrix_io.hpp"

namespace d4l {

// Sliding s x s patches of an H x W image. Column n is the column-major
// vectorization of the window at sliding position n, positions ordered
// row-major: n = r (W - s + 1) + c. Output is s^2 x (H-s+1)(W-s+1).
Mat extract_patches(const Mat& image, int patch_side);

// Averages overlapping patch estimates back into an H x W image; the exact
// right inverse of extract_patches on unmodified patches.
Mat reconstruct_from_patches(const Mat& patches, int height, int width,
                             int patch_side);

// Splits S into I contiguous equal-width column blocks, appending zero
// columns first when I does not divide N; n_i = ceil(N / I) for every shard.
std::vector<Mat> partition_data(const Mat& s, int num_agents);

}  // namespace d4l
