#include "d4l/patches.hpp"

#include <stdexcept>

namespace d4l {

Mat extract_patches(const Mat& image, int patch_side) {
  const int h = static_cast<int>(image.rows());
  const int w = static_cast<int>(image.cols());
  if (patch_side < 1 || patch_side > h || patch_side > w)
    throw std::invalid_argument("extract_patches: patch side exceeds image");
  const int ph = h - patch_side + 1;
  const int pw = w - patch_side + 1;
  Mat out(patch_side * patch_side, static_cast<Eigen::Index>(ph) * pw);
  for (int r = 0; r < ph; ++r) {
    for (int c = 0; c < pw; ++c) {
      const Eigen::Index n = static_cast<Eigen::Index>(r) * pw + c;
      for (int cc = 0; cc < patch_side; ++cc)
        for (int rr = 0; rr < patch_side; ++rr)
          out(cc * patch_side + rr, n) = image(r + rr, c + cc);
    }
  }
  return out;
}

Mat reconstruct_from_patches(const Mat& patches, int height, int width,
                             int patch_side) {
  const int ph = height - patch_side + 1;
  const int pw = width - patch_side + 1;
  if (patches.rows() != static_cast<Eigen::Index>(patch_side) * patch_side ||
      patches.cols() != static_cast<Eigen::Index>(ph) * pw)
    throw std::invalid_argument("reconstruct_from_patches: shape mismatch");
  Mat acc = Mat::Zero(height, width);
  Mat count = Mat::Zero(height, width);
  for (int r = 0; r < ph; ++r) {
    for (int c = 0; c < pw; ++c) {
      const Eigen::Index n = static_cast<Eigen::Index>(r) * pw + c;
      for (int cc = 0; cc < patch_side; ++cc) {
        for (int rr = 0; rr < patch_side; ++rr) {
          acc(r + rr, c + cc) += patches(cc * patch_side + rr, n);
          count(r + rr, c + cc) += 1.0;
        }
      }
    }
  }
  return acc.cwiseQuotient(count);
}

std::vector<Mat> partition_data(const Mat& s, int num_agents) {
  if (num_agents < 1) throw std::invalid_argument("partition_data: I >= 1");
  const Eigen::Index n = s.cols();
  const Eigen::Index per =
      (n + num_agents - 1) / num_agents;  // ceil(N / I)
  std::vector<Mat> shards;
  shards.reserve(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    Mat block = Mat::Zero(s.rows(), per);
    const Eigen::Index begin = static_cast<Eigen::Index>(i) * per;
    const Eigen::Index take = std::max<Eigen::Index>(0, std::min(per, n - begin));
    if (take > 0) block.leftCols(take) = s.middleCols(begin, take);
    shards.push_back(std::move(block));
  }
  return shards;
}

}  // namespace d4l
