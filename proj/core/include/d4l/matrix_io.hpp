#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

namespace d4l {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Text matrix format: header line "rows cols", then row-major
// whitespace-separated decimals. Values are written with 17 significant
// digits so a round trip reproduces every double exactly.
void save_matrix(std::ostream& os, const Mat& m);
void save_matrix(const std::string& path, const Mat& m);
Mat load_matrix(std::istream& is);
Mat load_matrix(const std::string& path);

// Shortest exact decimal rendering used across all text outputs (17
// significant digits round-trip for IEEE doubles).
std::string format_double(double v);

}  // namespace d4l
