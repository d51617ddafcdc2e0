#include "d4l/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace d4l {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_matrix(std::ostream& os, const Mat& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << format_double(m(r, c));
    }
    os << '\n';
  }
}

void save_matrix(const std::string& path, const Mat& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_matrix: cannot open " + path);
  save_matrix(f, m);
  if (!f) throw std::runtime_error("save_matrix: write failed for " + path);
}

Mat load_matrix(std::istream& is) {
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error("load_matrix: bad header");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(is >> m(r, c)))
        throw std::runtime_error("load_matrix: truncated data");
  return m;
}

Mat load_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_matrix: cannot open " + path);
  return load_matrix(f);
}

}  // namespace d4l
