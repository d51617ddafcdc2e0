#pragma once

#include <string>

#include "d4l/matrix_io.hpp"

namespace d4l {

// Binary 8-bit PGM (P5, maxval <= 255). Pixels scale to [0, 1] on load;
// save clamps to [0, 1] and rounds to the nearest level.
Mat load_pgm(const std::string& path);
void save_pgm(const std::string& path, const Mat& image);

}  // namespace d4l
