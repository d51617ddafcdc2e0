#include "d4l/pgm.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace d4l {

namespace {

// next whitespace-delimited token, skipping '#' comment lines
std::string next_token(std::istream& is) {
  std::string tok;
  int c;
  while ((c = is.get()) != EOF) {
    if (c == '#') {
      while ((c = is.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok += static_cast<char>(c);
  }
  return tok;
}

}  // namespace

Mat load_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_pgm: cannot open " + path);
  if (next_token(f) != "P5") throw std::runtime_error("load_pgm: not a P5 file");
  const int w = std::stoi(next_token(f));
  const int h = std::stoi(next_token(f));
  const int maxval = std::stoi(next_token(f));
  if (w < 1 || h < 1) throw std::runtime_error("load_pgm: bad dimensions");
  if (maxval < 1 || maxval > 255)
    throw std::runtime_error("load_pgm: only 8-bit maxval supported");
  // header ends after exactly one whitespace byte, already consumed
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h);
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (f.gcount() != static_cast<std::streamsize>(buf.size()))
    throw std::runtime_error("load_pgm: truncated pixel data");
  Mat img(h, w);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      img(r, c) = scale * buf[static_cast<std::size_t>(r) * w + c];
  return img;
}

void save_pgm(const std::string& path, const Mat& image) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_pgm: cannot open " + path);
  const int h = static_cast<int>(image.rows());
  const int w = static_cast<int>(image.cols());
  f << "P5\n" << w << ' ' << h << "\n255\n";
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double v = image(r, c);
      v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
      buf[static_cast<std::size_t>(r) * w + c] =
          static_cast<unsigned char>(std::lround(v * 255.0));
    }
  }
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!f) throw std::runtime_error("save_pgm: write failed for " + path);
}

}  // namespace d4l
