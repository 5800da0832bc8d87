// Copyright 2026 The gaf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaf/image.hpp"

namespace gaf {

namespace detail {

inline int pgm_read_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comments, then reads one unsigned decimal.
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (!std::isspace(ch)) {
      break;
    }
    ch = in.get();
  }
  if (ch == EOF || !std::isdigit(ch))
    throw std::runtime_error(path + ": malformed PGM header");
  long value = 0;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    if (value > 1 << 30) throw std::runtime_error(path + ": malformed PGM header");
    ch = in.get();
  }
  return static_cast<int>(value);
}

}  // namespace detail

/// Reads a binary PGM ("P5") file. Bytes are copied to floating point as-is,
/// no rescaling. Only maxval <= 255 (8-bit) files are supported.
template <typename Scalar = double>
Image<Scalar> load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error(path + ": unsupported magic (binary PGM \"P5\" expected)");

  const int w = detail::pgm_read_token(in, path);
  const int h = detail::pgm_read_token(in, path);
  const int maxval = detail::pgm_read_token(in, path);
  if (w < 1 || h < 1) throw std::runtime_error(path + ": invalid image dimensions");
  if (maxval > 255)
    throw std::runtime_error(path + ": unsupported bit depth (maxval > 255)");

  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size())
    throw std::runtime_error(path + ": unexpected end of data");

  Image<Scalar> img(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img(y, x) = static_cast<Scalar>(bytes[static_cast<std::size_t>(y) * w + x]);
  return img;
}

/// Writes a binary PGM with maxval 255. Intensities are clamped to [0, 255]
/// and rounded half away from zero.
template <typename Scalar>
void save_pgm(const Image<Scalar>& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");

  const int w = image_width(img);
  const int h = image_height(img);
  out << "P5\n" << w << " " << h << "\n255\n";

  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double v = std::clamp(static_cast<double>(img(y, x)), 0.0, 255.0);
      bytes[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::llround(v));
    }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace gaf
