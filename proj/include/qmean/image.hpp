// Copyright 2026 The qmean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Grayscale images with values in [0, 1] and binary PGM (P5) I/O.
 */

#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmean {

/// Malformed image data or dimensions.
class ImageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;  ///< row major

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, double fill = 0.0)
        : width(w), height(h), pixels(w * h, fill) {}

    double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    double &at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
};

/// Reads P5 with maxval up to 65535 (16-bit samples are big endian).
GrayImage read_pgm(std::istream &in);
/// Writes P5 with maxval 255; values are clamped to [0, 1] and rounded.
void write_pgm(std::ostream &out, const GrayImage &image);

/// File wrappers; unreadable or unwritable paths throw IoError.
GrayImage load_pgm(const std::string &path);
void save_pgm(const std::string &path, const GrayImage &image);

}  // namespace qmean
