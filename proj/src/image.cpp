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

#include "qmean/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "qmean/config.hpp"

namespace qmean {

namespace {

// Header tokens are separated by whitespace; '#' comments run to end of line.
std::size_t read_header_number(std::istream &in) {
    int c = in.get();
    while (true) {
        if (c == '#') {
            while (c != '\n' && c != EOF) c = in.get();
        } else if (c != EOF && std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) throw ImageError("PGM: malformed header");
    std::size_t v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + static_cast<std::size_t>(c - '0');
        if (v > (1u << 24)) throw ImageError("PGM: header value too large");
        c = in.get();
    }
    if (c == EOF || !std::isspace(c)) throw ImageError("PGM: malformed header");
    return v;
}

}  // namespace

GrayImage read_pgm(std::istream &in) {
    char magic[2] = {0, 0};
    if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5') {
        throw ImageError("PGM: expected binary P5 magic");
    }
    const std::size_t w = read_header_number(in);
    const std::size_t h = read_header_number(in);
    const std::size_t maxval = read_header_number(in);
    if (w == 0 || h == 0) throw ImageError("PGM: empty image");
    if (maxval == 0 || maxval > 65535) throw ImageError("PGM: maxval must be in [1, 65535]");

    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(w * h * bytes);
    if (!in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
        throw ImageError("PGM: truncated pixel data");
    }
    GrayImage img(w, h);
    for (std::size_t i = 0; i < w * h; ++i) {
        const std::size_t v = bytes == 1 ? raw[i] : (std::size_t(raw[2 * i]) << 8) | raw[2 * i + 1];
        if (v > maxval) throw ImageError("PGM: sample exceeds maxval");
        img.pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return img;
}

void write_pgm(std::ostream &out, const GrayImage &image) {
    if (image.pixels.size() != image.width * image.height || image.pixels.empty()) {
        throw ImageError("PGM: image dimensions do not match pixel data");
    }
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    std::vector<unsigned char> raw(image.pixels.size());
    std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(), [](double v) {
        return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    });
    out.write(reinterpret_cast<const char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

GrayImage load_pgm(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read image '" + path + "'");
    return read_pgm(in);
}

void save_pgm(const std::string &path, const GrayImage &image) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write image '" + path + "'");
    write_pgm(out, image);
    if (!out) throw IoError("failed writing image '" + path + "'");
}

}  // namespace qmean
