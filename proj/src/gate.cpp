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

#include "qmean/gate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmean {

GateMatrix::GateMatrix(std::size_t arity, std::vector<Amplitude> entries, Unchecked)
    : arity_(arity), entries_(std::move(entries)) {}

GateMatrix::GateMatrix(std::size_t arity, std::vector<Amplitude> entries)
    : arity_(arity), entries_(std::move(entries)) {
    if (arity_ == 0 || arity_ > 8) {
        throw std::invalid_argument("GateMatrix: arity must be in [1, 8]");
    }
    if (entries_.size() != dimension() * dimension()) {
        throw std::invalid_argument("GateMatrix: entry count does not match arity");
    }
    if (unitarity_error() > kUnitaryTolerance) {
        throw std::invalid_argument("GateMatrix: matrix is not unitary");
    }
}

GateMatrix GateMatrix::identity(std::size_t arity) {
    const std::size_t dim = std::size_t{1} << arity;
    std::vector<Amplitude> e(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        e[i * dim + i] = 1.0;
    }
    return GateMatrix(arity, std::move(e));
}

GateMatrix GateMatrix::hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return GateMatrix(1, {s, s, s, -s});
}

GateMatrix GateMatrix::pauli_x() { return GateMatrix(1, {0.0, 1.0, 1.0, 0.0}); }

GateMatrix GateMatrix::pauli_y() {
    return GateMatrix(1, {0.0, Amplitude(0, -1), Amplitude(0, 1), 0.0});
}

GateMatrix GateMatrix::pauli_z() { return GateMatrix(1, {1.0, 0.0, 0.0, -1.0}); }

GateMatrix GateMatrix::rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // Columns are the images of |0> and |1>.
    return GateMatrix(1, {c, -s, s, c});
}

GateMatrix GateMatrix::phase(double phi) {
    return GateMatrix(1, {1.0, 0.0, 0.0, std::polar(1.0, phi)});
}

GateMatrix GateMatrix::swap() {
    return GateMatrix(2, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1});
}

GateMatrix GateMatrix::adjoint() const {
    const std::size_t dim = dimension();
    std::vector<Amplitude> e(dim * dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            e[c * dim + r] = std::conj(entries_[r * dim + c]);
        }
    }
    return GateMatrix(arity_, std::move(e), Unchecked{});
}

GateMatrix GateMatrix::operator*(const GateMatrix &rhs) const {
    if (rhs.arity_ != arity_) {
        throw std::invalid_argument("GateMatrix: arity mismatch in product");
    }
    const std::size_t dim = dimension();
    std::vector<Amplitude> e(dim * dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t k = 0; k < dim; ++k) {
            const Amplitude a = entries_[r * dim + k];
            for (std::size_t c = 0; c < dim; ++c) {
                e[r * dim + c] += a * rhs.entries_[k * dim + c];
            }
        }
    }
    return GateMatrix(arity_, std::move(e), Unchecked{});
}

double GateMatrix::unitarity_error() const {
    const std::size_t dim = dimension();
    double worst = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            Amplitude acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                acc += entries_[r * dim + k] * std::conj(entries_[c * dim + k]);
            }
            const Amplitude expected = (r == c) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(acc - expected));
        }
    }
    return worst;
}

}  // namespace qmean
