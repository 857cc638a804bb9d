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

// Independent dense-linear-algebra helpers used as oracles by the tests. Nothing
// here calls into the simulator's gate application code.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "qmean/statevector.hpp"

namespace qmean::testing {

using C = std::complex<double>;

/// Square dense matrix, row-major.
struct Dense {
    std::size_t dim = 0;
    std::vector<C> a;

    explicit Dense(std::size_t d = 0) : dim(d), a(d * d) {}
    static Dense identity(std::size_t d) {
        Dense m(d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }
    static Dense from(std::size_t d, std::vector<C> entries) {
        Dense m(d);
        m.a = std::move(entries);
        return m;
    }
    C &operator()(std::size_t r, std::size_t c) { return a[r * dim + c]; }
    C operator()(std::size_t r, std::size_t c) const { return a[r * dim + c]; }
};

inline Dense operator*(const Dense &x, const Dense &y) {
    Dense out(x.dim);
    for (std::size_t r = 0; r < x.dim; ++r)
        for (std::size_t k = 0; k < x.dim; ++k)
            for (std::size_t c = 0; c < x.dim; ++c) out(r, c) += x(r, k) * y(k, c);
    return out;
}

inline Dense operator+(const Dense &x, const Dense &y) {
    Dense out(x.dim);
    for (std::size_t i = 0; i < x.a.size(); ++i) out.a[i] = x.a[i] + y.a[i];
    return out;
}

inline Dense scaled(const Dense &x, C s) {
    Dense out = x;
    for (auto &v : out.a) v *= s;
    return out;
}

/// Kronecker product; `x` acts on the more significant qubits.
inline Dense kron(const Dense &x, const Dense &y) {
    Dense out(x.dim * y.dim);
    for (std::size_t r1 = 0; r1 < x.dim; ++r1)
        for (std::size_t c1 = 0; c1 < x.dim; ++c1)
            for (std::size_t r2 = 0; r2 < y.dim; ++r2)
                for (std::size_t c2 = 0; c2 < y.dim; ++c2)
                    out(r1 * y.dim + r2, c1 * y.dim + c2) = x(r1, c1) * y(r2, c2);
    return out;
}

/// Operator that applies `ops[q]` to qubit q (qubit 0 least significant).
inline Dense tensor_of(const std::vector<Dense> &ops) {
    Dense m = Dense::identity(1);
    for (std::size_t q = ops.size(); q-- > 0;) m = kron(m, ops[q]);
    return m;
}

inline Dense single(std::size_t n, std::size_t target, const Dense &g) {
    std::vector<Dense> ops(n, Dense::identity(2));
    ops[target] = g;
    return tensor_of(ops);
}

/// Controlled-U for a one-qubit U: I + (prod_c |1><1|_c) (x) (U - I).
inline Dense controlled(std::size_t n, std::size_t target, const std::vector<std::size_t> &controls,
                        const Dense &g) {
    std::vector<Dense> ops(n, Dense::identity(2));
    Dense p1(2);
    p1(1, 1) = 1.0;
    for (auto c : controls) ops[c] = p1;
    ops[target] = g + scaled(Dense::identity(2), -1.0);
    return Dense::identity(std::size_t{1} << n) + tensor_of(ops);
}

inline std::vector<C> apply(const Dense &m, const std::vector<C> &v) {
    std::vector<C> out(m.dim);
    for (std::size_t r = 0; r < m.dim; ++r)
        for (std::size_t c = 0; c < m.dim; ++c) out[r] += m(r, c) * v[c];
    return out;
}

inline Dense outer(const std::vector<C> &a, const std::vector<C> &b) {
    Dense m(a.size());
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < b.size(); ++c) m(r, c) = a[r] * std::conj(b[c]);
    return m;
}

inline Dense hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return Dense::from(2, {s, s, s, -s});
}
inline Dense pauli_x() { return Dense::from(2, {0, 1, 1, 0}); }
inline Dense pauli_z() { return Dense::from(2, {1, 0, 0, -1}); }
inline Dense rot(double t) { return Dense::from(2, {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}); }

inline std::vector<C> random_state(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<C> v(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &x : v) {
        x = C(g(rng), g(rng));
        norm += std::norm(x);
    }
    for (auto &x : v) x /= std::sqrt(norm);
    return v;
}

/// Classical DFT with the e^{-2 pi i jk/P} / sqrt(P) convention.
inline std::vector<C> dft(const std::vector<C> &a) {
    const std::size_t P = a.size();
    std::vector<C> b(P);
    for (std::size_t j = 0; j < P; ++j) {
        C acc = 0.0;
        for (std::size_t k = 0; k < P; ++k) {
            acc += std::polar(1.0, -2.0 * std::numbers::pi * double(j * k % P) / double(P)) * a[k];
        }
        b[j] = acc / std::sqrt(double(P));
    }
    return b;
}

inline double max_abs_diff(std::span<const C> a, std::span<const C> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace qmean::testing
