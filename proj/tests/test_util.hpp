// Copyright 2026 The pstlab Authors
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

// Independent reference constructions shared by the tests. Nothing here
// calls the library's embedding kernels.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pstlab/linalg.hpp"
#include "pstlab/state.hpp"

namespace testutil {

using pstlab::Complex;
using pstlab::Matrix;
using pstlab::Vector;

inline Matrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = Complex(g(rng), g(rng));
        }
    }
    return m;
}

/// Haar-ish unitary from the QR decomposition of a Gaussian matrix.
inline Matrix random_unitary(Eigen::Index dim, std::mt19937_64 &rng) {
    Eigen::HouseholderQR<Matrix> qr(random_complex(dim, dim, rng));
    Matrix q = qr.householderQ();
    return q;
}

inline pstlab::PureState random_pure(int n, std::mt19937_64 &rng) {
    Vector v = random_complex(Eigen::Index{1} << n, 1, rng);
    v /= v.norm();
    return pstlab::PureState(n, std::move(v));
}

/// Random full-rank mixed state G G† / tr(G G†).
inline pstlab::DensityMatrix random_density(int n, std::mt19937_64 &rng) {
    const Eigen::Index d = Eigen::Index{1} << n;
    const Matrix g = random_complex(d, d, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return pstlab::DensityMatrix(n, std::move(rho));
}

/// Full 2^n operator for `u` acting on `targets` (first target = most
/// significant bit of u), built entry by entry from bit patterns.
inline Matrix embed_brute_force(const Matrix &u, const std::vector<int> &targets, int n) {
    const std::size_t dim = std::size_t{1} << n;
    const int k = static_cast<int>(targets.size());
    auto bit = [n](std::size_t index, int qubit) {
        return (index >> (n - 1 - qubit)) & 1U;
    };
    Matrix full = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t out = 0; out < dim; ++out) {
        for (std::size_t in = 0; in < dim; ++in) {
            bool others_match = true;
            for (int q = 0; q < n; ++q) {
                bool is_target = false;
                for (const int t : targets) {
                    is_target |= (t == q);
                }
                if (!is_target && bit(out, q) != bit(in, q)) {
                    others_match = false;
                }
            }
            if (!others_match) {
                continue;
            }
            std::size_t so = 0;
            std::size_t si = 0;
            for (int j = 0; j < k; ++j) {
                so = (so << 1) | bit(out, targets[static_cast<std::size_t>(j)]);
                si = (si << 1) | bit(in, targets[static_cast<std::size_t>(j)]);
            }
            full(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)) =
                u(static_cast<Eigen::Index>(so), static_cast<Eigen::Index>(si));
        }
    }
    return full;
}

/// Σ K ρ K† with every Kraus operator embedded by brute force.
inline Matrix apply_kraus_brute_force(const Matrix &rho, const std::vector<Matrix> &ops,
                                      const std::vector<int> &targets, int n) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto &k : ops) {
        const Matrix full = embed_brute_force(k, targets, n);
        out += full * rho * full.adjoint();
    }
    return out;
}

/// Single-qubit density matrix from a Bloch vector.
inline Matrix bloch(double x, double y, double z) {
    return 0.5 * (pstlab::pauli::I() + x * pstlab::pauli::X() + y * pstlab::pauli::Y() +
                  z * pstlab::pauli::Z());
}

} // namespace testutil
