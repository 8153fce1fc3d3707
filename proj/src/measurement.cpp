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

#include "pstlab/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace pstlab {

namespace {

void check_qubit(int n_qubits, int qubit) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " +
                                std::to_string(n_qubits) + " qubits");
    }
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

} // namespace

Basis parse_basis(std::string_view name) {
    if (name == "X" || name == "x") {
        return Basis::X;
    }
    if (name == "Y" || name == "y") {
        return Basis::Y;
    }
    if (name == "Z" || name == "z") {
        return Basis::Z;
    }
    throw std::invalid_argument("invalid measurement basis '" +
                                std::string(name) + "'");
}

std::string_view to_string(Basis basis) {
    switch (basis) {
    case Basis::X:
        return "X";
    case Basis::Y:
        return "Y";
    case Basis::Z:
        return "Z";
    }
    return "?";
}

double expectation_z(const DensityMatrix &rho, int qubit) {
    check_qubit(rho.n_qubits(), qubit);
    const std::size_t mask = std::size_t{1} << (rho.n_qubits() - 1 - qubit);
    double z = 0.0;
    const auto &m = rho.matrix();
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        const double pop = m(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(i))
                               .real();
        z += (i & mask) ? -pop : pop;
    }
    return z;
}

double expectation_z(const PureState &psi, int qubit) {
    check_qubit(psi.n_qubits(), qubit);
    const std::size_t mask = std::size_t{1} << (psi.n_qubits() - 1 - qubit);
    double z = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        const double pop =
            std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
        z += (i & mask) ? -pop : pop;
    }
    return z;
}

double sp_from_z(double z) { return (1.0 - std::clamp(z, -1.0, 1.0)) / 2.0; }

double basis_population(const DensityMatrix &rho, std::size_t index) {
    if (index >= rho.dim()) {
        throw std::out_of_range("basis index out of range");
    }
    const auto i = static_cast<Eigen::Index>(index);
    return rho.matrix()(i, i).real();
}

DensityMatrix partial_trace_to_qubit(const DensityMatrix &rho, int keep) {
    check_qubit(rho.n_qubits(), keep);
    const std::size_t mask = std::size_t{1} << (rho.n_qubits() - 1 - keep);
    Matrix reduced = Matrix::Zero(2, 2);
    const auto &m = rho.matrix();
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        if (i & mask) {
            continue;
        }
        const auto i0 = static_cast<Eigen::Index>(i);
        const auto i1 = static_cast<Eigen::Index>(i | mask);
        reduced(0, 0) += m(i0, i0);
        reduced(0, 1) += m(i0, i1);
        reduced(1, 0) += m(i1, i0);
        reduced(1, 1) += m(i1, i1);
    }
    // Summation order can leave a last-bit asymmetry; restore exact Hermiticity.
    reduced = 0.5 * (reduced + reduced.adjoint()).eval();
    reduced /= reduced.trace();
    return DensityMatrix(1, std::move(reduced));
}

double qubit_state_fidelity(const DensityMatrix &rho,
                            const DensityMatrix &sigma) {
    if (rho.n_qubits() != 1 || sigma.n_qubits() != 1) {
        throw std::invalid_argument("fidelity expects single-qubit states");
    }
    if (rho.min_eigenvalue() < -1e-9 || sigma.min_eigenvalue() < -1e-9) {
        throw std::invalid_argument("fidelity input is not positive semidefinite");
    }
    const double overlap = (rho.matrix() * sigma.matrix()).trace().real();
    const double det_r = rho.matrix().determinant().real();
    const double det_s = sigma.matrix().determinant().real();
    const double cross = std::sqrt(std::max(0.0, det_r * det_s));
    return std::clamp(overlap + 2.0 * cross, 0.0, 1.0);
}

double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("trace distance of mismatched dimensions");
    }
    const Matrix diff = rho.matrix() - sigma.matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.adjoint()),
                                                 Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

Matrix basis_rotation(Basis basis) {
    const double h = 1.0 / std::sqrt(2.0);
    Matrix had(2, 2);
    had << h, h, h, -h;
    switch (basis) {
    case Basis::X:
        return had;
    case Basis::Y: {
        Matrix sdg(2, 2);
        sdg << 1, 0, 0, -kI;
        return had * sdg;
    }
    case Basis::Z:
        return pauli::I();
    }
    throw std::invalid_argument("invalid measurement basis");
}

MeasurementEstimate born_probabilities(const DensityMatrix &rho, int qubit) {
    const double z = expectation_z(rho, qubit);
    const double p0 = clamp_probability((1.0 + z) / 2.0);
    return {p0, 1.0 - p0, 2.0 * p0 - 1.0};
}

MeasurementEstimate sample_from(const MeasurementEstimate &exact,
                                std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("shot count must be at least 1");
    }
    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::uint64_t> draw(shots, exact.p0);
    const auto zeros = draw(rng);
    const double p0 = static_cast<double>(zeros) / static_cast<double>(shots);
    return {p0, 1.0 - p0, 2.0 * p0 - 1.0};
}

MeasurementEstimate sample_measurement(const DensityMatrix &rho, int qubit,
                                       Basis basis,
                                       std::optional<std::uint64_t> shots,
                                       std::uint64_t seed,
                                       double readout_flip) {
    check_qubit(rho.n_qubits(), qubit);
    if (readout_flip < 0.0 || readout_flip > 1.0) {
        throw std::invalid_argument("readout flip probability outside [0, 1]");
    }
    MeasurementEstimate exact;
    if (basis == Basis::Z) {
        exact = born_probabilities(rho, qubit);
    } else {
        DensityMatrix rotated = rho;
        const std::array<int, 1> target{qubit};
        const Matrix u = basis_rotation(basis);
        apply_left(rotated.mutable_matrix(), rho.n_qubits(), u, target);
        apply_right_adjoint(rotated.mutable_matrix(), rho.n_qubits(), u,
                            target);
        exact = born_probabilities(rotated, qubit);
    }
    if (readout_flip > 0.0) {
        const double p0 = exact.p0 * (1.0 - readout_flip) +
                          exact.p1 * readout_flip;
        exact = {p0, 1.0 - p0, 2.0 * p0 - 1.0};
    }
    if (!shots) {
        return exact;
    }
    return sample_from(exact, *shots, seed);
}

} // namespace pstlab
