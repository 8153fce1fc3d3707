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

#include "pstlab/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace pstlab {

namespace {

constexpr int kMaxQubits = 14;

void check_qubit_count(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in [1, " +
                                    std::to_string(kMaxQubits) + "], got " +
                                    std::to_string(n_qubits));
    }
}

std::size_t dim_of(int n_qubits) { return std::size_t{1} << n_qubits; }

void check_targets(int n_qubits, std::span<const int> targets,
                   Eigen::Index op_dim) {
    if (targets.empty()) {
        throw std::invalid_argument("empty target list");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= n_qubits) {
            throw std::out_of_range("target qubit " +
                                    std::to_string(targets[i]) +
                                    " out of range for " +
                                    std::to_string(n_qubits) + " qubits");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (targets[i] == targets[j]) {
                throw std::invalid_argument("duplicate target qubit " +
                                            std::to_string(targets[i]));
            }
        }
    }
    if (op_dim != (Eigen::Index{1} << targets.size())) {
        throw std::invalid_argument(
            "operator dimension does not match target count");
    }
}

/// Index layout for applying a local operator: the base indices (all target
/// bits zero) and the offset of every local basis state.
struct Embedding {
    std::vector<std::size_t> bases;
    std::vector<std::size_t> offsets;
};

Embedding make_embedding(int n_qubits, std::span<const int> targets) {
    const auto k = targets.size();
    std::size_t target_mask = 0;
    std::vector<std::size_t> masks(k);
    for (std::size_t j = 0; j < k; ++j) {
        masks[j] = std::size_t{1} << (n_qubits - 1 - targets[j]);
        target_mask |= masks[j];
    }
    Embedding e;
    e.offsets.resize(std::size_t{1} << k);
    for (std::size_t a = 0; a < e.offsets.size(); ++a) {
        std::size_t off = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if ((a >> (k - 1 - j)) & 1U) {
                off |= masks[j];
            }
        }
        e.offsets[a] = off;
    }
    const auto dim = dim_of(n_qubits);
    e.bases.reserve(dim >> k);
    for (std::size_t b = 0; b < dim; ++b) {
        if ((b & target_mask) == 0) {
            e.bases.push_back(b);
        }
    }
    return e;
}

} // namespace

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(int n_qubits) : n_qubits_(n_qubits) {
    check_qubit_count(n_qubits);
    amplitudes_ = Vector::Zero(static_cast<Eigen::Index>(dim_of(n_qubits)));
    amplitudes_(0) = 1.0;
}

PureState::PureState(int n_qubits, Vector amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    check_qubit_count(n_qubits);
    if (static_cast<std::size_t>(amplitudes_.size()) != dim_of(n_qubits)) {
        throw std::invalid_argument("amplitude vector length must be 2^n");
    }
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > 1e-12) {
        throw std::invalid_argument("state vector is not normalised");
    }
}

PureState PureState::basis(int n_qubits, std::size_t index) {
    PureState psi(n_qubits);
    if (index >= psi.dim()) {
        throw std::out_of_range("basis index out of range");
    }
    psi.amplitudes_.setZero();
    psi.amplitudes_(static_cast<Eigen::Index>(index)) = 1.0;
    return psi;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits) {
    check_qubit_count(n_qubits);
    const auto d = static_cast<Eigen::Index>(dim_of(n_qubits));
    rho_ = Matrix::Zero(d, d);
    rho_(0, 0) = 1.0;
}

DensityMatrix::DensityMatrix(int n_qubits, Matrix rho)
    : n_qubits_(n_qubits), rho_(std::move(rho)) {
    check_qubit_count(n_qubits);
    const auto d = static_cast<Eigen::Index>(dim_of(n_qubits));
    if (rho_.rows() != d || rho_.cols() != d) {
        throw std::invalid_argument("density matrix must be 2^n x 2^n");
    }
    if (std::abs(rho_.trace() - Complex{1.0}) > 1e-9) {
        throw std::invalid_argument("density matrix trace differs from 1");
    }
    if (max_abs(rho_ - rho_.adjoint()) > 1e-12) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
}

DensityMatrix::DensityMatrix(const PureState &psi)
    : n_qubits_(psi.n_qubits()),
      rho_(psi.amplitudes() * psi.amplitudes().adjoint()) {}

double DensityMatrix::min_eigenvalue() const {
    const Matrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm,
                                                 Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool DensityMatrix::is_valid(double trace_tol, double herm_tol,
                             double eig_floor) const {
    return std::abs(rho_.trace() - Complex{1.0}) <= trace_tol &&
           max_abs(rho_ - rho_.adjoint()) <= herm_tol &&
           min_eigenvalue() >= eig_floor;
}

// ---------------------------------------------------------------------------
// Gates and channels

UnitaryGate UnitaryGate::make(std::string name, Matrix matrix,
                              std::vector<int> targets) {
    if (targets.size() != 1 && targets.size() != 2) {
        throw std::invalid_argument("gate arity must be 1 or 2");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0) {
            throw std::out_of_range("negative target qubit");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (targets[i] == targets[j]) {
                throw std::invalid_argument("duplicate target qubit");
            }
        }
    }
    if (matrix.rows() != (Eigen::Index{1} << targets.size())) {
        throw std::invalid_argument(name + ": matrix size does not match arity");
    }
    if (!is_unitary(matrix)) {
        throw std::invalid_argument(name + ": matrix is not unitary");
    }
    return UnitaryGate{std::move(name), std::move(matrix), std::move(targets)};
}

KrausChannel::KrausChannel(int arity, std::vector<Matrix> ops,
                           std::string name)
    : arity_(arity), ops_(std::move(ops)), name_(std::move(name)) {
    if (arity < 1) {
        throw std::invalid_argument("channel arity must be positive");
    }
    if (ops_.empty()) {
        throw std::invalid_argument("channel needs at least one Kraus operator");
    }
    const Eigen::Index d = Eigen::Index{1} << arity;
    for (const auto &k : ops_) {
        if (k.rows() != d || k.cols() != d) {
            throw std::invalid_argument(
                "Kraus operator shape does not match channel arity");
        }
    }
}

KrausChannel KrausChannel::identity(int arity) {
    const Eigen::Index d = Eigen::Index{1} << arity;
    return KrausChannel(arity, {Matrix::Identity(d, d)}, "identity");
}

CptpReport validate_cptp(const KrausChannel &channel, double tol) {
    const Eigen::Index d = Eigen::Index{1} << channel.arity();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto &k : channel.ops()) {
        sum += k.adjoint() * k;
    }
    const double dev = (sum - Matrix::Identity(d, d)).norm();
    return CptpReport{dev <= tol, dev};
}

Matrix choi_matrix(const KrausChannel &channel) {
    const Eigen::Index d = Eigen::Index{1} << channel.arity();
    Matrix choi = Matrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            Matrix unit = Matrix::Zero(d, d);
            unit(i, j) = 1.0;
            Matrix image = Matrix::Zero(d, d);
            for (const auto &k : channel.ops()) {
                image += k * unit * k.adjoint();
            }
            choi.block(i * d, j * d, d, d) = image;
        }
    }
    return choi;
}

// ---------------------------------------------------------------------------
// Application kernels

void apply_left(Matrix &m, int n_qubits, const Matrix &op,
                std::span<const int> targets) {
    check_targets(n_qubits, targets, op.rows());
    const auto emb = make_embedding(n_qubits, targets);
    const auto local = emb.offsets.size();
    std::vector<Complex> in(local);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (const auto base : emb.bases) {
            for (std::size_t a = 0; a < local; ++a) {
                in[a] = m(static_cast<Eigen::Index>(base + emb.offsets[a]), c);
            }
            for (std::size_t a = 0; a < local; ++a) {
                Complex acc = 0.0;
                for (std::size_t b = 0; b < local; ++b) {
                    acc += op(static_cast<Eigen::Index>(a),
                              static_cast<Eigen::Index>(b)) *
                           in[b];
                }
                m(static_cast<Eigen::Index>(base + emb.offsets[a]), c) = acc;
            }
        }
    }
}

void apply_right_adjoint(Matrix &m, int n_qubits, const Matrix &op,
                         std::span<const int> targets) {
    check_targets(n_qubits, targets, op.rows());
    const auto emb = make_embedding(n_qubits, targets);
    const auto local = emb.offsets.size();
    std::vector<Complex> in(local);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (const auto base : emb.bases) {
            for (std::size_t a = 0; a < local; ++a) {
                in[a] = m(r, static_cast<Eigen::Index>(base + emb.offsets[a]));
            }
            for (std::size_t a = 0; a < local; ++a) {
                Complex acc = 0.0;
                for (std::size_t b = 0; b < local; ++b) {
                    acc += std::conj(op(static_cast<Eigen::Index>(a),
                                        static_cast<Eigen::Index>(b))) *
                           in[b];
                }
                m(r, static_cast<Eigen::Index>(base + emb.offsets[a])) = acc;
            }
        }
    }
}

void apply_unitary(PureState &psi, const UnitaryGate &gate) {
    if (!is_unitary(gate.matrix)) {
        throw std::invalid_argument(gate.name + ": matrix is not unitary");
    }
    Matrix column = psi.amplitudes();
    apply_left(column, psi.n_qubits(), gate.matrix, gate.targets);
    psi.mutable_amplitudes() = column.col(0);
}

void apply_unitary(DensityMatrix &rho, const UnitaryGate &gate) {
    if (!is_unitary(gate.matrix)) {
        throw std::invalid_argument(gate.name + ": matrix is not unitary");
    }
    auto &m = rho.mutable_matrix();
    apply_left(m, rho.n_qubits(), gate.matrix, gate.targets);
    apply_right_adjoint(m, rho.n_qubits(), gate.matrix, gate.targets);
}

void apply_channel(DensityMatrix &rho, const KrausChannel &channel,
                   std::span<const int> targets) {
    if (static_cast<int>(targets.size()) != channel.arity()) {
        throw std::invalid_argument("channel arity does not match targets");
    }
    const auto report = validate_cptp(channel);
    if (!report.ok) {
        throw std::invalid_argument(
            "channel '" + channel.name() +
            "' is not trace preserving (deviation " +
            std::to_string(report.deviation) + ")");
    }
    const Matrix &src = rho.matrix();
    if (channel.ops().size() == 1) {
        Matrix out = src;
        apply_left(out, rho.n_qubits(), channel.ops()[0], targets);
        apply_right_adjoint(out, rho.n_qubits(), channel.ops()[0], targets);
        rho.mutable_matrix() = std::move(out);
        return;
    }
    Matrix acc = Matrix::Zero(src.rows(), src.cols());
    Matrix term;
    for (const auto &k : channel.ops()) {
        term = src;
        apply_left(term, rho.n_qubits(), k, targets);
        apply_right_adjoint(term, rho.n_qubits(), k, targets);
        acc += term;
    }
    rho.mutable_matrix() = std::move(acc);
}

} // namespace pstlab
