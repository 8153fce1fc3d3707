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

/**
 * @file state.hpp
 * Dense pure-state and density-matrix engine.
 *
 * Basis ordering is big-endian by qubit: qubit 0 is the most significant bit
 * of a basis index, so for four qubits the ket |1000⟩ (excitation on qubit 0)
 * is basis index 8. Qubit i corresponds to chain site i + 1.
 *
 * Gates and channels act on an ordered target list. Within a gate matrix the
 * first target is the most significant local bit, so a two-qubit gate on
 * targets (2, 0) is the gate on (0, 2) conjugated by SWAP.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pstlab/linalg.hpp"

namespace pstlab {

/// Normalised state vector over n qubits.
class PureState {
  public:
    /// |0…0⟩ on n qubits.
    explicit PureState(int n_qubits);
    /// Takes ownership of `amplitudes`; length must be 2^n and the norm 1
    /// within 1e-12.
    PureState(int n_qubits, Vector amplitudes);

    /// Computational basis state with the given big-endian index.
    static PureState basis(int n_qubits, std::size_t index);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(amplitudes_.size());
    }
    [[nodiscard]] const Vector &amplitudes() const noexcept {
        return amplitudes_;
    }
    Vector &mutable_amplitudes() noexcept { return amplitudes_; }
    [[nodiscard]] double norm() const { return amplitudes_.norm(); }

  private:
    int n_qubits_;
    Vector amplitudes_;
};

/// Density operator over n qubits.
class DensityMatrix {
  public:
    /// |0…0⟩⟨0…0| on n qubits.
    explicit DensityMatrix(int n_qubits);
    /// Validates shape, unit trace (1e-9) and Hermiticity (1e-12).
    DensityMatrix(int n_qubits, Matrix rho);
    /// Promotion |ψ⟩ → |ψ⟩⟨ψ|.
    explicit DensityMatrix(const PureState &psi);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(rho_.rows());
    }
    [[nodiscard]] const Matrix &matrix() const noexcept { return rho_; }
    Matrix &mutable_matrix() noexcept { return rho_; }

    [[nodiscard]] Complex trace() const { return rho_.trace(); }
    /// Smallest eigenvalue of the Hermitian part.
    [[nodiscard]] double min_eigenvalue() const;
    /// True if trace, Hermiticity and the −1e-9 eigenvalue floor all hold.
    [[nodiscard]] bool is_valid(double trace_tol = 1e-9,
                                double herm_tol = 1e-12,
                                double eig_floor = -1e-9) const;

  private:
    int n_qubits_;
    Matrix rho_;
};

/// A one- or two-qubit unitary bound to its targets.
struct UnitaryGate {
    std::string name;
    Matrix matrix;
    std::vector<int> targets;

    /// Checks arity, target distinctness and unitarity (1e-12).
    static UnitaryGate make(std::string name, Matrix matrix,
                            std::vector<int> targets);
    [[nodiscard]] int arity() const noexcept {
        return static_cast<int>(targets.size());
    }
};

/// Finite Kraus representation of a channel on `arity` qubits.
class KrausChannel {
  public:
    KrausChannel(int arity, std::vector<Matrix> ops, std::string name = {});

    /// Single Kraus operator I on `arity` qubits.
    static KrausChannel identity(int arity);

    [[nodiscard]] int arity() const noexcept { return arity_; }
    [[nodiscard]] const std::vector<Matrix> &ops() const noexcept {
        return ops_;
    }
    [[nodiscard]] const std::string &name() const noexcept { return name_; }

  private:
    int arity_;
    std::vector<Matrix> ops_;
    std::string name_;
};

struct CptpReport {
    bool ok;
    /// Frobenius norm of Σ K†K − I.
    double deviation;
};

CptpReport validate_cptp(const KrausChannel &channel, double tol = 1e-10);

/// Choi matrix Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|) with the input index most significant.
Matrix choi_matrix(const KrausChannel &channel);

void apply_unitary(PureState &psi, const UnitaryGate &gate);
void apply_unitary(DensityMatrix &rho, const UnitaryGate &gate);

/// ρ → Σ K ρ K† with the channel embedded on `targets`.
void apply_channel(DensityMatrix &rho, const KrausChannel &channel,
                   std::span<const int> targets);

/// Applies a 2^k × 2^k matrix to the target bits of every column of `m`
/// (left multiplication by the embedded operator).
void apply_left(Matrix &m, int n_qubits, const Matrix &op,
                std::span<const int> targets);
/// Right multiplication of `m` by the adjoint of the embedded operator.
void apply_right_adjoint(Matrix &m, int n_qubits, const Matrix &op,
                         std::span<const int> targets);

} // namespace pstlab
