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
 * @file chain.hpp
 * XY spin chain couplings, Trotter circuits and the exact single-excitation
 * reference evolution.
 *
 * One Trotter step applies, per bond (i, i+1), RXX(J_i dt) and RYY(J_i dt).
 * With the RXX/RYY matrices below this is exp(−i J_i dt (XX + YY)/2), i.e. a
 * single-excitation hopping amplitude of exactly J_i. The engineered profile
 * J_i = j0 √(i(N − i)) therefore transfers site 1 → site N perfectly at
 * t = π/(2 j0).
 */
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pstlab/state.hpp"

namespace pstlab {

/// Bond strengths J_1 … J_{N−1} of an N-site chain, in units of J0 = 1.
class CouplingProfile {
  public:
    /// All bonds must be finite and positive.
    explicit CouplingProfile(std::vector<double> couplings,
                             std::optional<double> j0 = std::nullopt);

    [[nodiscard]] int n_sites() const noexcept {
        return static_cast<int>(couplings_.size()) + 1;
    }
    [[nodiscard]] const std::vector<double> &couplings() const noexcept {
        return couplings_;
    }
    /// Uniform scale factor when the profile came from pst_couplings.
    [[nodiscard]] std::optional<double> j0() const noexcept { return j0_; }
    [[nodiscard]] bool is_mirror_symmetric(double tol = 0.0) const;
    /// Every bond multiplied by `factor`.
    [[nodiscard]] CouplingProfile scaled(double factor) const;

  private:
    std::vector<double> couplings_;
    std::optional<double> j0_;
};

/// J_i = j0 √(i(N − i)), i = 1 … N−1.
CouplingProfile pst_couplings(int n_sites, double j0);

/// Uniform Trotter discretisation of [0, total_time].
struct TrotterPlan {
    double total_time;
    int n_steps;

    TrotterPlan(double total_time, int n_steps);
    [[nodiscard]] double dt() const noexcept { return total_time / n_steps; }
    /// Grid time of step k, computed as k·T/n.
    [[nodiscard]] double time_at(int k) const noexcept {
        return total_time * k / n_steps;
    }
};

enum class GateKind { RXX, RYY, RZZ, H, SDG, X };

GateKind parse_gate_kind(std::string_view name);
std::string_view to_string(GateKind kind);

/// Matrix of a named gate. Rotation kinds use `theta`; RZZ(φ) is
/// diag(e^{−iφ/2}, e^{iφ/2}, e^{iφ/2}, e^{−iφ/2}).
Matrix gate_matrix(GateKind kind, double theta = 0.0);

/// A channel attached after a gate, acting on `targets`.
struct AttachedChannel {
    KrausChannel channel;
    std::vector<int> targets;
};

struct GateOp {
    UnitaryGate gate;
    /// Applied in order after the gate.
    std::vector<AttachedChannel> noise;
};

/// Gate schedule: preparation gates followed by identical-structure Trotter
/// steps. Measurement is not part of the circuit.
struct NoisyCircuit {
    int n_qubits;
    std::vector<GateOp> prep;
    std::vector<std::vector<GateOp>> steps;
    TrotterPlan plan;
    CouplingProfile couplings;
    double zeta = 0.0;

    [[nodiscard]] std::size_t count_gates(std::string_view name) const;
    [[nodiscard]] std::size_t count_channels() const;
    [[nodiscard]] bool has_channels() const;
};

/// Trotterised XY evolution. Per step: all RXX in ascending bond order, then
/// all RYY, then RZZ(2 ζ dt) crosstalk on every bond when ζ > 0.
NoisyCircuit build_trotter_circuit(const CouplingProfile &couplings,
                                   const TrotterPlan &plan, double zeta = 0.0);

/// Initial-state recipes.
struct InitialKind {
    enum class Type { SingleExcitation, PlusOnFirst, Amplitudes };
    Type type = Type::SingleExcitation;
    /// 1-based site for SingleExcitation.
    int site = 1;
    /// Site-1 qubit state a|0⟩ + b|1⟩ for Amplitudes.
    Complex a = 1.0;
    Complex b = 0.0;

    static InitialKind single_excitation(int site) {
        return {Type::SingleExcitation, site, 1.0, 0.0};
    }
    static InitialKind plus_on_first() {
        const double h = 1.0 / std::sqrt(2.0);
        return {Type::PlusOnFirst, 1, h, h};
    }
    static InitialKind amplitudes(Complex a, Complex b) {
        return {Type::Amplitudes, 1, a, b};
    }
};

struct PreparedState {
    PureState state;
    /// Gates that prepare `state` from |0…0⟩.
    std::vector<UnitaryGate> gates;
};

PreparedState prepare_initial_state(int n_sites, const InitialKind &kind);

/// Tridiagonal single-excitation hopping matrix with off-diagonals J_i.
RealMatrix hopping_matrix(const CouplingProfile &couplings);

/// ⟨to|e^{−iAt}|from⟩ in the single-excitation subspace (1-based sites).
Complex exact_transfer_amplitude(const CouplingProfile &couplings, double t,
                                 int from_site, int to_site);

/// |⟨N|e^{−iAt}|1⟩|² by exact diagonalisation.
double exact_sp_oracle(const CouplingProfile &couplings, double t);

/// ASCII diagram of the prep gates and the first Trotter step.
std::string render_circuit(const NoisyCircuit &circuit, bool show_noise = true);

} // namespace pstlab
