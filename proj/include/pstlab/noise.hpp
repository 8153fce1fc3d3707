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
 * @file noise.hpp
 * Noise channels and the layered device noise model.
 *
 * Layering, per gate, post-gate:
 *   - two-qubit XY gates (RXX/RYY): depolarizing ⊗ depolarizing, then
 *     thermal relaxation ⊗ thermal relaxation with the two-qubit duration;
 *     in dephasing ZZ mode, a Z⊗Z dephasing channel follows.
 *   - single-qubit prep and tomography gates: Pauli channel, then thermal
 *     relaxation with the single-qubit duration.
 *   - ZZ crosstalk in Hamiltonian mode is a coherent RZZ(2 ζ dt) per bond
 *     at the end of each Trotter step, with no attached noise.
 */
#pragma once

#include <string_view>
#include <vector>

#include <json.hpp>

#include "pstlab/chain.hpp"
#include "pstlab/state.hpp"

namespace pstlab {

enum class ThermalMode {
    /// Amplitude damping composed with pure dephasing at 1/Tφ = 1/T2 − 1/(2 T1).
    Combined,
    /// Reset toward |0⟩ with γ1 = 1 − e^{−t/T1}.
    ResetOnly,
    /// Z flip with probability 1 − e^{−t/T2}.
    DephaseOnly,
};

enum class ZZMode { Hamiltonian, DephasingChannel };

ThermalMode parse_thermal_mode(std::string_view name);
std::string_view to_string(ThermalMode mode);
ZZMode parse_zz_mode(std::string_view name);
std::string_view to_string(ZZMode mode);

struct NoiseParams {
    double p_pauli = 1.875e-3;
    double px = 1.875e-3 / 3.0;
    double py = 1.875e-3 / 3.0;
    double pz = 1.875e-3 / 3.0;
    double q_depol = 2.5e-3;
    double t1 = 266.74e-6;
    double t2 = 199.97e-6;
    double dur_1q = 57e-9;
    double dur_2q = 533e-9;
    double zeta = 0.1;
    double p_zz = 0.0;
    double readout_error = 0.0;

    bool pauli = true;
    bool depolarizing = true;
    bool thermal = true;
    bool zz = true;
    ZZMode zz_mode = ZZMode::Hamiltonian;
    ThermalMode thermal_mode = ThermalMode::Combined;

    /// Every layer disabled; attaching it leaves a circuit unchanged.
    static NoiseParams none();
    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
    [[nodiscard]] bool any_enabled() const {
        return pauli || depolarizing || thermal || zz;
    }
};

nlohmann::json to_json(const NoiseParams &params);
/// Missing keys keep their defaults. Throws std::invalid_argument on
/// unknown keys, wrong types or violated invariants.
NoiseParams noise_params_from_json(const nlohmann::json &j);

KrausChannel pauli_channel(double px, double py, double pz);
/// (1 − 3q/4) ρ + (q/4)(XρX + YρY + ZρZ), 0 ≤ q ≤ 4/3.
KrausChannel depolarizing_channel(double q);
/// {K_i ⊗ L_j}; `first` acts on the first target of the pair.
KrausChannel two_qubit_tensor_channel(const KrausChannel &first,
                                      const KrausChannel &second);
KrausChannel thermal_relaxation_channel(double t1, double t2, double duration,
                                        ThermalMode mode = ThermalMode::Combined);
/// diag(e^{−iζt}, e^{iζt}, e^{iζt}, e^{−iζt}) on (q0, q1).
UnitaryGate zz_crosstalk_unitary(double zeta, double t, int q0 = 0, int q1 = 1);
/// (1 − p) ρ + p (Z⊗Z) ρ (Z⊗Z).
KrausChannel zz_dephasing_channel(double p_zz);

/// Channels attached after a single-qubit gate on `qubit`.
std::vector<AttachedChannel> single_qubit_gate_noise(const NoiseParams &params,
                                                     int qubit);
/// Channels attached after a two-qubit XY gate on (q0, q1).
std::vector<AttachedChannel> two_qubit_gate_noise(const NoiseParams &params,
                                                  int q0, int q1);

/// Returns `circuit` with the enabled noise layers attached. Throws if the
/// circuit already carries channels, or if ZZ is requested in dephasing mode
/// on a circuit that already contains coherent RZZ crosstalk.
NoisyCircuit attach_comprehensive(const NoisyCircuit &circuit,
                                  const NoiseParams &params);

} // namespace pstlab
