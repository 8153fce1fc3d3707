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

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "pstlab/state.hpp"

namespace pstlab {

enum class Basis { X, Y, Z };

Basis parse_basis(std::string_view name);
std::string_view to_string(Basis basis);

/// tr(ρ Z_q).
double expectation_z(const DensityMatrix &rho, int qubit);
double expectation_z(const PureState &psi, int qubit);

/// Excitation probability (1 − z)/2, with z clamped to [−1, 1].
double sp_from_z(double z);

/// Population of the computational basis state `index`, ⟨index|ρ|index⟩.
double basis_population(const DensityMatrix &rho, std::size_t index);

/// Reduced single-qubit state of `keep`.
DensityMatrix partial_trace_to_qubit(const DensityMatrix &rho, int keep);

/// Uhlmann fidelity of two single-qubit states via the closed form
/// tr(ρσ) + 2√(det ρ · det σ).
double qubit_state_fidelity(const DensityMatrix &rho, const DensityMatrix &sigma);

/// ½ ‖ρ − σ‖₁.
double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma);

/// Basis-change gate applied before a computational-basis readout:
/// H for X, H·S† for Y, identity for Z.
Matrix basis_rotation(Basis basis);

struct MeasurementEstimate {
    double p0;
    double p1;
    /// p0 − p1.
    double expectation;
};

/// Measures `qubit` in `basis`. `shots == nullopt` returns the exact Born
/// probabilities; otherwise the outcome counts are drawn from a binomial
/// distribution seeded by `seed`. `readout_flip` is a symmetric classical
/// bit-flip probability applied to the outcome distribution.
MeasurementEstimate sample_measurement(const DensityMatrix &rho, int qubit,
                                       Basis basis,
                                       std::optional<std::uint64_t> shots,
                                       std::uint64_t seed,
                                       double readout_flip = 0.0);

/// Exact-mode helper that skips the basis rotation bookkeeping.
MeasurementEstimate born_probabilities(const DensityMatrix &rho, int qubit);

/// Draws a binomial estimate from exact probabilities.
MeasurementEstimate sample_from(const MeasurementEstimate &exact,
                                std::uint64_t shots, std::uint64_t seed);

} // namespace pstlab
