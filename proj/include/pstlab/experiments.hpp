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
 * @file experiments.hpp
 * Time-series experiments on the Trotterised chain.
 *
 * A series samples the grid t_k = k·T/n, k = 0 … n. Step k+1 is evolved from
 * the stored state of step k, which is identical to re-running the k+1 step
 * prefix because every layer is Markovian and measurement is not applied to
 * the carried state.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pstlab/chain.hpp"
#include "pstlab/measurement.hpp"
#include "pstlab/noise.hpp"

namespace pstlab {

struct ExperimentConfig {
    CouplingProfile couplings = pst_couplings(4, 1.0);
    TrotterPlan plan{2.0 * kPi, 80};
    /// nullopt runs the noiseless pure-state path.
    std::optional<NoiseParams> noise = NoiseParams{};
    InitialKind initial = InitialKind::single_excitation(1);
    /// 1-based; empty means the last site.
    std::vector<int> measured_sites;
    /// nullopt is exact mode (analytic expectations).
    std::optional<std::uint64_t> shots;
    std::uint64_t seed = 0;

    [[nodiscard]] int n_sites() const { return couplings.n_sites(); }
    [[nodiscard]] std::vector<int> sites_or_last() const;
    void validate() const;
};

/// Per-site success probability sampled on the Trotter grid.
struct SPTimeSeries {
    std::vector<double> times;
    std::vector<int> sites;
    /// values[s][k] is the SP of sites[s] at times[k].
    std::vector<std::vector<double>> values;
    /// Optional ⟨0…01|ρ|0…01⟩ diagnostic for single-site exact runs.
    std::vector<double> projector;
    std::string config_hash;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] const std::vector<double> &site_values(int site) const;
    /// Values of the single measured site; throws if several are present.
    [[nodiscard]] const std::vector<double> &only() const;
};

struct TomographySample {
    double t;
    double x;
    double y;
    double z;
    DensityMatrix rho;
    /// Fidelity against the raw target (A|0⟩ + B|1⟩).
    double fidelity;
    /// Fidelity against A|0⟩ + B e^{iφ(t)}|1⟩, φ the ideal transfer phase.
    double fidelity_phase_corrected;
};

struct TomographyRecord {
    Complex a;
    Complex b;
    std::vector<TomographySample> samples;
};

/// Position and value of a detected hitting-time peak.
struct Peak {
    std::size_t index;
    double t_star;
    double sp_star;
};

/// Circuit for a config: preparation gates, Trotter steps and, when noise is
/// set, the layered noise model.
NoisyCircuit build_experiment_circuit(const ExperimentConfig &config);

/// Read-only view of the evolving state handed to observers.
class StateView {
  public:
    explicit StateView(const PureState &psi) : pure_(&psi) {}
    explicit StateView(const DensityMatrix &rho) : mixed_(&rho) {}

    [[nodiscard]] double z(int qubit) const;
    [[nodiscard]] DensityMatrix density() const;
    [[nodiscard]] bool is_pure() const noexcept { return pure_ != nullptr; }

  private:
    const PureState *pure_ = nullptr;
    const DensityMatrix *mixed_ = nullptr;
};

/// Runs the circuit from |0…0⟩, calling `observe(k, state)` after the prep
/// gates (k = 0) and after every Trotter step. Uses the pure-state path when
/// the circuit carries no channels.
void evolve(const NoisyCircuit &circuit,
            const std::function<void(int, const StateView &)> &observe);

/// Mixes `base` with (a, b, c) into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

SPTimeSeries run_sp_series(const ExperimentConfig &config);
SPTimeSeries run_site_resolved(const ExperimentConfig &config);

/// ρ = ½(I + xX + yY + zZ). A Bloch norm in (1, 1 + tolerance] is rescaled
/// to 1; anything larger throws.
DensityMatrix tomography_reconstruct(double x, double y, double z,
                                     double tolerance = 1e-9);

TomographyRecord run_arbitrary_transfer(const ExperimentConfig &config);

/// First local maximum with prominence ≥ `min_prominence` and 0 < t ≤ T/2.
/// Throws pstlab::Error when none qualifies.
Peak detect_first_peak(const std::vector<double> &times,
                       const std::vector<double> &values,
                       double min_prominence = 0.05);
Peak detect_first_peak(const SPTimeSeries &series, double min_prominence = 0.05);

/// Topographic prominence of the sample at `index`.
double peak_prominence(const std::vector<double> &values, std::size_t index);

} // namespace pstlab
