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

#include "pstlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace pstlab {

// ---------------------------------------------------------------------------
// Config and series

std::vector<int> ExperimentConfig::sites_or_last() const {
    if (measured_sites.empty()) {
        return {n_sites()};
    }
    return measured_sites;
}

void ExperimentConfig::validate() const {
    for (const int s : measured_sites) {
        if (s < 1 || s > n_sites()) {
            throw std::invalid_argument("measured site " + std::to_string(s) +
                                        " outside [1, " +
                                        std::to_string(n_sites()) + "]");
        }
    }
    if (shots && *shots == 0) {
        throw std::invalid_argument("shots must be >= 1");
    }
    if (noise) {
        noise->validate();
    }
}

const std::vector<double> &SPTimeSeries::site_values(int site) const {
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] == site) {
            return values[i];
        }
    }
    throw std::out_of_range("site " + std::to_string(site) +
                            " is not part of the series");
}

const std::vector<double> &SPTimeSeries::only() const {
    if (values.size() != 1) {
        throw std::logic_error("series holds more than one site");
    }
    return values.front();
}

// ---------------------------------------------------------------------------
// Evolution

double StateView::z(int qubit) const {
    return pure_ ? expectation_z(*pure_, qubit) : expectation_z(*mixed_, qubit);
}

DensityMatrix StateView::density() const {
    return pure_ ? DensityMatrix(*pure_) : *mixed_;
}

NoisyCircuit build_experiment_circuit(const ExperimentConfig &config) {
    config.validate();
    NoisyCircuit circuit = build_trotter_circuit(config.couplings, config.plan);
    auto prepared = prepare_initial_state(config.n_sites(), config.initial);
    for (auto &gate : prepared.gates) {
        circuit.prep.push_back(GateOp{std::move(gate), {}});
    }
    if (config.noise && config.noise->any_enabled()) {
        circuit = attach_comprehensive(circuit, *config.noise);
    }
    return circuit;
}

namespace {

void apply_op(PureState &psi, const GateOp &op) { apply_unitary(psi, op.gate); }

void apply_op(DensityMatrix &rho, const GateOp &op) {
    apply_unitary(rho, op.gate);
    for (const auto &ch : op.noise) {
        apply_channel(rho, ch.channel, ch.targets);
    }
}

template <typename State>
void run_steps(State state, const NoisyCircuit &circuit,
               const std::function<void(int, const StateView &)> &observe) {
    for (const auto &op : circuit.prep) {
        apply_op(state, op);
    }
    observe(0, StateView(state));
    int k = 0;
    for (const auto &step : circuit.steps) {
        for (const auto &op : step) {
            apply_op(state, op);
        }
        observe(++k, StateView(state));
    }
}

double readout_flip(const ExperimentConfig &config) {
    return config.noise ? config.noise->readout_error : 0.0;
}

double measure_sp(const ExperimentConfig &config, const StateView &state,
                  int site, int k) {
    const double z = state.z(site - 1);
    const double p0_exact = std::clamp((1.0 + z) / 2.0, 0.0, 1.0);
    const double flip = readout_flip(config);
    const double p0 = p0_exact * (1.0 - flip) + (1.0 - p0_exact) * flip;
    MeasurementEstimate est{p0, 1.0 - p0, 2.0 * p0 - 1.0};
    if (config.shots) {
        est = sample_from(est, *config.shots,
                          derive_seed(config.seed, static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(site)));
    }
    return std::clamp(est.p1, 0.0, 1.0);
}

SPTimeSeries run_series(const ExperimentConfig &config,
                        const std::vector<int> &sites, bool projector) {
    const auto circuit = build_experiment_circuit(config);
    SPTimeSeries series;
    series.sites = sites;
    series.seed = config.seed;
    series.values.assign(sites.size(), {});
    const std::size_t target = 1; // |0…01⟩
    evolve(circuit, [&](int k, const StateView &state) {
        series.times.push_back(config.plan.time_at(k));
        for (std::size_t s = 0; s < sites.size(); ++s) {
            series.values[s].push_back(measure_sp(config, state, sites[s], k));
        }
        if (projector) {
            series.projector.push_back(
                basis_population(state.density(), target));
        }
    });
    return series;
}

} // namespace

void evolve(const NoisyCircuit &circuit,
            const std::function<void(int, const StateView &)> &observe) {
    if (circuit.has_channels()) {
        run_steps(DensityMatrix(circuit.n_qubits), circuit, observe);
    } else {
        run_steps(PureState(circuit.n_qubits), circuit, observe);
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    // splitmix64 finaliser over a simple combination.
    auto mix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    return mix(mix(mix(base) ^ a) ^ b);
}

SPTimeSeries run_sp_series(const ExperimentConfig &config) {
    if (config.initial.type != InitialKind::Type::SingleExcitation) {
        throw std::invalid_argument(
            "SP series needs a single-excitation initial state");
    }
    const bool projector =
        !config.shots && config.sites_or_last().size() == 1 &&
        config.sites_or_last().front() == config.n_sites();
    return run_series(config, config.sites_or_last(), projector);
}

SPTimeSeries run_site_resolved(const ExperimentConfig &config) {
    std::vector<int> sites(static_cast<std::size_t>(config.n_sites()));
    for (int i = 0; i < config.n_sites(); ++i) {
        sites[static_cast<std::size_t>(i)] = i + 1;
    }
    return run_series(config, sites, false);
}

// ---------------------------------------------------------------------------
// Tomography

DensityMatrix tomography_reconstruct(double x, double y, double z,
                                     double tolerance) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!std::isfinite(norm) || norm > 1.0 + tolerance) {
        throw std::invalid_argument("Bloch vector norm " + std::to_string(norm) +
                                    " exceeds 1 beyond tolerance");
    }
    if (norm > 1.0) {
        x /= norm;
        y /= norm;
        z /= norm;
    }
    Matrix rho = 0.5 * (pauli::I() + x * pauli::X() + y * pauli::Y() +
                        z * pauli::Z());
    return DensityMatrix(1, std::move(rho));
}

namespace {

DensityMatrix pure_qubit(Complex a, Complex b) {
    Vector v(2);
    v << a, b;
    v /= v.norm();
    return DensityMatrix(PureState(1, std::move(v)));
}

} // namespace

TomographyRecord run_arbitrary_transfer(const ExperimentConfig &config) {
    const auto &init = config.initial;
    if (init.type == InitialKind::Type::SingleExcitation) {
        throw std::invalid_argument(
            "arbitrary transfer needs an amplitude or |+> initial state");
    }
    if (std::abs(std::norm(init.a) + std::norm(init.b) - 1.0) > 1e-9) {
        throw std::invalid_argument("state amplitudes are not normalised");
    }
    const auto circuit = build_experiment_circuit(config);
    const int n = config.n_sites();
    const int last = n - 1;
    const bool noisy = config.noise && config.noise->any_enabled();
    const double flip = readout_flip(config);
    // Relaxation after a noisy basis change biases the rotated expectation
    // towards +1, so noisy tomography can overshoot the Bloch sphere slightly.
    const double tolerance =
        (config.shots ? 5.0 / std::sqrt(static_cast<double>(*config.shots)) : 1e-9) +
        (noisy ? 1e-2 : 0.0);

    // Basis-change gates carry the single-qubit noise layer like any other
    // single-qubit gate.
    auto rotation_ops = [&](Basis basis) {
        std::vector<GateKind> kinds;
        if (basis == Basis::X) {
            kinds = {GateKind::H};
        } else if (basis == Basis::Y) {
            kinds = {GateKind::SDG, GateKind::H};
        }
        std::vector<GateOp> ops;
        for (const auto kind : kinds) {
            GateOp op{UnitaryGate::make(std::string(to_string(kind)),
                                        gate_matrix(kind), {last}),
                      {}};
            if (noisy) {
                op.noise = single_qubit_gate_noise(*config.noise, last);
            }
            ops.push_back(std::move(op));
        }
        return ops;
    };
    const std::array<Basis, 3> bases{Basis::X, Basis::Y, Basis::Z};
    std::array<std::vector<GateOp>, 3> rotations;
    for (std::size_t i = 0; i < bases.size(); ++i) {
        rotations[i] = rotation_ops(bases[i]);
    }

    const DensityMatrix target = pure_qubit(init.a, init.b);
    TomographyRecord record{init.a, init.b, {}};
    evolve(circuit, [&](int k, const StateView &state) {
        const DensityMatrix rho = state.density();
        std::array<double, 3> ev{};
        for (std::size_t i = 0; i < bases.size(); ++i) {
            DensityMatrix rotated = rho;
            for (const auto &op : rotations[i]) {
                apply_unitary(rotated, op.gate);
                for (const auto &ch : op.noise) {
                    apply_channel(rotated, ch.channel, ch.targets);
                }
            }
            const auto est = sample_measurement(
                rotated, last, Basis::Z, config.shots,
                derive_seed(config.seed, static_cast<std::uint64_t>(k),
                            100 + i),
                flip);
            ev[i] = est.expectation;
        }
        const double t = config.plan.time_at(k);
        DensityMatrix reconstructed =
            tomography_reconstruct(ev[0], ev[1], ev[2], tolerance);
        const Complex amp =
            exact_transfer_amplitude(config.couplings, t, 1, n);
        const Complex phase =
            std::abs(amp) > 1e-12 ? amp / std::abs(amp) : Complex{1.0};
        const DensityMatrix corrected_target = pure_qubit(init.a, init.b * phase);
        record.samples.push_back(TomographySample{
            t, ev[0], ev[1], ev[2], reconstructed,
            qubit_state_fidelity(reconstructed, target),
            qubit_state_fidelity(reconstructed, corrected_target)});
    });
    return record;
}

// ---------------------------------------------------------------------------
// Peaks

double peak_prominence(const std::vector<double> &values, std::size_t index) {
    if (index >= values.size()) {
        throw std::out_of_range("peak index out of range");
    }
    const double h = values[index];
    double left_min = h;
    for (std::size_t j = index; j-- > 0;) {
        if (values[j] > h) {
            break;
        }
        left_min = std::min(left_min, values[j]);
    }
    double right_min = h;
    for (std::size_t j = index + 1; j < values.size(); ++j) {
        if (values[j] > h) {
            break;
        }
        right_min = std::min(right_min, values[j]);
    }
    return h - std::max(left_min, right_min);
}

Peak detect_first_peak(const std::vector<double> &times,
                       const std::vector<double> &values,
                       double min_prominence) {
    if (times.size() != values.size()) {
        throw std::invalid_argument("times and values differ in length");
    }
    if (values.size() < 3) {
        throw std::invalid_argument("peak detection needs at least 3 samples");
    }
    const double half = times.back() / 2.0 + 1e-12;
    for (std::size_t i = 1; i + 1 < values.size() && times[i] <= half; ++i) {
        if (!(values[i] > values[i - 1])) {
            continue;
        }
        // Plateau-aware: the run of equal values must end in a descent.
        std::size_t j = i + 1;
        while (j < values.size() && values[j] == values[i]) {
            ++j;
        }
        if (j == values.size() || values[j] > values[i]) {
            continue;
        }
        if (peak_prominence(values, i) >= min_prominence) {
            return Peak{i, times[i], values[i]};
        }
    }
    throw Error("no peak with prominence >= " + std::to_string(min_prominence) +
                " in the first half of the series");
}

Peak detect_first_peak(const SPTimeSeries &series, double min_prominence) {
    return detect_first_peak(series.times, series.only(), min_prominence);
}

} // namespace pstlab
