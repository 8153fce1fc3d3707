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

#include "pstlab/noise.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <string>

namespace pstlab {

namespace {

void check_probability(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(what) +
                                    " must lie in [0, 1], got " +
                                    std::to_string(p));
    }
}

/// Drops zero-weight operators; keeps at least one.
std::vector<Matrix> prune(std::vector<Matrix> ops) {
    std::vector<Matrix> kept;
    for (auto &k : ops) {
        if (max_abs(k) > 0.0) {
            kept.push_back(std::move(k));
        }
    }
    if (kept.empty()) {
        kept.push_back(Matrix::Zero(ops.front().rows(), ops.front().cols()));
    }
    return kept;
}

KrausChannel checked(KrausChannel ch) {
    const auto report = validate_cptp(ch);
    if (!report.ok) {
        throw Error("constructed channel '" + ch.name() +
                    "' is not CPTP (deviation " +
                    std::to_string(report.deviation) + ")");
    }
    return ch;
}

bool is_xy_gate(const GateOp &op) {
    return op.gate.name.rfind("RXX", 0) == 0 || op.gate.name.rfind("RYY", 0) == 0;
}

bool is_rzz_gate(const GateOp &op) { return op.gate.name.rfind("RZZ", 0) == 0; }

} // namespace

ThermalMode parse_thermal_mode(std::string_view name) {
    if (name == "combined") return ThermalMode::Combined;
    if (name == "reset_only") return ThermalMode::ResetOnly;
    if (name == "dephase_only") return ThermalMode::DephaseOnly;
    throw std::invalid_argument("unknown thermal mode '" + std::string(name) + "'");
}

std::string_view to_string(ThermalMode mode) {
    switch (mode) {
    case ThermalMode::Combined: return "combined";
    case ThermalMode::ResetOnly: return "reset_only";
    case ThermalMode::DephaseOnly: return "dephase_only";
    }
    return "?";
}

ZZMode parse_zz_mode(std::string_view name) {
    if (name == "hamiltonian") return ZZMode::Hamiltonian;
    if (name == "dephasing_channel") return ZZMode::DephasingChannel;
    throw std::invalid_argument("unknown zz mode '" + std::string(name) + "'");
}

std::string_view to_string(ZZMode mode) {
    return mode == ZZMode::Hamiltonian ? "hamiltonian" : "dephasing_channel";
}

// ---------------------------------------------------------------------------
// Parameters

NoiseParams NoiseParams::none() {
    NoiseParams p;
    p.pauli = p.depolarizing = p.thermal = p.zz = false;
    return p;
}

void NoiseParams::validate() const {
    for (const auto &[value, name] :
         {std::pair{p_pauli, "p_pauli"}, {px, "px"}, {py, "py"}, {pz, "pz"},
          {p_zz, "p_zz"}, {readout_error, "readout_error"}}) {
        check_probability(value, name);
    }
    if (std::abs(px + py + pz - p_pauli) > 1e-12) {
        throw std::invalid_argument("px + py + pz must equal p_pauli");
    }
    if (!(q_depol >= 0.0 && q_depol <= 4.0 / 3.0)) {
        throw std::invalid_argument("q_depol must lie in [0, 4/3]");
    }
    if (!(t1 > 0.0) || !(t2 > 0.0)) {
        throw std::invalid_argument("T1 and T2 must be positive");
    }
    if (thermal_mode == ThermalMode::Combined && t2 > 2.0 * t1) {
        throw std::invalid_argument("T2 must not exceed 2 T1");
    }
    if (!(dur_1q > 0.0) || !(dur_2q > 0.0)) {
        throw std::invalid_argument("gate durations must be positive");
    }
    if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
        throw std::invalid_argument("zeta must be >= 0");
    }
}

nlohmann::json to_json(const NoiseParams &p) {
    return nlohmann::json{
        {"p_pauli", p.p_pauli},
        {"px", p.px},
        {"py", p.py},
        {"pz", p.pz},
        {"q_depol", p.q_depol},
        {"t1", p.t1},
        {"t2", p.t2},
        {"dur_1q", p.dur_1q},
        {"dur_2q", p.dur_2q},
        {"zeta", p.zeta},
        {"p_zz", p.p_zz},
        {"readout_error", p.readout_error},
        {"pauli", p.pauli},
        {"depolarizing", p.depolarizing},
        {"thermal", p.thermal},
        {"zz", p.zz},
        {"zz_mode", std::string(to_string(p.zz_mode))},
        {"thermal_mode", std::string(to_string(p.thermal_mode))},
    };
}

NoiseParams noise_params_from_json(const nlohmann::json &j) {
    if (!j.is_object()) {
        throw std::invalid_argument("noise block must be an object");
    }
    static const std::set<std::string> known = {
        "p_pauli", "px", "py", "pz", "q_depol", "t1", "t2", "dur_1q",
        "dur_2q", "zeta", "p_zz", "readout_error", "pauli", "depolarizing",
        "thermal", "zz", "zz_mode", "thermal_mode", "ideal"};
    for (const auto &[key, _] : j.items()) {
        if (!known.contains(key)) {
            throw std::invalid_argument("unknown noise key '" + key + "'");
        }
    }
    NoiseParams p;
    auto number = [&](const char *key, double &out) {
        if (!j.contains(key)) {
            return false;
        }
        if (!j.at(key).is_number()) {
            throw std::invalid_argument(std::string("noise.") + key +
                                        " must be a number");
        }
        out = j.at(key).get<double>();
        return true;
    };
    auto flag = [&](const char *key, bool &out) {
        if (!j.contains(key)) {
            return;
        }
        if (!j.at(key).is_boolean()) {
            throw std::invalid_argument(std::string("noise.") + key +
                                        " must be a boolean");
        }
        out = j.at(key).get<bool>();
    };

    const bool has_total = number("p_pauli", p.p_pauli);
    bool has_component = false;
    double px = 0.0, py = 0.0, pz = 0.0;
    has_component |= number("px", px);
    has_component |= number("py", py);
    has_component |= number("pz", pz);
    if (has_component) {
        p.px = px;
        p.py = py;
        p.pz = pz;
        if (!has_total) {
            p.p_pauli = px + py + pz;
        }
    } else {
        p.px = p.py = p.pz = p.p_pauli / 3.0;
    }
    number("q_depol", p.q_depol);
    number("t1", p.t1);
    number("t2", p.t2);
    number("dur_1q", p.dur_1q);
    number("dur_2q", p.dur_2q);
    number("zeta", p.zeta);
    number("p_zz", p.p_zz);
    number("readout_error", p.readout_error);
    flag("pauli", p.pauli);
    flag("depolarizing", p.depolarizing);
    flag("thermal", p.thermal);
    flag("zz", p.zz);
    if (j.contains("zz_mode")) {
        p.zz_mode = parse_zz_mode(j.at("zz_mode").get<std::string>());
    }
    if (j.contains("thermal_mode")) {
        p.thermal_mode =
            parse_thermal_mode(j.at("thermal_mode").get<std::string>());
    }
    bool ideal = false;
    flag("ideal", ideal);
    if (ideal) {
        p.pauli = p.depolarizing = p.thermal = p.zz = false;
    }
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// Channels

KrausChannel pauli_channel(double px, double py, double pz) {
    check_probability(px, "px");
    check_probability(py, "py");
    check_probability(pz, "pz");
    const double p = px + py + pz;
    if (p > 1.0 + 1e-15) {
        throw std::invalid_argument("Pauli probabilities sum above 1");
    }
    return checked(KrausChannel(
        1,
        prune({std::sqrt(std::max(0.0, 1.0 - p)) * pauli::I(),
               std::sqrt(px) * pauli::X(), std::sqrt(py) * pauli::Y(),
               std::sqrt(pz) * pauli::Z()}),
        "pauli"));
}

KrausChannel depolarizing_channel(double q) {
    if (!(q >= 0.0 && q <= 4.0 / 3.0)) {
        throw std::invalid_argument("depolarizing q must lie in [0, 4/3]");
    }
    const double w = std::sqrt(q / 4.0);
    return checked(KrausChannel(
        1,
        prune({std::sqrt(std::max(0.0, 1.0 - 0.75 * q)) * pauli::I(),
               w * pauli::X(), w * pauli::Y(), w * pauli::Z()}),
        "depol"));
}

KrausChannel two_qubit_tensor_channel(const KrausChannel &first,
                                      const KrausChannel &second) {
    if (first.arity() != 1 || second.arity() != 1) {
        throw std::invalid_argument("tensor channel expects single-qubit factors");
    }
    std::vector<Matrix> ops;
    ops.reserve(first.ops().size() * second.ops().size());
    for (const auto &k : first.ops()) {
        for (const auto &l : second.ops()) {
            ops.push_back(kron(k, l));
        }
    }
    const std::string name = first.name() == second.name()
                                 ? first.name() + "2"
                                 : first.name() + "x" + second.name();
    return KrausChannel(2, std::move(ops), name);
}

KrausChannel thermal_relaxation_channel(double t1, double t2, double duration,
                                        ThermalMode mode) {
    if (!(t1 > 0.0) || !(t2 > 0.0)) {
        throw std::invalid_argument("T1 and T2 must be positive");
    }
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw std::invalid_argument("gate duration must be non-negative");
    }
    const double gamma1 = -std::expm1(-duration / t1);
    switch (mode) {
    case ThermalMode::Combined: {
        if (t2 > 2.0 * t1) {
            throw std::invalid_argument("T2 > 2 T1 is unphysical");
        }
        const double rate_phi = std::max(0.0, 1.0 / t2 - 1.0 / (2.0 * t1));
        const double p_phi = -std::expm1(-duration * rate_phi) / 2.0;
        Matrix a0 = Matrix::Zero(2, 2);
        a0(0, 0) = 1.0;
        a0(1, 1) = std::sqrt(1.0 - gamma1);
        Matrix a1 = Matrix::Zero(2, 2);
        a1(0, 1) = std::sqrt(gamma1);
        const Matrix d0 = std::sqrt(1.0 - p_phi) * pauli::I();
        const Matrix d1 = std::sqrt(p_phi) * pauli::Z();
        return checked(KrausChannel(
            1, prune({a0 * d0, a0 * d1, a1 * d0, a1 * d1}), "thermal"));
    }
    case ThermalMode::ResetOnly: {
        Matrix p00 = Matrix::Zero(2, 2);
        p00(0, 0) = 1.0;
        Matrix p01 = Matrix::Zero(2, 2);
        p01(0, 1) = 1.0;
        return checked(KrausChannel(
            1,
            prune({std::sqrt(1.0 - gamma1) * pauli::I(),
                   std::sqrt(gamma1) * p00, std::sqrt(gamma1) * p01}),
            "t1reset"));
    }
    case ThermalMode::DephaseOnly: {
        const double gamma2 = std::exp(-duration / t2);
        return checked(KrausChannel(
            1,
            prune({std::sqrt(gamma2) * pauli::I(),
                   std::sqrt(1.0 - gamma2) * pauli::Z()}),
            "t2dephase"));
    }
    }
    throw std::invalid_argument("unknown thermal mode");
}

UnitaryGate zz_crosstalk_unitary(double zeta, double t, int q0, int q1) {
    const Complex minus = std::exp(-kI * (zeta * t));
    const Complex plus = std::exp(kI * (zeta * t));
    Matrix u = Matrix::Zero(4, 4);
    u(0, 0) = minus;
    u(1, 1) = plus;
    u(2, 2) = plus;
    u(3, 3) = minus;
    return UnitaryGate::make("ZZ", std::move(u), {q0, q1});
}

KrausChannel zz_dephasing_channel(double p_zz) {
    check_probability(p_zz, "p_zz");
    const Matrix zz = kron(pauli::Z(), pauli::Z());
    return checked(KrausChannel(2,
                                prune({std::sqrt(1.0 - p_zz) *
                                           Matrix::Identity(4, 4),
                                       std::sqrt(p_zz) * zz}),
                                "zzdeph"));
}

// ---------------------------------------------------------------------------
// Attachment

std::vector<AttachedChannel> single_qubit_gate_noise(const NoiseParams &p,
                                                     int qubit) {
    std::vector<AttachedChannel> out;
    if (p.pauli) {
        out.push_back({pauli_channel(p.px, p.py, p.pz), {qubit}});
    }
    if (p.thermal) {
        out.push_back(
            {thermal_relaxation_channel(p.t1, p.t2, p.dur_1q, p.thermal_mode),
             {qubit}});
    }
    return out;
}

std::vector<AttachedChannel> two_qubit_gate_noise(const NoiseParams &p, int q0,
                                                  int q1) {
    std::vector<AttachedChannel> out;
    if (p.depolarizing) {
        const auto dep = depolarizing_channel(p.q_depol);
        out.push_back({two_qubit_tensor_channel(dep, dep), {q0, q1}});
    }
    if (p.thermal) {
        const auto th =
            thermal_relaxation_channel(p.t1, p.t2, p.dur_2q, p.thermal_mode);
        out.push_back({two_qubit_tensor_channel(th, th), {q0, q1}});
    }
    if (p.zz && p.zz_mode == ZZMode::DephasingChannel) {
        out.push_back({zz_dephasing_channel(p.p_zz), {q0, q1}});
    }
    return out;
}

NoisyCircuit attach_comprehensive(const NoisyCircuit &circuit,
                                  const NoiseParams &params) {
    params.validate();
    if (circuit.has_channels()) {
        throw std::invalid_argument("circuit already carries noise channels");
    }
    NoisyCircuit out = circuit;
    if (!params.any_enabled()) {
        return out;
    }
    const bool has_rzz = circuit.count_gates("RZZ") > 0;
    if (params.zz && params.zz_mode == ZZMode::DephasingChannel && has_rzz) {
        throw std::invalid_argument(
            "ZZ crosstalk requested both as RZZ gates and as a dephasing channel");
    }

    for (auto &op : out.prep) {
        for (auto &ch : single_qubit_gate_noise(params, op.gate.targets[0])) {
            op.noise.push_back(std::move(ch));
        }
    }
    const int n = circuit.n_qubits;
    const bool add_rzz = params.zz && params.zz_mode == ZZMode::Hamiltonian &&
                         !has_rzz && params.zeta > 0.0;
    for (auto &step : out.steps) {
        for (auto &op : step) {
            if (is_xy_gate(op)) {
                op.noise = two_qubit_gate_noise(params, op.gate.targets[0],
                                                op.gate.targets[1]);
            } else if (!is_rzz_gate(op) && op.gate.arity() == 1) {
                op.noise = single_qubit_gate_noise(params, op.gate.targets[0]);
            }
        }
        if (add_rzz) {
            const double phi = 2.0 * params.zeta * circuit.plan.dt();
            for (int i = 0; i + 1 < n; ++i) {
                char label[48];
                std::snprintf(label, sizeof(label), "RZZ(%.4f)", phi);
                step.push_back(GateOp{
                    UnitaryGate::make(label, gate_matrix(GateKind::RZZ, phi),
                                      {i, i + 1}),
                    {}});
            }
        }
    }
    if (add_rzz) {
        out.zeta = params.zeta;
    }
    return out;
}

} // namespace pstlab
