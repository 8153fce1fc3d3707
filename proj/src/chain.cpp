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

#include "pstlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace pstlab {

// ---------------------------------------------------------------------------
// Couplings and plans

CouplingProfile::CouplingProfile(std::vector<double> couplings,
                                 std::optional<double> j0)
    : couplings_(std::move(couplings)), j0_(j0) {
    if (couplings_.empty()) {
        throw std::invalid_argument("a chain needs at least two sites");
    }
    for (const double j : couplings_) {
        if (!std::isfinite(j) || j <= 0.0) {
            throw std::invalid_argument("couplings must be finite and positive");
        }
    }
}

bool CouplingProfile::is_mirror_symmetric(double tol) const {
    const auto n = couplings_.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        if (std::abs(couplings_[i] - couplings_[n - 1 - i]) > tol) {
            return false;
        }
    }
    return true;
}

CouplingProfile CouplingProfile::scaled(double factor) const {
    std::vector<double> out = couplings_;
    for (auto &j : out) {
        j *= factor;
    }
    std::optional<double> j0;
    if (j0_) {
        j0 = *j0_ * factor;
    }
    return CouplingProfile(std::move(out), j0);
}

CouplingProfile pst_couplings(int n_sites, double j0) {
    if (n_sites < 2) {
        throw std::invalid_argument("PST couplings need N >= 2");
    }
    if (!(j0 > 0.0) || !std::isfinite(j0)) {
        throw std::invalid_argument("j0 must be positive");
    }
    std::vector<double> j(static_cast<std::size_t>(n_sites - 1));
    for (int i = 1; i < n_sites; ++i) {
        j[static_cast<std::size_t>(i - 1)] =
            j0 * std::sqrt(static_cast<double>(i * (n_sites - i)));
    }
    // i(N−i) is symmetric, so the mirror property is exact by construction.
    return CouplingProfile(std::move(j), j0);
}

TrotterPlan::TrotterPlan(double total_time_, int n_steps_)
    : total_time(total_time_), n_steps(n_steps_) {
    if (!(total_time > 0.0) || !std::isfinite(total_time)) {
        throw std::invalid_argument("total time must be positive");
    }
    if (n_steps < 1) {
        throw std::invalid_argument("Trotter plan needs at least one step");
    }
}

// ---------------------------------------------------------------------------
// Gates

GateKind parse_gate_kind(std::string_view name) {
    if (name == "RXX") return GateKind::RXX;
    if (name == "RYY") return GateKind::RYY;
    if (name == "RZZ") return GateKind::RZZ;
    if (name == "H") return GateKind::H;
    if (name == "SDG") return GateKind::SDG;
    if (name == "X") return GateKind::X;
    throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::RXX: return "RXX";
    case GateKind::RYY: return "RYY";
    case GateKind::RZZ: return "RZZ";
    case GateKind::H: return "H";
    case GateKind::SDG: return "SDG";
    case GateKind::X: return "X";
    }
    return "?";
}

Matrix gate_matrix(GateKind kind, double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("gate angle must be finite");
    }
    const double c = std::cos(theta / 2.0);
    const Complex is = kI * std::sin(theta / 2.0);
    switch (kind) {
    case GateKind::RXX: {
        Matrix m(4, 4);
        m << c, 0, 0, -is,
             0, c, -is, 0,
             0, -is, c, 0,
             -is, 0, 0, c;
        return m;
    }
    case GateKind::RYY: {
        Matrix m(4, 4);
        m << c, 0, 0, is,
             0, c, -is, 0,
             0, -is, c, 0,
             is, 0, 0, c;
        return m;
    }
    case GateKind::RZZ: {
        const Complex minus = std::exp(-kI * (theta / 2.0));
        const Complex plus = std::exp(kI * (theta / 2.0));
        Matrix m = Matrix::Zero(4, 4);
        m(0, 0) = minus;
        m(1, 1) = plus;
        m(2, 2) = plus;
        m(3, 3) = minus;
        return m;
    }
    case GateKind::H: {
        const double h = 1.0 / std::sqrt(2.0);
        Matrix m(2, 2);
        m << h, h, h, -h;
        return m;
    }
    case GateKind::SDG: {
        Matrix m(2, 2);
        m << 1, 0, 0, -kI;
        return m;
    }
    case GateKind::X:
        return pauli::X();
    }
    throw std::invalid_argument("unknown gate kind");
}

namespace {

UnitaryGate rotation(GateKind kind, double theta, int q0, int q1) {
    char label[48];
    std::snprintf(label, sizeof(label), "%s(%.4f)",
                  std::string(to_string(kind)).c_str(), theta);
    return UnitaryGate::make(label, gate_matrix(kind, theta), {q0, q1});
}

} // namespace

// ---------------------------------------------------------------------------
// Circuits

std::size_t NoisyCircuit::count_gates(std::string_view name) const {
    std::size_t count = 0;
    auto matches = [&](const GateOp &op) {
        return op.gate.name.rfind(name, 0) == 0;
    };
    for (const auto &op : prep) {
        count += matches(op) ? 1 : 0;
    }
    for (const auto &step : steps) {
        for (const auto &op : step) {
            count += matches(op) ? 1 : 0;
        }
    }
    return count;
}

std::size_t NoisyCircuit::count_channels() const {
    std::size_t count = 0;
    for (const auto &op : prep) {
        count += op.noise.size();
    }
    for (const auto &step : steps) {
        for (const auto &op : step) {
            count += op.noise.size();
        }
    }
    return count;
}

bool NoisyCircuit::has_channels() const { return count_channels() > 0; }

NoisyCircuit build_trotter_circuit(const CouplingProfile &couplings,
                                   const TrotterPlan &plan, double zeta) {
    if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
        throw std::invalid_argument("crosstalk strength must be >= 0");
    }
    const int n = couplings.n_sites();
    const double dt = plan.dt();
    std::vector<GateOp> step;
    step.reserve(static_cast<std::size_t>(3 * (n - 1)));
    for (const GateKind kind : {GateKind::RXX, GateKind::RYY}) {
        for (int i = 0; i < n - 1; ++i) {
            const double theta = couplings.couplings()[static_cast<std::size_t>(i)] * dt;
            step.push_back(GateOp{rotation(kind, theta, i, i + 1), {}});
        }
    }
    if (zeta > 0.0) {
        for (int i = 0; i < n - 1; ++i) {
            step.push_back(
                GateOp{rotation(GateKind::RZZ, 2.0 * zeta * dt, i, i + 1), {}});
        }
    }
    NoisyCircuit circuit{n, {}, {}, plan, couplings, zeta};
    circuit.steps.assign(static_cast<std::size_t>(plan.n_steps), step);
    return circuit;
}

PreparedState prepare_initial_state(int n_sites, const InitialKind &kind) {
    if (n_sites < 1) {
        throw std::invalid_argument("need at least one site");
    }
    const std::size_t dim = std::size_t{1} << n_sites;
    const std::size_t first = dim >> 1; // bit of qubit 0
    switch (kind.type) {
    case InitialKind::Type::SingleExcitation: {
        if (kind.site < 1 || kind.site > n_sites) {
            throw std::out_of_range("excitation site " +
                                    std::to_string(kind.site) +
                                    " outside [1, " + std::to_string(n_sites) +
                                    "]");
        }
        const int q = kind.site - 1;
        return {PureState::basis(n_sites, std::size_t{1} << (n_sites - 1 - q)),
                {UnitaryGate::make("X", gate_matrix(GateKind::X), {q})}};
    }
    case InitialKind::Type::PlusOnFirst: {
        Vector amps = Vector::Zero(static_cast<Eigen::Index>(dim));
        const double h = 1.0 / std::sqrt(2.0);
        amps(0) = h;
        amps(static_cast<Eigen::Index>(first)) = h;
        return {PureState(n_sites, std::move(amps)),
                {UnitaryGate::make("H", gate_matrix(GateKind::H), {0})}};
    }
    case InitialKind::Type::Amplitudes: {
        const double norm = std::norm(kind.a) + std::norm(kind.b);
        if (std::abs(norm - 1.0) > 1e-9) {
            throw std::invalid_argument("state amplitudes are not normalised");
        }
        Vector amps = Vector::Zero(static_cast<Eigen::Index>(dim));
        amps(0) = kind.a;
        amps(static_cast<Eigen::Index>(first)) = kind.b;
        amps /= amps.norm();
        Matrix u(2, 2);
        u << kind.a, -std::conj(kind.b), kind.b, std::conj(kind.a);
        u /= std::sqrt(norm);
        return {PureState(n_sites, std::move(amps)),
                {UnitaryGate::make("U", u, {0})}};
    }
    }
    throw std::invalid_argument("unknown initial state kind");
}

// ---------------------------------------------------------------------------
// Exact reference

RealMatrix hopping_matrix(const CouplingProfile &couplings) {
    const int n = couplings.n_sites();
    RealMatrix a = RealMatrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = couplings.couplings()[static_cast<std::size_t>(i)];
        a(i + 1, i) = a(i, i + 1);
    }
    return a;
}

Complex exact_transfer_amplitude(const CouplingProfile &couplings, double t,
                                 int from_site, int to_site) {
    const int n = couplings.n_sites();
    if (from_site < 1 || from_site > n || to_site < 1 || to_site > n) {
        throw std::out_of_range("site index outside the chain");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(hopping_matrix(couplings));
    const auto &vals = solver.eigenvalues();
    const auto &vecs = solver.eigenvectors();
    Complex amp = 0.0;
    for (int k = 0; k < n; ++k) {
        amp += vecs(to_site - 1, k) * vecs(from_site - 1, k) *
               std::exp(-kI * (vals(k) * t));
    }
    return amp;
}

double exact_sp_oracle(const CouplingProfile &couplings, double t) {
    if (t < 0.0) {
        throw std::invalid_argument("time must be non-negative");
    }
    return std::norm(
        exact_transfer_amplitude(couplings, t, 1, couplings.n_sites()));
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_circuit(const NoisyCircuit &circuit, bool show_noise) {
    const int n = circuit.n_qubits;
    std::vector<std::string> rows(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        rows[static_cast<std::size_t>(q)] = "q" + std::to_string(q) + ": ";
    }
    auto column = [&](const std::string &label, const std::vector<int> &targets) {
        const int lo = *std::min_element(targets.begin(), targets.end());
        const int hi = *std::max_element(targets.begin(), targets.end());
        const std::size_t width = label.size() + 2;
        for (int q = 0; q < n; ++q) {
            auto &row = rows[static_cast<std::size_t>(q)];
            const bool hit =
                std::find(targets.begin(), targets.end(), q) != targets.end();
            if (hit) {
                row += "[" + label + "]";
            } else if (q > lo && q < hi) {
                std::string cell(width, '-');
                cell[width / 2] = '|';
                row += cell;
            } else {
                row += std::string(width, '-');
            }
            row += "-";
        }
    };
    auto emit = [&](const GateOp &op) {
        column(op.gate.name, op.gate.targets);
        if (!show_noise) {
            return;
        }
        for (const auto &ch : op.noise) {
            column("~" + ch.channel.name(), ch.targets);
        }
    };
    for (const auto &op : circuit.prep) {
        emit(op);
    }
    if (!circuit.steps.empty()) {
        for (const auto &op : circuit.steps.front()) {
            emit(op);
        }
    }
    std::ostringstream out;
    out << "# " << circuit.steps.size() << " Trotter steps, dt = "
        << circuit.plan.dt() << ", first step shown\n";
    for (const auto &row : rows) {
        out << row << '\n';
    }
    return out.str();
}

} // namespace pstlab
