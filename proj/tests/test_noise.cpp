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

#include <doctest.h>

#include <array>
#include <cmath>

#include "pstlab/chain.hpp"
#include "pstlab/noise.hpp"
#include "test_util.hpp"

using namespace pstlab;

namespace {

Matrix apply1(const KrausChannel &ch, const Matrix &rho) {
    DensityMatrix r(1, rho);
    const std::array<int, 1> t{0};
    apply_channel(r, ch, t);
    return r.matrix();
}

/// Choi matrix of E1 ⊗ E2 assembled entrywise from the factor Choi matrices.
/// Index layout (input, output) per factor is reshuffled into
/// (in1 in2, out1 out2).
Matrix tensor_choi_oracle(const Matrix &c1, const Matrix &c2) {
    Matrix out = Matrix::Zero(16, 16);
    auto idx = [](int i1, int i2, int o1, int o2) { return ((i1 * 2 + i2) * 4) + o1 * 2 + o2; };
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int o1 = 0; o1 < 2; ++o1)
                for (int o2 = 0; o2 < 2; ++o2)
                    for (int j1 = 0; j1 < 2; ++j1)
                        for (int j2 = 0; j2 < 2; ++j2)
                            for (int p1 = 0; p1 < 2; ++p1)
                                for (int p2 = 0; p2 < 2; ++p2) {
                                    out(idx(i1, i2, o1, o2), idx(j1, j2, p1, p2)) =
                                        c1(i1 * 2 + o1, j1 * 2 + p1) * c2(i2 * 2 + o2, j2 * 2 + p2);
                                }
    return out;
}

const NoiseParams kDefaults{};

} // namespace

TEST_CASE("every channel factory is CPTP over random parameters") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const double a = u(rng) / 3, b = u(rng) / 3, c = u(rng) / 3;
        CHECK(validate_cptp(pauli_channel(a, b, c)).ok);
        CHECK(validate_cptp(depolarizing_channel(u(rng) * 4.0 / 3.0)).ok);
        const double t1 = 1e-6 + u(rng) * 1e-3;
        const double t2 = t1 * (0.05 + 1.95 * u(rng));
        const double d = u(rng) * 1e-5;
        for (const auto mode : {ThermalMode::Combined, ThermalMode::ResetOnly, ThermalMode::DephaseOnly}) {
            CHECK(validate_cptp(thermal_relaxation_channel(t1, t2, d, mode)).ok);
        }
        CHECK(validate_cptp(zz_dephasing_channel(u(rng))).ok);
        CHECK(validate_cptp(two_qubit_tensor_channel(depolarizing_channel(u(rng)),
                                                     thermal_relaxation_channel(t1, t2, d)))
                  .ok);
    }
}

TEST_CASE("pauli channel with equal components equals depolarizing at q = 4p/3") {
    for (const double p : {0.0, 1e-3, 1.875e-3, 0.1}) {
        const Matrix a = choi_matrix(pauli_channel(p / 3, p / 3, p / 3));
        const Matrix b = choi_matrix(depolarizing_channel(4.0 * p / 3.0));
        CHECK(max_abs(a - b) < 1e-12);
    }
}

TEST_CASE("pauli channel examples") {
    CHECK(max_abs(choi_matrix(pauli_channel(0, 0, 0)) - choi_matrix(KrausChannel::identity(1))) < 1e-15);
    const double pz = 0.07;
    const Matrix out = apply1(pauli_channel(0, 0, pz), testutil::bloch(1, 0, 0));
    CHECK((2.0 * out(0, 1)).real() == doctest::Approx(1.0 - 2.0 * pz));
    CHECK_THROWS(pauli_channel(-0.1, 0, 0));
    CHECK_THROWS(pauli_channel(0.5, 0.4, 0.2));
}

TEST_CASE("depolarizing examples") {
    CHECK(max_abs(choi_matrix(depolarizing_channel(0.0)) - choi_matrix(KrausChannel::identity(1))) < 1e-15);
    std::mt19937_64 rng(3);
    const auto rho = testutil::random_density(1, rng);
    CHECK(max_abs(apply1(depolarizing_channel(1.0), rho.matrix()) - 0.5 * pauli::I()) < 1e-15);
    const double q = 2.5e-3;
    const Matrix out = apply1(depolarizing_channel(q), testutil::bloch(0, 0, -1));
    CHECK((out(0, 0) - out(1, 1)).real() == doctest::Approx(-(1.0 - q)).epsilon(1e-14));
    CHECK(out(0, 0).real() == doctest::Approx(q / 2).epsilon(1e-14));
    CHECK_THROWS(depolarizing_channel(1.5));
    CHECK_THROWS(depolarizing_channel(-0.01));
}

TEST_CASE("tensor channels") {
    const auto id = two_qubit_tensor_channel(KrausChannel::identity(1), KrausChannel::identity(1));
    CHECK(max_abs(choi_matrix(id) - choi_matrix(KrausChannel::identity(2))) < 1e-15);

    std::mt19937_64 rng(17);
    const auto ra = testutil::random_density(1, rng);
    const auto rb = testutil::random_density(1, rng);
    const auto ch = two_qubit_tensor_channel(depolarizing_channel(0.3), KrausChannel::identity(1));
    DensityMatrix prod(2, kron(ra.matrix(), rb.matrix()));
    const std::array<int, 2> pair{0, 1};
    apply_channel(prod, ch, pair);
    const Matrix expected = kron(apply1(depolarizing_channel(0.3), ra.matrix()), rb.matrix());
    CHECK(max_abs(prod.matrix() - expected) < 1e-14);

    const auto e1 = thermal_relaxation_channel(1.0, 1.3, 0.2);
    const auto e2 = pauli_channel(0.05, 0.02, 0.1);
    const Matrix oracle = tensor_choi_oracle(choi_matrix(e1), choi_matrix(e2));
    CHECK(max_abs(choi_matrix(two_qubit_tensor_channel(e1, e2)) - oracle) < 1e-12);

    // Joint application equals sequential single-qubit application.
    for (int i = 0; i < 20; ++i) {
        const auto rho = testutil::random_density(2, rng);
        DensityMatrix joint = rho;
        apply_channel(joint, two_qubit_tensor_channel(e1, e2), pair);
        DensityMatrix seq = rho;
        const std::array<int, 1> q0{0}, q1{1};
        apply_channel(seq, e1, q0);
        apply_channel(seq, e2, q1);
        CHECK(max_abs(joint.matrix() - seq.matrix()) < 1e-10);
    }
    CHECK_THROWS(two_qubit_tensor_channel(id, e1));
}

TEST_CASE("thermal relaxation") {
    const double t1 = kDefaults.t1, t2 = kDefaults.t2;
    for (const auto mode : {ThermalMode::Combined, ThermalMode::ResetOnly, ThermalMode::DephaseOnly}) {
        CHECK(max_abs(choi_matrix(thermal_relaxation_channel(t1, t2, 0.0, mode)) -
                      choi_matrix(KrausChannel::identity(1))) < 1e-15);
    }

    const double d = 533e-9;
    const double x = d / t1;
    const double gamma = 1.0 - std::exp(-x);
    CHECK(gamma == doctest::Approx(x - x * x / 2 + x * x * x / 6).epsilon(1e-10));
    CHECK(gamma == doctest::Approx(1.996e-3).epsilon(1e-3));

    const Matrix out = apply1(thermal_relaxation_channel(t1, t2, d), testutil::bloch(0, 0, -1));
    CHECK(out(1, 1).real() == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    CHECK(out(0, 0).real() == doctest::Approx(gamma).epsilon(1e-12));

    // Off-diagonal decay e^{−d/T2} in combined mode.
    const Matrix coh = apply1(thermal_relaxation_channel(t1, t2, d), testutil::bloch(1, 0, 0));
    CHECK((2.0 * coh(0, 1)).real() == doctest::Approx(std::exp(-d / t2)).epsilon(1e-12));

    // T2 = 2 T1: no pure dephasing, coherence scales by √(1 − γ₁).
    const Matrix pure_ad = apply1(thermal_relaxation_channel(1.0, 2.0, 0.3), testutil::bloch(1, 0, 0));
    CHECK((2.0 * pure_ad(0, 1)).real() == doctest::Approx(std::sqrt(std::exp(-0.3))).epsilon(1e-14));

    CHECK_THROWS(thermal_relaxation_channel(1.0, 2.5, 0.1));
    CHECK_NOTHROW(thermal_relaxation_channel(1.0, 2.5, 0.1, ThermalMode::DephaseOnly));
    CHECK_THROWS(thermal_relaxation_channel(-1.0, 1.0, 0.1));

    // Reset-only: the |1⟩ population decays by (1 − γ₁).
    const Matrix reset = apply1(thermal_relaxation_channel(1.0, 1.0, 0.2, ThermalMode::ResetOnly),
                                testutil::bloch(0, 0, -1));
    CHECK(reset(1, 1).real() == doctest::Approx(std::exp(-0.2)).epsilon(1e-14));

    // Dephase-only: Z flip with probability 1 − γ₂, γ₂ = e^{−d/T2}.
    const Matrix deph = apply1(thermal_relaxation_channel(1.0, 1.0, 0.2, ThermalMode::DephaseOnly),
                               testutil::bloch(1, 0, 0));
    const double g2 = std::exp(-0.2);
    CHECK((2.0 * deph(0, 1)).real() == doctest::Approx(1.0 - 2.0 * (1.0 - g2)).epsilon(1e-12));
}

TEST_CASE("zz crosstalk unitary") {
    CHECK(max_abs(zz_crosstalk_unitary(0.0, 3.0).matrix - Matrix::Identity(4, 4)) < 1e-15);
    Matrix expected = Matrix::Zero(4, 4);
    expected.diagonal() << Complex(0, -1), Complex(0, 1), Complex(0, 1), Complex(0, -1);
    CHECK(max_abs(zz_crosstalk_unitary(0.5, kPi).matrix - expected) < 1e-15);

    const Matrix zz = kron(pauli::Z(), pauli::Z());
    const Matrix u = zz_crosstalk_unitary(0.13, 2.1).matrix;
    CHECK(max_abs(u * zz - zz * u) < 1e-14);
    CHECK(max_abs(u - gate_matrix(GateKind::RZZ, 2.0 * 0.13 * 2.1)) < 1e-15);

    const Matrix a = zz_crosstalk_unitary(0.2, 0.7).matrix;
    const Matrix b = zz_crosstalk_unitary(0.2, 1.1).matrix;
    CHECK(max_abs(a * b - zz_crosstalk_unitary(0.2, 1.8).matrix) < 1e-12);
}

TEST_CASE("zz dephasing channel") {
    CHECK(max_abs(choi_matrix(zz_dephasing_channel(0.0)) - choi_matrix(KrausChannel::identity(2))) < 1e-15);
    const std::array<int, 2> pair{0, 1};

    Matrix diag = Matrix::Zero(4, 4);
    diag.diagonal() << 0.1, 0.2, 0.3, 0.4;
    DensityMatrix d(2, diag);
    apply_channel(d, zz_dephasing_channel(0.37), pair);
    CHECK(max_abs(d.matrix() - diag) < 1e-15);

    Vector v = Vector::Zero(4);
    v(1) = v(2) = 1.0 / std::sqrt(2.0);
    DensityMatrix s(PureState(2, v));
    apply_channel(s, zz_dephasing_channel(0.5), pair);
    CHECK(std::abs(s.matrix()(1, 2)) > 0.49); // Z⊗Z acts as −1 on both |01⟩ and |10⟩
    Vector w = Vector::Zero(4);
    w(0) = w(1) = 1.0 / std::sqrt(2.0);
    DensityMatrix m(PureState(2, w));
    apply_channel(m, zz_dephasing_channel(0.5), pair);
    CHECK(std::abs(m.matrix()(0, 1)) < 1e-15);
    CHECK_THROWS(zz_dephasing_channel(1.2));
}

TEST_CASE("attach_comprehensive layering") {
    const auto bare = build_trotter_circuit(pst_couplings(4, 1.0), TrotterPlan(2.0 * kPi, 80));
    const auto none = attach_comprehensive(bare, NoiseParams::none());
    CHECK(none.count_channels() == 0);
    CHECK(none.count_gates("RZZ") == 0);
    REQUIRE(none.steps.size() == bare.steps.size());
    for (std::size_t s = 0; s < bare.steps.size(); ++s) {
        REQUIRE(none.steps[s].size() == bare.steps[s].size());
        for (std::size_t g = 0; g < bare.steps[s].size(); ++g) {
            CHECK(max_abs(none.steps[s][g].gate.matrix - bare.steps[s][g].gate.matrix) == 0.0);
        }
    }

    const auto noisy = attach_comprehensive(bare, kDefaults);
    CHECK(noisy.count_gates("RZZ") == 240);
    for (const auto &step : noisy.steps) {
        int depol = 0;
        int thermal = 0;
        for (const auto &op : step) {
            if (op.gate.name.rfind("RZZ", 0) == 0) {
                CHECK(op.noise.empty());
                continue;
            }
            REQUIRE(op.noise.size() == 2);
            CHECK(op.noise[0].channel.arity() == 2);
            depol += op.noise[0].channel.name().find("depol") != std::string::npos;
            thermal += op.noise[1].channel.name().find("thermal") != std::string::npos;
        }
        CHECK(depol == 6);
        CHECK(thermal == 6);
    }
    CHECK_THROWS(attach_comprehensive(noisy, kDefaults));

    NoiseParams deph = kDefaults;
    deph.zz_mode = ZZMode::DephasingChannel;
    deph.p_zz = 0.01;
    const auto with_zz = attach_comprehensive(bare, deph);
    CHECK(with_zz.count_gates("RZZ") == 0);
    CHECK(with_zz.steps[0][0].noise.size() == 3);
    const auto coherent = build_trotter_circuit(pst_couplings(4, 1.0), TrotterPlan(2.0 * kPi, 80), 0.1);
    CHECK_THROWS(attach_comprehensive(coherent, deph));

    // Prep gates pick up the single-qubit layer.
    NoisyCircuit prep = bare;
    prep.prep.push_back({UnitaryGate::make("X", pauli::X(), {0}), {}});
    const auto attached = attach_comprehensive(prep, kDefaults);
    REQUIRE(attached.prep.size() == 1);
    CHECK(attached.prep[0].noise.size() == 2);
}

TEST_CASE("noise params json and validation") {
    const auto j = to_json(kDefaults);
    const auto back = noise_params_from_json(j);
    CHECK(back.p_pauli == kDefaults.p_pauli);
    CHECK(back.t2 == kDefaults.t2);
    CHECK(back.zz_mode == kDefaults.zz_mode);
    CHECK_THROWS(noise_params_from_json(nlohmann::json{{"bogus", 1}}));
    CHECK_THROWS(noise_params_from_json(nlohmann::json{{"t1", "long"}}));
    CHECK_THROWS(noise_params_from_json(nlohmann::json{{"t1", 1e-6}, {"t2", 3e-6}}));
    const auto split = noise_params_from_json(nlohmann::json{{"p_pauli", 0.03}});
    CHECK(split.px == doctest::Approx(0.01));
    const auto ideal = noise_params_from_json(nlohmann::json{{"ideal", true}});
    CHECK_FALSE(ideal.any_enabled());

    NoiseParams bad = kDefaults;
    bad.px = 0.5;
    CHECK_THROWS(bad.validate());
    bad = kDefaults;
    bad.dur_2q = 0.0;
    CHECK_THROWS(bad.validate());
}
