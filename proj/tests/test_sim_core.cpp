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

#include <cmath>

#include "pstlab/chain.hpp"
#include "pstlab/measurement.hpp"
#include "pstlab/noise.hpp"
#include "pstlab/state.hpp"
#include "test_util.hpp"

using namespace pstlab;

namespace {

Matrix bell() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v * v.adjoint();
}

} // namespace

TEST_CASE("X flips |0> to |1>") {
    PureState psi(1);
    apply_unitary(psi, UnitaryGate::make("X", pauli::X(), {0}));
    CHECK(std::abs(psi.amplitudes()(1) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(psi.amplitudes()(0)) < 1e-15);
}

TEST_CASE("RXX(0) leaves any state unchanged") {
    std::mt19937_64 rng(3);
    const PureState psi = testutil::random_pure(3, rng);
    PureState out = psi;
    apply_unitary(out, UnitaryGate::make("RXX", gate_matrix(GateKind::RXX, 0.0), {0, 2}));
    CHECK((out.amplitudes() - psi.amplitudes()).norm() < 1e-15);
}

TEST_CASE("two-qubit gates match the brute-force embedding") {
    std::mt19937_64 rng(11);
    const std::vector<std::vector<int>> target_sets{{0, 2}, {2, 0}, {3, 1}, {1, 2}, {0, 3}};
    for (const auto &targets : target_sets) {
        const Matrix u = testutil::random_unitary(4, rng);
        const auto gate = UnitaryGate::make("U", u, targets);
        const Matrix full = testutil::embed_brute_force(u, targets, 4);

        const PureState psi = testutil::random_pure(4, rng);
        PureState out = psi;
        apply_unitary(out, gate);
        CHECK((out.amplitudes() - full * psi.amplitudes()).norm() < 1e-12);

        const DensityMatrix rho = testutil::random_density(4, rng);
        DensityMatrix r = rho;
        apply_unitary(r, gate);
        CHECK(max_abs(r.matrix() - full * rho.matrix() * full.adjoint()) < 1e-12);
    }
}

TEST_CASE("single-qubit gates match the brute-force embedding on every qubit") {
    std::mt19937_64 rng(12);
    for (int q = 0; q < 4; ++q) {
        const Matrix u = testutil::random_unitary(2, rng);
        const Matrix full = testutil::embed_brute_force(u, {q}, 4);
        const PureState psi = testutil::random_pure(4, rng);
        PureState out = psi;
        apply_unitary(out, UnitaryGate::make("U", u, {q}));
        CHECK((out.amplitudes() - full * psi.amplitudes()).norm() < 1e-12);
    }
}

TEST_CASE("gate construction rejects bad targets and non-unitaries") {
    CHECK_THROWS(UnitaryGate::make("X", pauli::X(), {0, 0}));
    CHECK_THROWS(UnitaryGate::make("X", pauli::X(), {0, 1}));
    CHECK_THROWS(UnitaryGate::make("bad", 2.0 * pauli::X(), {0}));
    PureState psi(2);
    CHECK_THROWS(apply_unitary(psi, UnitaryGate::make("X", pauli::X(), {2})));
    DensityMatrix rho(2);
    CHECK_THROWS(apply_unitary(rho, UnitaryGate::make("X", pauli::X(), {5})));
}

TEST_CASE("state invariants are enforced") {
    Vector v = Vector::Zero(4);
    v(0) = 1.0;
    v(1) = 1e-3;
    CHECK_THROWS(PureState(2, v));
    CHECK_THROWS(PureState(2, Vector::Zero(3)));
    CHECK_THROWS(DensityMatrix(1, Matrix::Identity(2, 2)));
    Matrix nh = testutil::bloch(0, 0, 1);
    nh(0, 1) = 0.1;
    CHECK_THROWS(DensityMatrix(1, nh));
}

TEST_CASE("apply_channel basic cases") {
    std::mt19937_64 rng(5);
    const DensityMatrix rho = testutil::random_density(1, rng);

    DensityMatrix a = rho;
    const std::array<int, 1> t0{0};
    apply_channel(a, KrausChannel::identity(1), t0);
    CHECK(max_abs(a.matrix() - rho.matrix()) < 1e-15);

    DensityMatrix b = rho;
    apply_channel(b, depolarizing_channel(1.0), t0);
    CHECK(max_abs(b.matrix() - 0.5 * pauli::I()) < 1e-15);

    DensityMatrix c(1, 0.5 * pauli::I());
    apply_channel(c, pauli_channel(0.1, 0.2, 0.05), t0);
    CHECK(max_abs(c.matrix() - 0.5 * pauli::I()) < 1e-15);

    DensityMatrix d(2);
    const std::array<int, 2> pair{0, 1};
    CHECK_THROWS(apply_channel(d, pauli_channel(0.1, 0, 0), pair));
    const KrausChannel half(1, {std::sqrt(0.5) * pauli::I()});
    CHECK_THROWS(apply_channel(d, half, t0));
}

TEST_CASE("channels on subsets match the brute-force Kraus sum") {
    std::mt19937_64 rng(8);
    const DensityMatrix rho = testutil::random_density(3, rng);
    const auto ch = two_qubit_tensor_channel(depolarizing_channel(0.3),
                                             thermal_relaxation_channel(1.0, 1.5, 0.2));
    for (const std::vector<int> &targets : {std::vector<int>{0, 2}, {2, 1}}) {
        DensityMatrix r = rho;
        apply_channel(r, ch, targets);
        CHECK(max_abs(r.matrix() - testutil::apply_kraus_brute_force(rho.matrix(), ch.ops(),
                                                                    targets, 3)) < 1e-12);
    }
}

TEST_CASE("validate_cptp") {
    const double p = 0.01;
    const KrausChannel pauli(1, {std::sqrt(1 - 3 * p) * pauli::I(), std::sqrt(p) * pauli::X(),
                                 std::sqrt(p) * pauli::Y(), std::sqrt(p) * pauli::Z()});
    CHECK(validate_cptp(pauli).ok);

    const double g = 0.2;
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    Matrix lower = Matrix::Zero(2, 2);
    lower(0, 1) = 1.0;
    const KrausChannel reset(1, {std::sqrt(1 - g) * pauli::I(), std::sqrt(g) * p0,
                                 std::sqrt(g) * lower});
    CHECK(validate_cptp(reset).ok);

    const KrausChannel half(1, {std::sqrt(0.5) * pauli::I()});
    const auto report = validate_cptp(half);
    CHECK_FALSE(report.ok);
    CHECK(report.deviation == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("expectation_z and sp_from_z") {
    CHECK(expectation_z(DensityMatrix(1, testutil::bloch(0, 0, 1)), 0) == doctest::Approx(1.0));
    CHECK(expectation_z(DensityMatrix(1, testutil::bloch(0, 0, -1)), 0) == doctest::Approx(-1.0));
    CHECK(std::abs(expectation_z(DensityMatrix(1, testutil::bloch(1, 0, 0)), 0)) < 1e-15);
    CHECK_THROWS(expectation_z(DensityMatrix(2), 2));
    CHECK(sp_from_z(1.0) == 0.0);
    CHECK(sp_from_z(-1.0) == 1.0);
    CHECK(sp_from_z(0.0) == 0.5);
    CHECK(sp_from_z(1.0 + 1e-12) == 0.0);

    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto rho = testutil::random_density(3, rng);
        for (int q = 0; q < 3; ++q) {
            const double z = expectation_z(rho, q);
            CHECK(z >= -1.0 - 1e-9);
            CHECK(z <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("expectation_z agrees with an embedded Z") {
    std::mt19937_64 rng(21);
    const auto rho = testutil::random_density(4, rng);
    for (int q = 0; q < 4; ++q) {
        const Matrix z = testutil::embed_brute_force(pauli::Z(), {q}, 4);
        CHECK(expectation_z(rho, q) == doctest::Approx((rho.matrix() * z).trace().real()).epsilon(1e-12));
    }
}

TEST_CASE("partial_trace_to_qubit") {
    const DensityMatrix prod(PureState::basis(2, 0b10));
    CHECK(max_abs(partial_trace_to_qubit(prod, 0).matrix() - testutil::bloch(0, 0, -1)) < 1e-15);
    const DensityMatrix b(2, bell());
    CHECK(max_abs(partial_trace_to_qubit(b, 0).matrix() - 0.5 * pauli::I()) < 1e-15);
    CHECK(max_abs(partial_trace_to_qubit(b, 1).matrix() - 0.5 * pauli::I()) < 1e-15);
    const DensityMatrix e1(PureState::basis(4, 0b1000));
    CHECK(max_abs(partial_trace_to_qubit(e1, 3).matrix() - testutil::bloch(0, 0, 1)) < 1e-15);
    CHECK_THROWS(partial_trace_to_qubit(e1, 4));
}

TEST_CASE("qubit_state_fidelity") {
    const DensityMatrix zero(1, testutil::bloch(0, 0, 1));
    const DensityMatrix one(1, testutil::bloch(0, 0, -1));
    const DensityMatrix plus(1, testutil::bloch(1, 0, 0));
    const DensityMatrix mixed(1, 0.5 * pauli::I());
    CHECK(qubit_state_fidelity(plus, plus) == doctest::Approx(1.0));
    CHECK(std::abs(qubit_state_fidelity(zero, one)) < 1e-12);
    CHECK(qubit_state_fidelity(mixed, plus) == doctest::Approx(0.5));

    // Mixed-mixed closed form against the Uhlmann definition via
    // eigendecomposition square roots.
    const DensityMatrix a(1, testutil::bloch(0.3, -0.2, 0.5));
    const DensityMatrix b(1, testutil::bloch(-0.1, 0.4, 0.2));
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    const Matrix sa = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                      es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> inner(sa * b.matrix() * sa);
    const double root = inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    CHECK(qubit_state_fidelity(a, b) == doctest::Approx(root * root).epsilon(1e-12));

    Matrix bad = testutil::bloch(0, 0, 1.5);
    CHECK_THROWS(qubit_state_fidelity(DensityMatrix(1, bad), zero));
}

TEST_CASE("sample_measurement") {
    const DensityMatrix zero(1);
    const auto z = sample_measurement(zero, 0, Basis::Z, 2048, 1);
    CHECK(z.p0 == 1.0);
    const DensityMatrix plus(1, testutil::bloch(1, 0, 0));
    CHECK(sample_measurement(plus, 0, Basis::X, std::nullopt, 0).expectation ==
          doctest::Approx(1.0));
    const DensityMatrix ypos(1, testutil::bloch(0, 1, 0));
    CHECK(sample_measurement(ypos, 0, Basis::Y, std::nullopt, 0).expectation ==
          doctest::Approx(1.0));

    int inside = 0;
    const int seeds = 2000;
    for (int s = 0; s < seeds; ++s) {
        const auto est = sample_measurement(plus, 0, Basis::Z, 2048, static_cast<std::uint64_t>(s));
        inside += std::abs(est.expectation) <= 3.0 / std::sqrt(2048.0);
        CHECK(est.p0 + est.p1 == doctest::Approx(1.0));
    }
    CHECK(static_cast<double>(inside) / seeds >= 0.99);

    const auto a = sample_measurement(plus, 0, Basis::Z, 100, 7);
    const auto b = sample_measurement(plus, 0, Basis::Z, 100, 7);
    CHECK(a.p0 == b.p0);
    CHECK_THROWS(parse_basis("W"));
}

TEST_CASE("readout flip mixes outcome probabilities") {
    const DensityMatrix zero(1);
    const auto est = sample_measurement(zero, 0, Basis::Z, std::nullopt, 0, 0.1);
    CHECK(est.p0 == doctest::Approx(0.9));
    CHECK(est.expectation == doctest::Approx(0.8));
}

TEST_CASE("trace survives long gate and channel sequences") {
    std::mt19937_64 rng(99);
    DensityMatrix rho = testutil::random_density(3, rng);
    std::uniform_int_distribution<int> q(0, 2);
    for (int i = 0; i < 300; ++i) {
        int a = q(rng);
        int b = q(rng);
        if (a == b) {
            b = (a + 1) % 3;
        }
        apply_unitary(rho, UnitaryGate::make("U", testutil::random_unitary(4, rng), {a, b}));
        const std::array<int, 2> t{a, b};
        apply_channel(rho, two_qubit_tensor_channel(depolarizing_channel(0.01),
                                                    thermal_relaxation_channel(1.0, 1.2, 0.01)),
                      t);
    }
    CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-9);
    CHECK(rho.is_valid());
}

TEST_CASE("pure evolution then promotion equals promotion then conjugation") {
    std::mt19937_64 rng(4);
    const PureState psi = testutil::random_pure(3, rng);
    const auto gate = UnitaryGate::make("U", testutil::random_unitary(4, rng), {2, 0});
    PureState p = psi;
    apply_unitary(p, gate);
    DensityMatrix r(psi);
    apply_unitary(r, gate);
    CHECK(max_abs(DensityMatrix(p).matrix() - r.matrix()) < 1e-12);
}

TEST_CASE("Choi matrix of the identity channel is the unnormalised Bell projector") {
    const Matrix c = choi_matrix(KrausChannel::identity(1));
    CHECK(max_abs(c - 2.0 * bell()) < 1e-15);
}
