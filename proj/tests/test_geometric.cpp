#include <doctest.h>

#include <cmath>
#include <random>

#include "qctrl/geometric.hpp"

using namespace qctrl;

namespace {

const double kPi = 3.14159265358979323846;

Matrix diag3(double a, double b, double c) {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
}

Matrix rotation(const Matrix& generator, double angle) {
    // exp(-i angle G / 2)
    return expm_skew(HermitianOperator(generator), angle / 2.0);
}

Matrix reconstruct(const std::vector<RotationStep>& steps) {
    Matrix u = identity(2);
    for (const auto& s : steps) {
        const Matrix g = s.generator == kGeneratorY ? sigma_y() : sigma_x();
        u = rotation(g, s.coefficient) * u; // application order: later steps on the left
    }
    return u;
}

Matrix random_unitary(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(2, 2);
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < 2; ++c)
            a(r, c) = Complex(g(rng), g(rng));
    return Eigen::HouseholderQR<Matrix>(a).householderQ();
}

} // namespace

TEST_CASE("transition_table frequencies and dipoles") {
    const std::map<LevelPair, double> dipoles = {{{1, 2}, 0.5}, {{1, 3}, 1.5}};
    const TransitionTable table =
        transition_table(HermitianOperator(diag3(0.0, 1.0, 3.0)), dipoles);
    CHECK(table.dim() == 3);
    CHECK(table.frequency({1, 2}) == doctest::Approx(1.0));
    CHECK(table.frequency({2, 3}) == doctest::Approx(2.0));
    CHECK(table.frequency({1, 3}) == doctest::Approx(3.0));
    CHECK(table.dipole({1, 2}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(table.dipole({2, 3}), NumericError);
    CHECK_THROWS_AS(table.frequency({2, 2}), NumericError);
    CHECK_THROWS_AS(table.frequency({1, 4}), NumericError);
}

TEST_CASE("transition_table is basis independent") {
    // conjugate the diagonal drift by a unitary; the spectrum is unchanged
    std::mt19937_64 rng(17);
    const Matrix v = random_unitary(rng);
    Matrix h2 = Matrix::Zero(2, 2);
    h2(1, 1) = 2.5;
    const TransitionTable table =
        transition_table(HermitianOperator(v * h2 * v.adjoint()), {});
    CHECK(table.frequency({1, 2}) == doctest::Approx(2.5));
}

TEST_CASE("transition_table rejects degeneracies and bad dipoles") {
    CHECK_THROWS_WITH_AS(transition_table(HermitianOperator(identity(2)), {}),
                         doctest::Contains("degenerate"), NumericError);
    CHECK_THROWS_AS(
        transition_table(HermitianOperator(diag3(0, 1, 3)), {{{1, 2}, -1.0}}),
        NumericError);
    CHECK_THROWS_AS(
        transition_table(HermitianOperator(diag3(0, 1, 3)), {{{1, 5}, 1.0}}),
        NumericError);
}

TEST_CASE("strong_regularity") {
    // frequencies: w12 = 1, w23 = 2, w13 = 3; pairwise gaps 1, 2, 1
    const TransitionTable table =
        transition_table(HermitianOperator(diag3(0.0, 1.0, 3.0)), {});
    CHECK(strong_regularity(table, 0.5).regular);

    const StrongRegularityReport bad = strong_regularity(table, 1.0);
    CHECK_FALSE(bad.regular);
    CHECK(bad.offending.size() == 2);
}

TEST_CASE("envelope_value") {
    CHECK(envelope_value(ConstantEnvelope{2.5}, 17.0) == doctest::Approx(2.5));
    const GaussianEnvelope g{3.0, 1.0, 0.5};
    CHECK(envelope_value(g, 1.0) == doctest::Approx(3.0));
    CHECK(envelope_value(g, 1.5) == doctest::Approx(3.0 * std::exp(-0.5)));
    CHECK(envelope_value(g, 0.5) == doctest::Approx(3.0 * std::exp(-0.5)));
    CHECK_THROWS_AS(envelope_value(GaussianEnvelope{1.0, 0.0, 0.0}, 0.0), NumericError);
}

TEST_CASE("realize_field samples component sums at midpoints") {
    const std::vector<ShapedFieldComponent> comps = {
        {{1, 2}, ConstantEnvelope{2.0}, 3.0, 0.25},
        {{1, 3}, GaussianEnvelope{1.0, 0.5, 0.2}, 7.0, -1.0}};
    const PulseSchedule sched = realize_field(comps, 0.1, 0.05, 8);
    CHECK(sched.num_slices() == 8);
    CHECK(sched.num_fields() == 1);
    for (Eigen::Index k = 0; k < 8; ++k) {
        const double t = sched.midpoint_time(k);
        const double expected = 2.0 * std::cos(3.0 * t + 0.25) +
                                envelope_value(comps[1].envelope, t) * std::cos(7.0 * t - 1.0);
        CHECK(sched.values()(k, 0) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(realize_field(comps, 0.0, 0.1, 0), NumericError);
}

TEST_CASE("rwa_hamiltonian phases") {
    const TransitionTable table =
        transition_table(HermitianOperator(diag3(0.0, 1.0, 3.0)), {});

    const HermitianOperator h0 = rwa_hamiltonian(table, {{{1, 2}, 0.7, 0.0}});
    CHECK(std::abs(h0.matrix()(0, 1) - Complex(0.7, 0.0)) < 1e-14);
    CHECK(std::abs(h0.matrix()(1, 0) - Complex(0.7, 0.0)) < 1e-14);
    CHECK(std::abs(h0.matrix().trace()) < 1e-14);
    CHECK(std::abs(h0.matrix()(0, 0)) < 1e-14); // drift-free

    const HermitianOperator h90 = rwa_hamiltonian(table, {{{1, 2}, 0.7, kPi / 2.0}});
    CHECK(std::abs(h90.matrix()(0, 1) - Complex(0.0, 0.7)) < 1e-12);
    CHECK(std::abs(h90.matrix()(1, 0) - Complex(0.0, -0.7)) < 1e-12);

    // two drives add
    const HermitianOperator h2 =
        rwa_hamiltonian(table, {{{1, 2}, 0.7, 0.0}, {{2, 3}, 0.3, 0.5}});
    CHECK(std::abs(h2.matrix()(1, 2) - 0.3 * std::exp(Complex(0.0, 0.5))) < 1e-12);
    CHECK(std::abs(h2.matrix()(0, 1) - Complex(0.7, 0.0)) < 1e-12);

    CHECK_THROWS_AS(rwa_hamiltonian(table, {{{1, 4}, 1.0, 0.0}}), NumericError);
}

TEST_CASE("rotating_frame") {
    Matrix hs = Matrix::Zero(2, 2);
    hs(1, 1) = 3.0;
    const HermitianOperator drift(hs);
    const HermitianOperator hc(sigma_x());

    const HermitianOperator at0 = rotating_frame(hc, drift, 0.0);
    CHECK((at0.matrix() - sigma_x()).cwiseAbs().maxCoeff() < 1e-14);

    const double t = 0.37;
    const HermitianOperator rot = rotating_frame(hc, drift, t);
    // off-diagonal picks up exp(-i w t), w = E2 - E1 = 3
    CHECK(std::abs(rot.matrix()(0, 1) - std::exp(Complex(0.0, -3.0 * t))) < 1e-12);
    CHECK(std::abs(rot.matrix()(0, 0)) < 1e-14);

    CHECK_THROWS_AS(rotating_frame(hc, HermitianOperator(identity(3)), 1.0), NumericError);
}

TEST_CASE("rwa probe agrees with the lab frame for a weak resonant drive") {
    Matrix hs = Matrix::Zero(2, 2);
    hs(1, 1) = 20.0;
    const TransitionTable table =
        transition_table(HermitianOperator(hs), {{{1, 2}, 1.0}});

    RwaProbeSpec weak;
    weak.pair = {1, 2};
    weak.amplitude = 0.2; // Omega = A d / 2 = 0.1
    weak.duration = kPi / (2.0 * 0.1);
    weak.lab_slices = 20000;
    const RwaProbeReport rep = rwa_consistency_probe(table, weak);
    CHECK(rep.max_population_deviation <= 0.05);
    CHECK(rep.times.size() == rep.lab_populations.size());
    // the RWA model executes a clean pi pulse
    CHECK(rep.rwa_populations.back()(1) == doctest::Approx(1.0).epsilon(1e-8));

    RwaProbeSpec strong = weak;
    strong.amplitude = 8.0; // Omega = 4, no longer << omega = 20
    strong.duration = kPi / (2.0 * 4.0);
    strong.lab_slices = 4000;
    const RwaProbeReport rep2 = rwa_consistency_probe(table, strong);
    CHECK(rep2.max_population_deviation > rep.max_population_deviation);
}

TEST_CASE("resonant pi pulse on a strongly regular 3-level system") {
    const TransitionTable table =
        transition_table(HermitianOperator(diag3(0.0, 1.0, 3.0)), {{{1, 2}, 1.0}});
    REQUIRE(strong_regularity(table, 0.5).regular);

    // drive only the (1,2) transition at unit Rabi rate for T = pi/2
    const ControlSystem sys(HermitianOperator(Matrix::Zero(3, 3)),
                            {rwa_hamiltonian(table, {{{1, 2}, 1.0, 0.0}})});
    Eigen::MatrixXd fields = Eigen::MatrixXd::Ones(100, 1);
    const PulseSchedule sched(0.0, kPi / 200.0, fields);
    const KetTrajectory traj = propagate_ket(sys, sched, Ket::basis_state(3, 0));
    const Eigen::VectorXd pops = traj.states.back().cwiseAbs2();
    CHECK(pops(1) >= 0.999);    // full transfer into level 2
    CHECK(pops(2) <= 1e-12);    // level 3 is never addressed
}

TEST_CASE("decompose_su2 reconstructs the input up to global phase") {
    std::mt19937_64 rng(99);
    std::vector<Matrix> cases = {
        identity(2),
        sigma_x(),
        sigma_y(),
        sigma_z(),
        rotation(sigma_y(), 1.1),           // pure Y rotation (degenerate branch)
        rotation(sigma_x(), -2.2),          // pure X rotation
        rotation(sigma_z(), 0.8),           // diagonal input
        (Matrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0), // Hadamard
    };
    for (int i = 0; i < 20; ++i)
        cases.push_back(random_unitary(rng));

    for (const Matrix& u : cases) {
        const std::vector<RotationStep> steps = decompose_su2(u);
        CHECK(steps.size() == 3);
        CHECK(steps[0].generator == kGeneratorY);
        CHECK(steps[1].generator == kGeneratorX);
        CHECK(steps[2].generator == kGeneratorY);
        for (const auto& s : steps)
            CHECK(s.coefficient == doctest::Approx(s.amplitude * s.duration));
        CHECK(gate_fidelity(reconstruct(steps), u) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("decompose_su2 rejects bad input") {
    CHECK_THROWS_AS(decompose_su2(identity(3)), NumericError);
    CHECK_THROWS_AS(decompose_su2(Matrix(2.0 * identity(2))), NumericError);
}

TEST_CASE("pulses_from_steps realizes the decomposition under a field bound") {
    std::mt19937_64 rng(123);
    const double f_max = 2.0;
    const double dt = 0.01;
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix u = random_unitary(rng);
        const std::vector<RotationStep> steps = decompose_su2(u);
        const PulseSchedule sched = pulses_from_steps(steps, f_max, dt);
        CHECK(sched.num_fields() == 2);
        CHECK(sched.values().cwiseAbs().maxCoeff() <= f_max + 1e-12);
        // one field active per slice (bang-bang)
        for (Eigen::Index k = 0; k < sched.num_slices(); ++k)
            CHECK(std::min(std::abs(sched.values()(k, 0)),
                           std::abs(sched.values()(k, 1))) == 0.0);
        const ControlSystem sys(
            HermitianOperator(Matrix::Zero(2, 2)),
            {HermitianOperator(0.5 * sigma_y()), HermitianOperator(0.5 * sigma_x())});
        CHECK(gate_fidelity(total_propagator(sys, sched), u) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("pulses_from_steps edge cases") {
    CHECK_THROWS_AS(pulses_from_steps({}, 0.0, 0.1), NumericError);
    CHECK_THROWS_AS(pulses_from_steps({}, 1.0, 0.0), NumericError);
    CHECK_THROWS_AS(
        pulses_from_steps({RotationStep{kGeneratorY, 1.0, 0.0, 0.0}}, 1.0, 0.1),
        NumericError);

    // a pi/2-area step at f_max = 1, dt = 0.1 needs 16 slices
    const PulseSchedule sched =
        pulses_from_steps({RotationStep{kGeneratorY, kPi / 2.0, 1.0, kPi / 2.0}}, 1.0, 0.1);
    CHECK(sched.num_slices() == 16);
    CHECK(sched.values().col(0).sum() * 0.1 == doctest::Approx(kPi / 2.0));
}
