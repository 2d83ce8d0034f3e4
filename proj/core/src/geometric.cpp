#include "qctrl/geometric.hpp"

#include <cmath>
#include <sstream>

namespace qctrl {

namespace {

const Complex kI(0.0, 1.0);
const double kPi = 3.14159265358979323846;

void check_pair(const LevelPair& p, Eigen::Index dim) {
    if (p.first < 1 || p.second <= p.first || p.second > static_cast<int>(dim)) {
        std::ostringstream os;
        os << "invalid level pair (" << p.first << "," << p.second << ") for dimension " << dim;
        throw NumericError(os.str());
    }
}

} // namespace

double TransitionTable::frequency(const LevelPair& p) const {
    check_pair(p, dim());
    return energies(p.second - 1) - energies(p.first - 1);
}

double TransitionTable::dipole(const LevelPair& p) const {
    const auto it = dipoles.find(p);
    if (it == dipoles.end()) {
        std::ostringstream os;
        os << "no dipole moment for transition (" << p.first << "," << p.second << ")";
        throw NumericError(os.str());
    }
    return it->second;
}

TransitionTable transition_table(const HermitianOperator& h_s,
                                 const std::map<LevelPair, double>& dipoles) {
    TransitionTable table;
    table.energies = eig_hermitian(h_s.matrix()).values;
    for (Eigen::Index i = 0; i + 1 < table.energies.size(); ++i)
        if (table.energies(i + 1) - table.energies(i) < 1e-10)
            throw NumericError("transition_table: degenerate drift spectrum, "
                               "frequency addressing is ill-defined");
    for (const auto& [p, d] : dipoles) {
        check_pair(p, table.dim());
        if (!(d > 0.0))
            throw NumericError("transition_table: dipole moments must be positive");
    }
    table.dipoles = dipoles;
    return table;
}

StrongRegularityReport strong_regularity(const TransitionTable& table, double separation) {
    StrongRegularityReport rep;
    std::vector<LevelPair> pairs;
    for (int n = 1; n <= table.dim(); ++n)
        for (int np = n + 1; np <= table.dim(); ++np)
            pairs.push_back({n, np});
    rep.regular = true;
    for (std::size_t a = 0; a < pairs.size(); ++a)
        for (std::size_t b = a + 1; b < pairs.size(); ++b)
            if (std::abs(table.frequency(pairs[a]) - table.frequency(pairs[b])) <= separation) {
                rep.regular = false;
                rep.offending.push_back({pairs[a], pairs[b]});
            }
    return rep;
}

double envelope_value(const Envelope& env, double t) {
    if (const auto* c = std::get_if<ConstantEnvelope>(&env))
        return c->amplitude;
    const auto& g = std::get<GaussianEnvelope>(env);
    if (!(g.width > 0.0))
        throw NumericError("envelope_value: Gaussian width must be positive");
    const double x = (t - g.center) / g.width;
    return g.peak * std::exp(-0.5 * x * x);
}

PulseSchedule realize_field(const std::vector<ShapedFieldComponent>& components,
                            double t0, double dt, Eigen::Index slices) {
    if (slices < 1)
        throw NumericError("realize_field: need at least one slice");
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(slices, 1);
    for (Eigen::Index k = 0; k < slices; ++k) {
        const double t = t0 + dt * (static_cast<double>(k) + 0.5);
        double f = 0.0;
        for (const auto& c : components)
            f += envelope_value(c.envelope, t) * std::cos(c.frequency * t + c.phase);
        values(k, 0) = f;
    }
    return PulseSchedule(t0, dt, std::move(values));
}

HermitianOperator rwa_hamiltonian(const TransitionTable& table,
                                  const std::vector<RwaDrive>& drives) {
    const Eigen::Index n = table.dim();
    Matrix h = Matrix::Zero(n, n);
    for (const auto& d : drives) {
        check_pair(d.pair, n);
        // Omega (x cos phi + y sin phi), x = |n><n'| + |n'><n|,
        // y = i (|n><n'| - |n'><n|)
        const Complex c = d.rabi * std::exp(kI * d.phase);
        h(d.pair.first - 1, d.pair.second - 1) += c;
        h(d.pair.second - 1, d.pair.first - 1) += std::conj(c);
    }
    return HermitianOperator(std::move(h));
}

HermitianOperator rotating_frame(const HermitianOperator& h_c,
                                 const HermitianOperator& h_s, double t) {
    if (h_c.dim() != h_s.dim())
        throw NumericError("rotating_frame: dimension mismatch");
    const Matrix u_s = expm_skew(h_s, t);
    return HermitianOperator(u_s.adjoint() * h_c.matrix() * u_s, 1e-10);
}

namespace {

Eigen::VectorXd populations(const Vector& psi) {
    return psi.cwiseAbs2();
}

} // namespace

RwaProbeReport rwa_consistency_probe(const TransitionTable& table, const RwaProbeSpec& spec) {
    check_pair(spec.pair, table.dim());
    if (!(spec.duration > 0.0) || spec.lab_slices < 1)
        throw NumericError("rwa_consistency_probe: need positive duration and lab_slices");

    const Eigen::Index n = table.dim();
    const double omega = table.frequency(spec.pair);
    const double d = table.dipole(spec.pair);
    const double dt = spec.duration / static_cast<double>(spec.lab_slices);

    // lab frame: H = diag(E) + f(t) d x_nn'
    Matrix coupling = Matrix::Zero(n, n);
    coupling(spec.pair.first - 1, spec.pair.second - 1) = d;
    coupling(spec.pair.second - 1, spec.pair.first - 1) = d;
    const ControlSystem lab(HermitianOperator(table.energies.cast<Complex>().asDiagonal()),
                            {HermitianOperator(coupling)});
    const PulseSchedule field = realize_field(
        {{spec.pair, ConstantEnvelope{spec.amplitude}, omega, spec.phase}},
        0.0, dt, spec.lab_slices);

    // RWA frame: drift-free, Omega = A d / 2
    const ControlSystem rwa(
        HermitianOperator(Matrix::Zero(n, n)),
        {rwa_hamiltonian(table, {{spec.pair, 1.0, spec.phase}})});
    Eigen::MatrixXd rwa_field =
        Eigen::MatrixXd::Constant(spec.lab_slices, 1, spec.amplitude * d / 2.0);
    const PulseSchedule rwa_sched(0.0, dt, std::move(rwa_field));

    const Ket psi0 = Ket::basis_state(n, spec.pair.first - 1);
    const KetTrajectory lab_traj = propagate_ket(lab, field, psi0);
    const KetTrajectory rwa_traj = propagate_ket(rwa, rwa_sched, psi0);

    RwaProbeReport rep;
    rep.times = lab_traj.times;
    for (std::size_t k = 0; k < lab_traj.states.size(); ++k) {
        rep.lab_populations.push_back(populations(lab_traj.states[k]));
        rep.rwa_populations.push_back(populations(rwa_traj.states[k]));
        const double dev = (rep.lab_populations.back() - rep.rwa_populations.back())
                               .cwiseAbs().maxCoeff();
        rep.max_population_deviation = std::max(rep.max_population_deviation, dev);
    }
    return rep;
}

namespace {

Matrix basis_change_xyz() {
    // rotation by 2 pi / 3 about (1,1,1)/sqrt(3): conjugation maps
    // sigma_x -> sigma_y, sigma_y -> sigma_z, sigma_z -> sigma_x
    const Matrix axis = (sigma_x() + sigma_y() + sigma_z()) / (2.0 * std::sqrt(3.0));
    return expm_skew(HermitianOperator(axis), 2.0 * kPi / 3.0);
}

} // namespace

std::vector<RotationStep> decompose_su2(const Matrix& u) {
    if (u.rows() != 2 || u.cols() != 2)
        throw NumericError("decompose_su2: expected a 2x2 matrix");
    if ((u.adjoint() * u - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-10)
        throw NumericError("decompose_su2: input is not unitary");

    // strip the global phase: u_su in SU(2)
    const Complex det = u.determinant();
    const Matrix u_su = u / std::sqrt(det);

    // in the permuted frame the Y-X-Y problem becomes standard Z-Y-Z
    static const Matrix t = basis_change_xyz();
    const Matrix m = t * u_su * t.adjoint();

    const double cb = std::abs(m(0, 0));
    const double sb = std::abs(m(1, 0));
    const double beta = 2.0 * std::atan2(sb, cb);
    double alpha = 0.0;
    double gamma = 0.0;
    if (sb < 1e-12) {
        alpha = -2.0 * std::arg(m(0, 0));
    } else if (cb < 1e-12) {
        alpha = 2.0 * std::arg(m(1, 0));
    } else {
        const double sum = -2.0 * std::arg(m(0, 0));
        const double diff = 2.0 * std::arg(m(1, 0));
        alpha = 0.5 * (sum + diff);
        gamma = 0.5 * (sum - diff);
    }

    auto step = [](int gen, double c) {
        return RotationStep{gen, c, 1.0, c};
    };
    return {step(kGeneratorY, gamma), step(kGeneratorX, beta), step(kGeneratorY, alpha)};
}

PulseSchedule pulses_from_steps(const std::vector<RotationStep>& steps, double f_max,
                                double dt) {
    if (!(f_max > 0.0))
        throw NumericError("pulses_from_steps: f_max must be positive");
    if (!(dt > 0.0))
        throw NumericError("pulses_from_steps: dt must be positive");

    int fields = 1;
    for (const auto& s : steps) {
        if (s.generator < 0)
            throw NumericError("pulses_from_steps: negative generator index");
        if (s.duration == 0.0 && s.coefficient != 0.0)
            throw NumericError("pulses_from_steps: zero-duration step with nonzero coefficient");
        fields = std::max(fields, s.generator + 1);
    }

    std::vector<Eigen::RowVectorXd> rows;
    for (const auto& s : steps) {
        if (s.coefficient == 0.0)
            continue;
        const auto n = static_cast<Eigen::Index>(std::ceil(std::abs(s.coefficient) / (f_max * dt)));
        const double amp = s.coefficient / (static_cast<double>(n) * dt);
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(fields);
        row(s.generator) = amp;
        for (Eigen::Index i = 0; i < n; ++i)
            rows.push_back(row);
    }

    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), fields);
    for (Eigen::Index r = 0; r < values.rows(); ++r)
        values.row(r) = rows[static_cast<std::size_t>(r)];
    return PulseSchedule(0.0, dt, std::move(values));
}

} // namespace qctrl
