#include "qctrl/dynamics.hpp"

#include <cmath>

namespace qctrl {

namespace {
const Complex kI(0.0, 1.0);

bool is_unitary(const Matrix& u, double tol) {
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}
} // namespace

ControlSystem::ControlSystem(HermitianOperator drift,
                             std::vector<HermitianOperator> controls,
                             std::vector<std::string> labels)
    : drift_(std::move(drift)), controls_(std::move(controls)), labels_(std::move(labels)) {
    for (const auto& c : controls_)
        if (c.dim() != drift_.dim())
            throw NumericError("ControlSystem: control dimension differs from drift");
    if (labels_.empty()) {
        for (std::size_t m = 0; m < controls_.size(); ++m)
            labels_.push_back("f" + std::to_string(m + 1));
    }
    if (labels_.size() != controls_.size())
        throw NumericError("ControlSystem: label count differs from control count");
}

PulseSchedule::PulseSchedule(double t0, double dt, Eigen::MatrixXd values,
                             std::optional<double> f_max)
    : t0_(t0), dt_(dt), values_(std::move(values)), f_max_(f_max) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_))
        throw NumericError("PulseSchedule: dt must be positive and finite");
    if (!values_.allFinite())
        throw NumericError("PulseSchedule: non-finite field values");
    if (f_max_ && values_.size() > 0 && values_.cwiseAbs().maxCoeff() > *f_max_)
        throw NumericError("PulseSchedule: field value exceeds configured amplitude bound");
}

PulseSchedule PulseSchedule::zero(double t0, double dt, Eigen::Index slices, Eigen::Index fields) {
    return PulseSchedule(t0, dt, Eigen::MatrixXd::Zero(slices, fields));
}

HermitianOperator slice_hamiltonian(const ControlSystem& sys, const Eigen::VectorXd& fields) {
    if (static_cast<std::size_t>(fields.size()) != sys.num_controls())
        throw NumericError("slice_hamiltonian: field count differs from control count");
    Matrix h = sys.drift().matrix();
    for (Eigen::Index m = 0; m < fields.size(); ++m)
        h += fields(m) * sys.controls()[static_cast<std::size_t>(m)].matrix();
    return HermitianOperator(std::move(h));
}

Matrix total_propagator(const ControlSystem& sys, const PulseSchedule& sched) {
    if (static_cast<std::size_t>(sched.num_fields()) != sys.num_controls())
        throw NumericError("total_propagator: schedule field count differs from control count");
    Matrix u = Matrix::Identity(sys.dim(), sys.dim());
    for (Eigen::Index k = 0; k < sched.num_slices(); ++k) {
        const HermitianOperator h = slice_hamiltonian(sys, sched.values().row(k).transpose());
        u = expm_skew(h, sched.dt()) * u;
    }
    return u;
}

KetTrajectory propagate_ket(const ControlSystem& sys, const PulseSchedule& sched,
                            const Ket& psi0, Eigen::Index record_every) {
    if (psi0.dim() != sys.dim())
        throw NumericError("propagate_ket: state dimension differs from system");
    if (record_every < 1)
        throw NumericError("propagate_ket: record_every must be >= 1");
    KetTrajectory traj;
    Vector psi = psi0.amplitudes();
    const Eigen::Index K = sched.num_slices();
    traj.times.push_back(sched.boundary_time(0));
    traj.states.push_back(psi);
    for (Eigen::Index k = 0; k < K; ++k) {
        const HermitianOperator h = slice_hamiltonian(sys, sched.values().row(k).transpose());
        psi = expm_skew(h, sched.dt()) * psi;
        if ((k + 1) % record_every == 0 || k + 1 == K) {
            traj.times.push_back(sched.boundary_time(k + 1));
            traj.states.push_back(psi);
        }
    }
    return traj;
}

DensityTrajectory propagate_density(const ControlSystem& sys, const PulseSchedule& sched,
                                    const DensityOperator& rho0, Eigen::Index record_every) {
    if (rho0.dim() != sys.dim())
        throw NumericError("propagate_density: state dimension differs from system");
    if (record_every < 1)
        throw NumericError("propagate_density: record_every must be >= 1");
    DensityTrajectory traj;
    Matrix rho = rho0.matrix();
    const Eigen::Index K = sched.num_slices();
    traj.times.push_back(sched.boundary_time(0));
    traj.states.push_back(rho);
    for (Eigen::Index k = 0; k < K; ++k) {
        const HermitianOperator h = slice_hamiltonian(sys, sched.values().row(k).transpose());
        const Matrix u = expm_skew(h, sched.dt());
        rho = u * rho * u.adjoint();
        if ((k + 1) % record_every == 0 || k + 1 == K) {
            traj.times.push_back(sched.boundary_time(k + 1));
            traj.states.push_back(rho);
        }
    }
    return traj;
}

namespace {

// drho/dt = -i[H,rho] + sum_k gamma_k (L rho L^dag - 1/2 {L^dag L, rho})
Matrix lindblad_rhs(const Matrix& h, const std::vector<LindbladChannel>& channels,
                    const std::vector<Matrix>& ldl, const Matrix& rho) {
    Matrix d = -kI * (h * rho - rho * h);
    for (std::size_t c = 0; c < channels.size(); ++c) {
        const Matrix& l = channels[c].op;
        d += channels[c].rate *
             (l * rho * l.adjoint() - 0.5 * (ldl[c] * rho + rho * ldl[c]));
    }
    return d;
}

} // namespace

DensityTrajectory propagate_open(const ControlSystem& sys, const PulseSchedule& sched,
                                 const std::vector<LindbladChannel>& channels,
                                 const DensityOperator& rho0, Eigen::Index substeps,
                                 Eigen::Index record_every) {
    if (rho0.dim() != sys.dim())
        throw NumericError("propagate_open: state dimension differs from system");
    if (substeps < 1)
        throw NumericError("propagate_open: substeps must be >= 1");
    if (record_every < 1)
        throw NumericError("propagate_open: record_every must be >= 1");
    std::vector<Matrix> ldl;
    for (const auto& ch : channels) {
        if (ch.rate < 0.0)
            throw NumericError("propagate_open: negative Lindblad rate");
        if (ch.op.rows() != sys.dim() || ch.op.cols() != sys.dim())
            throw NumericError("propagate_open: channel operator dimension differs from system");
        ldl.push_back(ch.op.adjoint() * ch.op);
    }

    DensityTrajectory traj;
    Matrix rho = rho0.matrix();
    const Eigen::Index K = sched.num_slices();
    const double h_step = sched.dt() / static_cast<double>(substeps);
    traj.times.push_back(sched.boundary_time(0));
    traj.states.push_back(rho);
    for (Eigen::Index k = 0; k < K; ++k) {
        const Matrix ham = slice_hamiltonian(sys, sched.values().row(k).transpose()).matrix();
        for (Eigen::Index s = 0; s < substeps; ++s) {
            const Matrix k1 = lindblad_rhs(ham, channels, ldl, rho);
            const Matrix k2 = lindblad_rhs(ham, channels, ldl, rho + 0.5 * h_step * k1);
            const Matrix k3 = lindblad_rhs(ham, channels, ldl, rho + 0.5 * h_step * k2);
            const Matrix k4 = lindblad_rhs(ham, channels, ldl, rho + h_step * k3);
            rho += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        // keep hermiticity exact against roundoff accumulation
        rho = 0.5 * (rho + rho.adjoint().eval());
        if ((k + 1) % record_every == 0 || k + 1 == K) {
            traj.times.push_back(sched.boundary_time(k + 1));
            traj.states.push_back(rho);
        }
    }
    return traj;
}

double gate_fidelity(const Matrix& u, const Matrix& target) {
    if (u.rows() != target.rows() || u.cols() != target.cols() || u.rows() != u.cols())
        throw NumericError("gate_fidelity: dimension mismatch");
    if (!is_unitary(u, 1e-8) || !is_unitary(target, 1e-8))
        throw NumericError("gate_fidelity: inputs must be unitary");
    const double n = static_cast<double>(u.rows());
    const Complex tr = (target.adjoint() * u).trace();
    return std::norm(tr) / (n * n);
}

double transfer_fidelity(const DensityOperator& rho, const Ket& target) {
    if (rho.dim() != target.dim())
        throw NumericError("transfer_fidelity: dimension mismatch");
    const Complex v = (target.amplitudes().adjoint() * rho.matrix() * target.amplitudes())(0);
    double p = v.real();
    if (p < 0.0 && p > -1e-10) p = 0.0;
    if (p > 1.0 && p < 1.0 + 1e-10) p = 1.0;
    return p;
}

} // namespace qctrl
