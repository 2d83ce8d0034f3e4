#include "qctrl/grape.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace qctrl {

namespace {

const Complex kI(0.0, 1.0);

void check_objective(const ControlSystem& sys, const PulseSchedule& sched,
                     const ObjectiveSpec& obj) {
    if (static_cast<std::size_t>(obj.lambdas.size()) != sys.num_controls())
        throw NumericError("objective: penalty weight count differs from control count");
    if ((obj.lambdas.array() < 0.0).any())
        throw NumericError("objective: penalty weights must be non-negative");
    if (static_cast<std::size_t>(sched.num_fields()) != sys.num_controls())
        throw NumericError("objective: schedule field count differs from control count");
    if (obj.kind == ObjectiveKind::OBSERVABLE) {
        if (!obj.observable || !obj.rho0)
            throw NumericError("objective: OBSERVABLE kind needs observable and rho0");
        if (obj.observable->dim() != sys.dim() || obj.rho0->dim() != sys.dim())
            throw NumericError("objective: dimension mismatch");
    } else {
        if (!obj.target_gate)
            throw NumericError("objective: GATE kind needs a target unitary");
        if (obj.target_gate->rows() != sys.dim() || obj.target_gate->cols() != sys.dim())
            throw NumericError("objective: dimension mismatch");
    }
}

struct SliceData {
    Eigensystem eig;
    Matrix u;
};

std::vector<SliceData> slice_propagators(const ControlSystem& sys, const PulseSchedule& sched) {
    std::vector<SliceData> out;
    out.reserve(static_cast<std::size_t>(sched.num_slices()));
    for (Eigen::Index k = 0; k < sched.num_slices(); ++k) {
        const HermitianOperator h = slice_hamiltonian(sys, sched.values().row(k).transpose());
        SliceData sd;
        sd.eig = eig_hermitian(h.matrix());
        Vector phases(sd.eig.values.size());
        for (Eigen::Index a = 0; a < sd.eig.values.size(); ++a)
            phases(a) = std::exp(Complex(0.0, -sched.dt() * sd.eig.values(a)));
        sd.u = sd.eig.vectors * phases.asDiagonal() * sd.eig.vectors.adjoint();
        out.push_back(std::move(sd));
    }
    return out;
}

// Exact directional derivative of exp(-i dt H) along B through the
// eigenbasis of H, via the divided-difference kernel
// (e^{-i dt la} - e^{-i dt lb}) / (la - lb), diagonal limit -i dt e^{-i dt la}.
Matrix propagator_derivative(const SliceData& sd, const Matrix& b, double dt) {
    const Eigen::Index n = sd.eig.values.size();
    const double scale = std::max(1.0, sd.eig.values.cwiseAbs().maxCoeff());
    Matrix bt = sd.eig.vectors.adjoint() * b * sd.eig.vectors;
    for (Eigen::Index a = 0; a < n; ++a) {
        const Complex ea = std::exp(Complex(0.0, -dt * sd.eig.values(a)));
        for (Eigen::Index c = 0; c < n; ++c) {
            const double dl = sd.eig.values(a) - sd.eig.values(c);
            Complex phi;
            if (std::abs(dl) < 1e-12 * scale) {
                phi = Complex(0.0, -dt) * ea;
            } else {
                const Complex ec = std::exp(Complex(0.0, -dt * sd.eig.values(c)));
                phi = (ea - ec) / dl;
            }
            bt(a, c) *= phi;
        }
    }
    return sd.eig.vectors * bt * sd.eig.vectors.adjoint();
}

} // namespace

ObjectiveSpec observable_objective(HermitianOperator a, DensityOperator rho0,
                                   Eigen::VectorXd lambdas) {
    ObjectiveSpec obj;
    obj.kind = ObjectiveKind::OBSERVABLE;
    obj.observable = std::move(a);
    obj.rho0 = std::move(rho0);
    obj.lambdas = std::move(lambdas);
    return obj;
}

ObjectiveSpec gate_objective(Matrix target, Eigen::VectorXd lambdas) {
    ObjectiveSpec obj;
    obj.kind = ObjectiveKind::GATE;
    obj.target_gate = std::move(target);
    obj.lambdas = std::move(lambdas);
    return obj;
}

double field_energy_cost(const PulseSchedule& sched, const Eigen::VectorXd& lambdas) {
    if (lambdas.size() != sched.num_fields())
        throw NumericError("field_energy_cost: penalty weight count differs from field count");
    if ((lambdas.array() < 0.0).any())
        throw NumericError("field_energy_cost: penalty weights must be non-negative");
    double c = 0.0;
    for (Eigen::Index m = 0; m < lambdas.size(); ++m)
        c += 0.5 * lambdas(m) * sched.values().col(m).squaredNorm() * sched.dt();
    return c;
}

ObjectiveValue evaluate_objective(const ControlSystem& sys, const PulseSchedule& sched,
                                  const ObjectiveSpec& obj) {
    check_objective(sys, sched, obj);
    ObjectiveValue v;
    if (obj.kind == ObjectiveKind::OBSERVABLE) {
        const DensityTrajectory traj =
            propagate_density(sys, sched, *obj.rho0, std::max<Eigen::Index>(sched.num_slices(), 1));
        v.a_term = (obj.observable->matrix() * traj.states.back()).trace().real();
    } else {
        v.a_term = gate_fidelity(total_propagator(sys, sched), *obj.target_gate);
    }
    v.c_term = field_energy_cost(sched, obj.lambdas);
    v.j = v.a_term - v.c_term;
    return v;
}

Eigen::MatrixXd gradient(const ControlSystem& sys, const PulseSchedule& sched,
                         const ObjectiveSpec& obj) {
    check_objective(sys, sched, obj);
    const Eigen::Index K = sched.num_slices();
    const Eigen::Index M = sched.num_fields();
    const double dt = sched.dt();
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(K, M);
    const std::vector<SliceData> slices = slice_propagators(sys, sched);

    if (obj.kind == ObjectiveKind::OBSERVABLE) {
        // forward states rho_0 .. rho_{K-1} (state BEFORE each slice)
        std::vector<Matrix> fwd(static_cast<std::size_t>(K));
        Matrix rho = obj.rho0->matrix();
        for (Eigen::Index k = 0; k < K; ++k) {
            fwd[static_cast<std::size_t>(k)] = rho;
            rho = slices[static_cast<std::size_t>(k)].u * rho *
                  slices[static_cast<std::size_t>(k)].u.adjoint();
        }
        // costate: observable propagated back to just after slice k
        Matrix costate = obj.observable->matrix();
        for (Eigen::Index k = K - 1; k >= 0; --k) {
            const SliceData& sd = slices[static_cast<std::size_t>(k)];
            const Matrix& rho_in = fwd[static_cast<std::size_t>(k)];
            for (Eigen::Index m = 0; m < M; ++m) {
                const Matrix d = propagator_derivative(
                    sd, sys.controls()[static_cast<std::size_t>(m)].matrix(), dt);
                const Complex tr = (costate * d * rho_in * sd.u.adjoint()).trace();
                grad(k, m) = 2.0 * tr.real();
            }
            costate = sd.u.adjoint() * costate * sd.u;
        }
    } else {
        // prefix products P_k = U_k ... U_1 (P_0 = I)
        std::vector<Matrix> prefix(static_cast<std::size_t>(K) + 1);
        prefix[0] = Matrix::Identity(sys.dim(), sys.dim());
        for (Eigen::Index k = 0; k < K; ++k)
            prefix[static_cast<std::size_t>(k) + 1] =
                slices[static_cast<std::size_t>(k)].u * prefix[static_cast<std::size_t>(k)];
        const Matrix& target = *obj.target_gate;
        const Complex z = (target.adjoint() * prefix[static_cast<std::size_t>(K)]).trace();
        const double n2 = static_cast<double>(sys.dim() * sys.dim());

        Matrix suffix = Matrix::Identity(sys.dim(), sys.dim()); // U_K ... U_{k+2}
        for (Eigen::Index k = K - 1; k >= 0; --k) {
            const SliceData& sd = slices[static_cast<std::size_t>(k)];
            const Matrix left = target.adjoint() * suffix;
            for (Eigen::Index m = 0; m < M; ++m) {
                const Matrix d = propagator_derivative(
                    sd, sys.controls()[static_cast<std::size_t>(m)].matrix(), dt);
                const Complex dz = (left * d * prefix[static_cast<std::size_t>(k)]).trace();
                grad(k, m) = 2.0 * (std::conj(z) * dz).real() / n2;
            }
            suffix = suffix * sd.u;
        }
    }

    for (Eigen::Index m = 0; m < M; ++m)
        grad.col(m) -= obj.lambdas(m) * dt * sched.values().col(m);
    return grad;
}

OptimizeResult optimize(const ControlSystem& sys, const PulseSchedule& sched0,
                        const ObjectiveSpec& obj, const OptimizeOptions& opts) {
    if (opts.max_iter < 1)
        throw NumericError("optimize: max_iter must be >= 1");
    const auto t_start = std::chrono::steady_clock::now();

    PulseSchedule sched = sched0;
    ObjectiveValue current = evaluate_objective(sys, sched, obj);
    if (!std::isfinite(current.j))
        throw NumericError("optimize: non-finite objective at the initial point");

    OptimizationReport report;
    report.j_history.push_back(current.j);

    double step = opts.step;
    constexpr double kArmijo = 1e-4;
    constexpr double kMinStep = 1e-16;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        const Eigen::MatrixXd g = gradient(sys, sched, obj);
        const double gnorm_inf = g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
        if (gnorm_inf < opts.tol_grad) {
            report.converged = true;
            break;
        }
        const double g2 = g.squaredNorm();

        bool accepted = false;
        while (step >= kMinStep) {
            PulseSchedule trial(sched.t0(), sched.dt(), sched.values() + step * g);
            const ObjectiveValue tv = evaluate_objective(sys, trial, obj);
            if (!std::isfinite(tv.j)) {
                std::ostringstream os;
                os << "optimize: non-finite objective at iteration " << iter;
                throw NumericError(os.str());
            }
            const bool ok = opts.line_search ? tv.j >= current.j + kArmijo * step * g2
                                             : true;
            if (ok) {
                sched = std::move(trial);
                current = tv;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++report.iterations;
        if (!accepted)
            break; // step underflow: no ascent direction at this resolution
        report.j_history.push_back(current.j);
        step = std::min(step * 2.0, opts.step * 1e3);
    }

    report.final_a_term = current.a_term;
    report.final_cost = current.c_term;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return OptimizeResult{std::move(sched), std::move(report)};
}

} // namespace qctrl
