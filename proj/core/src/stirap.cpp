#include "qctrl/stirap.hpp"

#include <cmath>

namespace qctrl {

namespace {

double gaussian(double t, double peak, double center, double sigma) {
    const double x = (t - center) / sigma;
    return peak * std::exp(-0.5 * x * x);
}

Vector dark_state(double omega1, double omega2) {
    Vector d = Vector::Zero(3);
    if (omega1 == 0.0 && omega2 == 0.0) {
        d(0) = 1.0; // undriven limit: dark state is |1>
        return d;
    }
    const double theta = mixing_angle(omega1, omega2);
    d(0) = std::cos(theta);
    d(2) = -std::sin(theta);
    return d;
}

} // namespace

HermitianOperator lambda_rwa(double omega1, double omega2) {
    if (!std::isfinite(omega1) || !std::isfinite(omega2))
        throw NumericError("lambda_rwa: non-finite Rabi frequency");
    Matrix h = Matrix::Zero(3, 3);
    h(0, 1) = h(1, 0) = -omega1;
    h(1, 2) = h(2, 1) = -omega2;
    return HermitianOperator(std::move(h));
}

double mixing_angle(double omega1, double omega2) {
    if (omega1 == 0.0 && omega2 == 0.0)
        throw NumericError("mixing_angle: undefined for vanishing drives");
    return std::atan2(std::abs(omega1), std::abs(omega2));
}

PulseSchedule stirap_schedule(const StirapParams& p) {
    if (!(p.width > 0.0))
        throw NumericError("stirap_schedule: width must be positive");
    if (!(p.tF > p.t0))
        throw NumericError("stirap_schedule: empty time window");
    if (p.slices < 10)
        throw NumericError("stirap_schedule: need at least 10 slices");
    const double t_c = 0.5 * (p.t0 + p.tF);
    const double pump_peak = t_c + 0.5 * p.delay;   // Omega_1, transition 1-2
    const double stokes_peak = t_c - 0.5 * p.delay; // Omega_2, transition 2-3
    if (pump_peak < p.t0 || pump_peak > p.tF || stokes_peak < p.t0 || stokes_peak > p.tF)
        throw NumericError("stirap_schedule: pulse peak outside the time window");

    const double dt = (p.tF - p.t0) / static_cast<double>(p.slices);
    Eigen::MatrixXd values(p.slices, 2);
    for (Eigen::Index k = 0; k < p.slices; ++k) {
        const double t = p.t0 + dt * (static_cast<double>(k) + 0.5);
        values(k, 0) = gaussian(t, p.omega0, pump_peak, p.width);
        values(k, 1) = gaussian(t, p.omega0, stokes_peak, p.width);
    }
    return PulseSchedule(p.t0, dt, std::move(values));
}

EigenFrame eigenframe(const std::vector<HermitianOperator>& hamiltonians,
                      const std::vector<double>& times) {
    if (hamiltonians.empty())
        throw NumericError("eigenframe: empty Hamiltonian list");
    if (!times.empty() && times.size() != hamiltonians.size())
        throw NumericError("eigenframe: times and Hamiltonians differ in length");

    EigenFrame frame;
    const Eigen::Index n = hamiltonians.front().dim();
    for (std::size_t s = 0; s < hamiltonians.size(); ++s) {
        frame.times.push_back(times.empty() ? static_cast<double>(s) : times[s]);
        Eigensystem es = eig_hermitian(hamiltonians[s].matrix());
        if (s == 0) {
            frame.eigenvalues.push_back(es.values);
            frame.eigenvectors.push_back(es.vectors);
            continue;
        }
        // order curves by max overlap with the previous sample so crossings
        // are tracked instead of re-sorted
        const Matrix& prev = frame.eigenvectors.back();
        const Eigen::MatrixXd overlap = (prev.adjoint() * es.vectors).cwiseAbs();
        std::vector<bool> taken(static_cast<std::size_t>(n), false);
        Eigen::VectorXd vals(n);
        Matrix vecs(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = -1;
            double best_ov = -1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (taken[static_cast<std::size_t>(j)])
                    continue;
                if (overlap(i, j) > best_ov) {
                    best_ov = overlap(i, j);
                    best = j;
                }
            }
            taken[static_cast<std::size_t>(best)] = true;
            vals(i) = es.values(best);
            Vector v = es.vectors.col(best);
            const Complex ov = (prev.col(i).adjoint() * v)(0);
            if (std::abs(ov) > 0.0)
                v *= std::conj(ov) / std::abs(ov); // continuity phase fixing
            vecs.col(i) = v;
        }
        frame.eigenvalues.push_back(std::move(vals));
        frame.eigenvectors.push_back(std::move(vecs));
    }
    return frame;
}

double adiabaticity_margin(const EigenFrame& frame) {
    const std::size_t samples = frame.times.size();
    if (samples < 2)
        throw NumericError("adiabaticity_margin: need at least two samples");
    const Eigen::Index n = frame.eigenvalues.front().size();

    // reference curve: smallest |eigenvalue| at the first sample
    Eigen::Index ref = 0;
    frame.eigenvalues.front().cwiseAbs().minCoeff(&ref);

    double margin = 0.0;
    for (std::size_t s = 0; s + 1 < samples; ++s) {
        const double dt = frame.times[s + 1] - frame.times[s];
        if (!(dt > 0.0))
            throw NumericError("adiabaticity_margin: non-increasing sample times");
        const Vector dpsi = (frame.eigenvectors[s + 1].col(ref) -
                             frame.eigenvectors[s].col(ref)) / dt;
        for (Eigen::Index c = 0; c < n; ++c) {
            if (c == ref)
                continue;
            const double gap = std::abs(frame.eigenvalues[s](c) - frame.eigenvalues[s](ref));
            if (gap < 1e-12)
                throw NumericError("adiabaticity_margin: spectral gap closure");
            const double coupling = std::abs((frame.eigenvectors[s].col(c).adjoint() * dpsi)(0));
            margin = std::max(margin, coupling / gap);
        }
    }
    return margin;
}

StirapResult simulate_stirap(const StirapParams& p) {
    const PulseSchedule sched = stirap_schedule(p);

    // drift-free Lambda system; slice_hamiltonian reproduces lambda_rwa
    Matrix x12 = Matrix::Zero(3, 3);
    x12(0, 1) = x12(1, 0) = -1.0;
    Matrix x23 = Matrix::Zero(3, 3);
    x23(1, 2) = x23(2, 1) = -1.0;
    const ControlSystem sys(HermitianOperator(Matrix::Zero(3, 3)),
                            {HermitianOperator(x12), HermitianOperator(x23)},
                            {"pump", "stokes"});

    const KetTrajectory traj = propagate_ket(sys, sched, Ket::basis_state(3, 0));

    const double t_c = 0.5 * (p.t0 + p.tF);
    StirapResult res;
    res.dark_overlap_min = 1.0;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const double t = traj.times[s];
        const Vector& psi = traj.states[s];
        res.times.push_back(t);
        res.populations.push_back(Eigen::Vector3d(psi.cwiseAbs2()));
        const double w1 = gaussian(t, p.omega0, t_c + 0.5 * p.delay, p.width);
        const double w2 = gaussian(t, p.omega0, t_c - 0.5 * p.delay, p.width);
        const double ov = std::norm((dark_state(w1, w2).adjoint() * psi)(0));
        res.dark_overlap.push_back(ov);
        res.dark_overlap_min = std::min(res.dark_overlap_min, ov);
        res.max_intermediate = std::max(res.max_intermediate, res.populations.back()(1));
    }
    res.efficiency = res.populations.back()(2);
    return res;
}

} // namespace qctrl
