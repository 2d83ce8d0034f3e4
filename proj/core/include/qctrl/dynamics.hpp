#pragma once

// Propagation of closed and open dynamics under piecewise-constant controls,
// the total time-ordered propagator, and fidelity measures.
//
// Conventions: the field value of slice k applies on
// [t0 + (k-1) dt, t0 + k dt); trajectories record states at slice boundaries.
// Later slices multiply the propagator on the LEFT (positive time-ordering).

#include <optional>
#include <string>
#include <vector>

#include "qctrl/core.hpp"

namespace qctrl {

// Drift Hamiltonian H_S plus control Hamiltonians {H_m}, control-linear:
// H(f) = H_S + sum_m f_m H_m.
class ControlSystem {
public:
    ControlSystem(HermitianOperator drift,
                  std::vector<HermitianOperator> controls,
                  std::vector<std::string> labels = {});

    Eigen::Index dim() const { return drift_.dim(); }
    std::size_t num_controls() const { return controls_.size(); }
    const HermitianOperator& drift() const { return drift_; }
    const std::vector<HermitianOperator>& controls() const { return controls_; }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    HermitianOperator drift_;
    std::vector<HermitianOperator> controls_;
    std::vector<std::string> labels_;
};

// Piecewise-constant control fields on a uniform grid: values(k, m) is the
// value of field m during slice k (0-based).
class PulseSchedule {
public:
    PulseSchedule(double t0, double dt, Eigen::MatrixXd values,
                  std::optional<double> f_max = std::nullopt);

    double t0() const { return t0_; }
    double dt() const { return dt_; }
    Eigen::Index num_slices() const { return values_.rows(); }
    Eigen::Index num_fields() const { return values_.cols(); }
    const Eigen::MatrixXd& values() const { return values_; }
    std::optional<double> f_max() const { return f_max_; }

    double boundary_time(Eigen::Index k) const { return t0_ + dt_ * static_cast<double>(k); }
    double midpoint_time(Eigen::Index k) const { return t0_ + dt_ * (static_cast<double>(k) + 0.5); }
    double duration() const { return dt_ * static_cast<double>(num_slices()); }

    static PulseSchedule zero(double t0, double dt, Eigen::Index slices, Eigen::Index fields);

private:
    double t0_;
    double dt_;
    Eigen::MatrixXd values_;
    std::optional<double> f_max_;
};

// One dissipation channel of the diagonal Lindblad form:
// gamma (L rho L^dag - 1/2 {L^dag L, rho}).
struct LindbladChannel {
    Matrix op;
    double rate = 0.0;
};

struct KetTrajectory {
    std::vector<double> times;
    std::vector<Vector> states;
};

struct DensityTrajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
};

// H_S + sum_m f_m H_m
HermitianOperator slice_hamiltonian(const ControlSystem& sys, const Eigen::VectorXd& fields);

// Time-ordered product of slice propagators exp(-i dt H_k).
Matrix total_propagator(const ControlSystem& sys, const PulseSchedule& sched);

// Closed-system propagation; states recorded every `record_every` slice
// boundaries (the initial and final states are always included).
KetTrajectory propagate_ket(const ControlSystem& sys, const PulseSchedule& sched,
                            const Ket& psi0, Eigen::Index record_every = 1);

DensityTrajectory propagate_density(const ControlSystem& sys, const PulseSchedule& sched,
                                    const DensityOperator& rho0, Eigen::Index record_every = 1);

// Lindblad master equation with piecewise-constant H, integrated by
// fixed-step RK4 with `substeps` steps per slice.
DensityTrajectory propagate_open(const ControlSystem& sys, const PulseSchedule& sched,
                                 const std::vector<LindbladChannel>& channels,
                                 const DensityOperator& rho0, Eigen::Index substeps,
                                 Eigen::Index record_every = 1);

// |Tr[target^dag u]|^2 / N^2, invariant under global phase.
double gate_fidelity(const Matrix& u, const Matrix& target);

// <target| rho |target>
double transfer_fidelity(const DensityOperator& rho, const Ket& target);

} // namespace qctrl
