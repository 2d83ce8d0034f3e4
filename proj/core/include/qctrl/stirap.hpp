#pragma once

// STIRAP on the three-level Lambda system: resonant RWA Hamiltonian, mixing
// angle and dark state, Gaussian counter-intuitive pulse pair, instantaneous
// eigenframe, adiabaticity margin, and the transfer-efficiency simulation.

#include <vector>

#include "qctrl/dynamics.hpp"

namespace qctrl {

// Gaussian pulse-pair parameters.  delay > 0 gives the counter-intuitive
// order (Stokes peaks before pump).
struct StirapParams {
    double omega0 = 0.0; // peak Rabi frequency of both pulses
    double width = 0.0;  // Gaussian sigma
    double delay = 0.0;  // pump-minus-Stokes peak separation
    double t0 = 0.0;
    double tF = 0.0;
    Eigen::Index slices = 0;
};

// -[[0, W1, 0], [W1, 0, W2], [0, W2, 0]]; spectrum {-W, 0, +W} with
// W = sqrt(W1^2 + W2^2).
HermitianOperator lambda_rwa(double omega1, double omega2);

// theta = atan2(|W1|, |W2|) in [0, pi/2]; the dark state is
// cos(theta)|1> - sin(theta)|3>.
double mixing_angle(double omega1, double omega2);

// Two-field schedule: field 0 is the pump (1-2), field 1 the Stokes (2-3).
PulseSchedule stirap_schedule(const StirapParams& p);

// Instantaneous eigendecomposition along a Hamiltonian sequence.  Curves are
// ordered by continuity (max overlap with the previous sample) and the
// eigenvector phase is fixed so consecutive overlaps have non-negative real
// part.
struct EigenFrame {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> eigenvalues;
    std::vector<Matrix> eigenvectors; // columns follow the continuity ordering
};

EigenFrame eigenframe(const std::vector<HermitianOperator>& hamiltonians,
                      const std::vector<double>& times = {});

// max over samples of |<Psi_pm| dPsi_0/dt>| / |lambda_pm - lambda_0| for the
// middle (dark) curve; small values mean adiabatic following.
double adiabaticity_margin(const EigenFrame& frame);

struct StirapResult {
    double efficiency = 0.0;       // final population of level 3
    double max_intermediate = 0.0; // max population of level 2 over time
    double dark_overlap_min = 0.0; // min |<Psi_0(t)|psi(t)>|^2
    std::vector<double> times;
    std::vector<Eigen::Vector3d> populations;
    std::vector<double> dark_overlap;
};

StirapResult simulate_stirap(const StirapParams& p);

} // namespace qctrl
