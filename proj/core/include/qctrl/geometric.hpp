#pragma once

// Rotating-frame / RWA toolbox: transition table of the drift spectrum,
// shaped multi-frequency lab-frame fields, RWA control Hamiltonians,
// strong-regularity check, and SU(2) product decomposition with pulse
// synthesis.
//
// Level labels are 1-based ((1,2) is the transition between the two lowest
// eigenstates); a "pi pulse" on H = Omega sigma_x means Omega T = pi/2.

#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "qctrl/dynamics.hpp"

namespace qctrl {

using LevelPair = std::pair<int, int>; // (n, n') with n' > n, 1-based

// Drift eigenvalues (ascending), transition frequencies w_nn' = E_n' - E_n,
// and transition dipole moments.
struct TransitionTable {
    Eigen::VectorXd energies;
    std::map<LevelPair, double> dipoles;

    Eigen::Index dim() const { return energies.size(); }
    double frequency(const LevelPair& p) const;
    double dipole(const LevelPair& p) const;
};

// Builds the table from the drift spectrum; throws on degenerate energies
// (frequency addressing would be ill-defined).
TransitionTable transition_table(const HermitianOperator& h_s,
                                 const std::map<LevelPair, double>& dipoles);

struct StrongRegularityReport {
    bool regular = false;
    std::vector<std::pair<LevelPair, LevelPair>> offending;
};

// All pairwise transition-frequency gaps must exceed `separation`.
StrongRegularityReport strong_regularity(const TransitionTable& table, double separation);

struct GaussianEnvelope {
    double peak = 0.0;
    double center = 0.0;
    double width = 0.0; // sigma > 0
};

struct ConstantEnvelope {
    double amplitude = 0.0;
};

using Envelope = std::variant<ConstantEnvelope, GaussianEnvelope>;

double envelope_value(const Envelope& env, double t);

// One frequency component A_nn'(t) cos(w_nn' t + phi_nn') of a shaped field.
struct ShapedFieldComponent {
    LevelPair pair;
    Envelope envelope;
    double frequency = 0.0;
    double phase = 0.0;
};

// Samples the summed components at slice midpoints onto a single-field
// schedule.
PulseSchedule realize_field(const std::vector<ShapedFieldComponent>& components,
                            double t0, double dt, Eigen::Index slices);

// One resonant drive term in the RWA frame.
struct RwaDrive {
    LevelPair pair;
    double rabi = 0.0;  // Omega_nn' = A_nn'(t) d_nn' / 2
    double phase = 0.0; // phi_nn'
};

// Sum over drives of Omega (x_nn' cos phi + y_nn' sin phi) in the drift
// eigenbasis; drift-free and traceless by construction.
HermitianOperator rwa_hamiltonian(const TransitionTable& table,
                                  const std::vector<RwaDrive>& drives);

// Interaction-picture transform U_S(t)^dag H_C U_S(t), U_S(t) = exp(-i t H_S).
HermitianOperator rotating_frame(const HermitianOperator& h_c,
                                 const HermitianOperator& h_s, double t);

struct RwaProbeSpec {
    LevelPair pair{1, 2};
    double amplitude = 0.0; // lab-frame field amplitude A (constant envelope)
    double phase = 0.0;
    double duration = 0.0;
    Eigen::Index lab_slices = 0; // lab-frame grid resolution
};

struct RwaProbeReport {
    double max_population_deviation = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> lab_populations;
    std::vector<Eigen::VectorXd> rwa_populations;
};

// Propagates the full lab-frame system (drift + A cos(w t + phi) dipole
// coupling) against the RWA model over the same window and reports the
// worst population disagreement.
RwaProbeReport rwa_consistency_probe(const TransitionTable& table, const RwaProbeSpec& spec);

// One elementary rotation exp(-i c G / 2) realized as a constant pulse:
// coefficient = amplitude * duration.
struct RotationStep {
    int generator = 0; // index into the control list (0 = sigma_y, 1 = sigma_x here)
    double coefficient = 0.0;
    double duration = 0.0;
    double amplitude = 0.0;
};

inline constexpr int kGeneratorY = 0;
inline constexpr int kGeneratorX = 1;

// Euler-style Y-X-Y factorization: exp(-i c3 sy/2) exp(-i c2 sx/2)
// exp(-i c1 sy/2) = u up to global phase.  Steps are returned in
// application order (c1 first).
std::vector<RotationStep> decompose_su2(const Matrix& u);

// Turns rotation steps into a sequential bang-bang schedule: each step runs
// at |amplitude| <= f_max for ceil(|c| / (f_max dt)) slices, rescaled so the
// pulse area equals c exactly.  Field m of the schedule drives generator m.
PulseSchedule pulses_from_steps(const std::vector<RotationStep>& steps, double f_max,
                                double dt);

} // namespace qctrl
