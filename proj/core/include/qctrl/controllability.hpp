#pragma once

// Dynamical Lie algebra generated by {i H_S, i H_m} and the full-
// controllability test: the system can realize any unitary process (up to
// global phase) iff the algebra is u(N) or su(N).

#include <vector>

#include "qctrl/dynamics.hpp"

namespace qctrl {

// Orthonormal basis (Hilbert-Schmidt inner product, real span) of the
// generated Lie algebra.  Elements are anti-Hermitian.
struct LieBasis {
    Eigen::Index dim_hilbert = 0;
    std::size_t generators_used = 0;
    std::vector<Matrix> basis;
    bool closed = false; // closure reached, as opposed to hitting the depth cap

    std::size_t dimension() const { return basis.size(); }
};

enum class ControllabilityKind { FULL_U, FULL_SU, NOT_FULL };

struct ControllabilityVerdict {
    ControllabilityKind kind = ControllabilityKind::NOT_FULL;
    std::size_t lie_dimension = 0;
    std::size_t required = 0; // N^2 for u(N), N^2 - 1 for su(N)
};

const char* to_string(ControllabilityKind kind);

// Breadth-first commutator closure with modified Gram-Schmidt admission.
// Generators are normalized before seeding so field units cannot change the
// result.  Default depth cap is 2 N^2 when max_depth == 0.
LieBasis generate_lie_algebra(const ControlSystem& sys, Eigen::Index max_depth = 0,
                              double tol = 1e-9);

ControllabilityVerdict is_controllable(const ControlSystem& sys, double tol = 1e-9);

struct OrthogonalityReport {
    bool orthogonal = false;
    Eigen::MatrixXd gram; // G_mn = Tr[H_m H_n]
};

// True iff Tr[H_m H_n] = const * delta_mn within tol (relative to the
// largest diagonal entry).
OrthogonalityReport orthogonality_check(const std::vector<HermitianOperator>& controls,
                                        double tol = 1e-9);

} // namespace qctrl
