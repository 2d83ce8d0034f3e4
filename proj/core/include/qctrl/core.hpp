#pragma once

// Complex-matrix foundation: states, operators, Hilbert-Schmidt inner
// product, skew exponential, and validity checks.  All energies and times
// are in units with hbar = 1.  Level 1 of an N-level system is the first
// basis vector (index 0 in code).

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qctrl/errors.hpp"

namespace qctrl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-10;

// ---------------------------------------------------------------------------
// Elementary operators
// ---------------------------------------------------------------------------

Matrix identity(Eigen::Index n);
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();

bool all_finite(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol);

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Hermitian matrix (observable or Hamiltonian).  Validated on construction;
// hermiticity tolerance is relative to the matrix norm.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m, double tol = 1e-12);

    const Matrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

private:
    Matrix mat_;
};

// Unit-norm Hilbert space vector.
class Ket {
public:
    explicit Ket(Vector amplitudes, double tol = kDefaultTol);

    static Ket basis_state(Eigen::Index dim, Eigen::Index level);

    const Vector& amplitudes() const { return amps_; }
    Eigen::Index dim() const { return amps_.size(); }
    double norm() const { return amps_.norm(); }

private:
    Vector amps_;
};

// Positive trace-one matrix.  Use validate_density() to construct from raw
// data with a caller-chosen tolerance.
class DensityOperator {
public:
    explicit DensityOperator(Matrix m, double tol = kDefaultTol);

    const Matrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }
    double purity() const { return (mat_ * mat_).trace().real(); }

private:
    Matrix mat_;
};

// ---------------------------------------------------------------------------
// Eigendecomposition with deterministic output
// ---------------------------------------------------------------------------

// Eigenvalues ascending; each eigenvector's largest-magnitude component is
// made real positive so repeated runs give identical matrices.
struct Eigensystem {
    Eigen::VectorXd values;
    Matrix vectors; // columns are eigenvectors
};

Eigensystem eig_hermitian(const Matrix& m);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// ab - ba
Matrix commutator(const Matrix& a, const Matrix& b);

// exp(-i s H) via eigendecomposition of H; unitary to machine precision.
Matrix expm_skew(const HermitianOperator& h, double s);

// Hilbert-Schmidt inner product Tr[a^dag b].
Complex hs_inner(const Matrix& a, const Matrix& b);

// Re Tr[A rho]; throws if the imaginary part exceeds 1e-10.
double expectation(const HermitianOperator& a, const DensityOperator& rho);

// |psi><psi|
DensityOperator pure_state_density(const Ket& psi);

// Checks hermiticity, unit trace and positivity; the error message lists
// every violated invariant.
DensityOperator validate_density(const Matrix& m, double tol = kDefaultTol);

// True iff rho has dim() pairwise-distinct eigenvalues (separation > tol),
// i.e. it is a generic ensemble for which state, observable and process
// engineering coincide.
bool is_generic_ensemble(const DensityOperator& rho, double tol);

} // namespace qctrl
