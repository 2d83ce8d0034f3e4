#include "qctrl/core.hpp"

#include <cmath>
#include <sstream>

namespace qctrl {

namespace {
const Complex kI(0.0, 1.0);
}

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0.0, -kI,
         kI, 0.0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

bool is_hermitian(const Matrix& m, double tol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermitianOperator::HermitianOperator(Matrix m, double tol) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols())
        throw NumericError("HermitianOperator: matrix must be square");
    if (!all_finite(mat_))
        throw NumericError("HermitianOperator: non-finite entries");
    const double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
    if (!is_hermitian(mat_, tol * scale))
        throw NumericError("HermitianOperator: matrix not Hermitian within tolerance");
    mat_ = 0.5 * (mat_ + mat_.adjoint().eval()); // exact symmetrization
}

Ket::Ket(Vector amplitudes, double tol) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0)
        throw NumericError("Ket: empty amplitude vector");
    if (!amps_.allFinite())
        throw NumericError("Ket: non-finite amplitudes");
    if (std::abs(amps_.norm() - 1.0) > tol)
        throw NumericError("Ket: norm deviates from 1 beyond tolerance");
}

Ket Ket::basis_state(Eigen::Index dim, Eigen::Index level) {
    if (level < 0 || level >= dim)
        throw NumericError("Ket::basis_state: level out of range");
    Vector v = Vector::Zero(dim);
    v(level) = 1.0;
    return Ket(v);
}

DensityOperator::DensityOperator(Matrix m, double tol) : mat_(std::move(m)) {
    std::ostringstream bad;
    if (mat_.rows() != mat_.cols())
        throw NumericError("DensityOperator: matrix must be square");
    if (!all_finite(mat_))
        throw NumericError("DensityOperator: non-finite entries");
    if (!is_hermitian(mat_, tol))
        bad << "not Hermitian (max |rho - rho^dag| = "
            << (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() << "); ";
    const double tr = mat_.trace().real();
    if (std::abs(tr - 1.0) > tol)
        bad << "trace = " << tr << " differs from 1; ";
    const Matrix herm = 0.5 * (mat_ + mat_.adjoint().eval());
    const Eigensystem es = eig_hermitian(herm);
    if (es.values.minCoeff() < -10.0 * tol)
        bad << "negative eigenvalue " << es.values.minCoeff() << "; ";
    const std::string msg = bad.str();
    if (!msg.empty())
        throw NumericError("DensityOperator: " + msg);
}

Eigensystem eig_hermitian(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success)
        throw NumericError("eig_hermitian: eigensolver failed to converge");
    Eigensystem sys{es.eigenvalues(), es.eigenvectors()};
    // fix each eigenvector's phase: largest-magnitude component real positive
    for (Eigen::Index c = 0; c < sys.vectors.cols(); ++c) {
        Eigen::Index imax = 0;
        sys.vectors.col(c).cwiseAbs().maxCoeff(&imax);
        const Complex z = sys.vectors(imax, c);
        if (std::abs(z) > 0.0)
            sys.vectors.col(c) *= std::conj(z) / std::abs(z);
    }
    return sys;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw NumericError("commutator: dimension mismatch");
    return a * b - b * a;
}

Matrix expm_skew(const HermitianOperator& h, double s) {
    if (!std::isfinite(s))
        throw NumericError("expm_skew: non-finite time");
    const Eigensystem es = eig_hermitian(h.matrix());
    Vector phases(es.values.size());
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        phases(k) = std::exp(Complex(0.0, -s * es.values(k)));
    return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw NumericError("hs_inner: dimension mismatch");
    return (a.adjoint() * b).trace();
}

double expectation(const HermitianOperator& a, const DensityOperator& rho) {
    if (a.dim() != rho.dim())
        throw NumericError("expectation: dimension mismatch");
    const Complex tr = (a.matrix() * rho.matrix()).trace();
    if (std::abs(tr.imag()) > 1e-10)
        throw NumericError("expectation: Tr[A rho] has non-negligible imaginary part");
    return tr.real();
}

DensityOperator pure_state_density(const Ket& psi) {
    Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
    return validate_density(rho, 1e-9);
}

DensityOperator validate_density(const Matrix& m, double tol) {
    return DensityOperator(m, tol);
}

bool is_generic_ensemble(const DensityOperator& rho, double tol) {
    Eigen::VectorXd ev = eig_hermitian(rho.matrix()).values;
    for (Eigen::Index i = 0; i + 1 < ev.size(); ++i)
        if (ev(i + 1) - ev(i) <= tol)
            return false;
    return true;
}

} // namespace qctrl
