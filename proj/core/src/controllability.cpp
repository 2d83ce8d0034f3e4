#include "qctrl/controllability.hpp"

#include <cmath>

namespace qctrl {

namespace {

const Complex kI(0.0, 1.0);

double hs_norm(const Matrix& m) { return std::sqrt(std::abs(hs_inner(m, m).real())); }

// Project `x` onto the orthogonal complement of the current basis span.
// The algebra is a REAL vector space, so only the real part of the inner
// product is removed; two passes guard against Gram-Schmidt drift.
Matrix orthogonalize(Matrix x, const std::vector<Matrix>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const Matrix& b : basis)
            x -= hs_inner(b, x).real() * b;
    return x;
}

// Admit the remainder of `cand` if it extends the span; keeps elements
// exactly anti-Hermitian.
bool try_admit(Matrix cand, std::vector<Matrix>& basis, double tol) {
    cand = 0.5 * (cand - cand.adjoint().eval());
    const double scale = hs_norm(cand);
    if (scale <= tol)
        return false;
    Matrix rem = orthogonalize(cand / scale, basis);
    const double r = hs_norm(rem);
    if (r <= tol)
        return false;
    basis.push_back(rem / r);
    return true;
}

} // namespace

const char* to_string(ControllabilityKind kind) {
    switch (kind) {
        case ControllabilityKind::FULL_U: return "FULL_U";
        case ControllabilityKind::FULL_SU: return "FULL_SU";
        case ControllabilityKind::NOT_FULL: return "NOT_FULL";
    }
    return "?";
}

LieBasis generate_lie_algebra(const ControlSystem& sys, Eigen::Index max_depth, double tol) {
    const Eigen::Index n = sys.dim();
    if (max_depth == 0)
        max_depth = 2 * n * n;
    if (max_depth < 1)
        throw NumericError("generate_lie_algebra: max_depth must be >= 1");

    std::vector<Matrix> gens;
    if (sys.drift().matrix().cwiseAbs().maxCoeff() > 0.0)
        gens.push_back(kI * sys.drift().matrix());
    for (const auto& c : sys.controls())
        if (c.matrix().cwiseAbs().maxCoeff() > 0.0)
            gens.push_back(kI * c.matrix());
    if (gens.empty())
        throw NumericError("generate_lie_algebra: no nonzero generators");

    LieBasis out;
    out.dim_hilbert = n;
    out.generators_used = gens.size();

    const std::size_t full = static_cast<std::size_t>(n * n);
    std::size_t frontier_begin = 0;
    for (Matrix& g : gens)
        try_admit(g / hs_norm(g), out.basis, tol);

    for (Eigen::Index depth = 0; depth < max_depth; ++depth) {
        const std::size_t frontier_end = out.basis.size();
        if (frontier_begin == frontier_end || out.basis.size() >= full)
            break;
        for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
            for (std::size_t j = 0; j < frontier_end; ++j) {
                if (out.basis.size() >= full)
                    break;
                try_admit(commutator(out.basis[i], out.basis[j]), out.basis, tol);
            }
        }
        if (out.basis.size() == frontier_end) {
            out.closed = true;
            break;
        }
        frontier_begin = frontier_end;
    }
    if (out.basis.size() >= full)
        out.closed = true;
    // a pass with no admissions also means closure; detect the case where
    // the loop exited on the depth cap mid-growth
    if (!out.closed) {
        bool grew = false;
        for (std::size_t i = 0; i < out.basis.size() && !grew; ++i)
            for (std::size_t j = 0; j < out.basis.size() && !grew; ++j) {
                std::vector<Matrix> probe = out.basis;
                if (try_admit(commutator(out.basis[i], out.basis[j]), probe, tol))
                    grew = true;
            }
        out.closed = !grew;
    }
    return out;
}

ControllabilityVerdict is_controllable(const ControlSystem& sys, double tol) {
    const LieBasis lie = generate_lie_algebra(sys, 0, tol);
    const std::size_t n = static_cast<std::size_t>(sys.dim());
    const std::size_t full_u = n * n;

    ControllabilityVerdict v;
    v.lie_dimension = lie.dimension();
    if (lie.dimension() == full_u) {
        v.kind = ControllabilityKind::FULL_U;
        v.required = full_u;
        return v;
    }
    if (lie.dimension() == full_u - 1) {
        // su(N) iff the identity direction i*I has no component in the span
        const Matrix id_dir = kI * Matrix::Identity(sys.dim(), sys.dim()) /
                              std::sqrt(static_cast<double>(n));
        double proj = 0.0;
        for (const Matrix& b : lie.basis)
            proj = std::max(proj, std::abs(hs_inner(b, id_dir).real()));
        if (proj <= tol * 10.0) {
            v.kind = ControllabilityKind::FULL_SU;
            v.required = full_u - 1;
            return v;
        }
    }
    v.kind = ControllabilityKind::NOT_FULL;
    v.required = full_u - 1;
    return v;
}

OrthogonalityReport orthogonality_check(const std::vector<HermitianOperator>& controls,
                                        double tol) {
    if (controls.empty())
        throw NumericError("orthogonality_check: empty control list");
    const Eigen::Index m = static_cast<Eigen::Index>(controls.size());
    for (const auto& c : controls)
        if (c.dim() != controls.front().dim())
            throw NumericError("orthogonality_check: dimension mismatch");

    OrthogonalityReport rep;
    rep.gram.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            rep.gram(a, b) = hs_inner(controls[static_cast<std::size_t>(a)].matrix(),
                                      controls[static_cast<std::size_t>(b)].matrix()).real();

    const double dmax = rep.gram.diagonal().maxCoeff();
    const double dmin = rep.gram.diagonal().minCoeff();
    bool ok = dmax > 0.0 && (dmax - dmin) <= tol * dmax;
    for (Eigen::Index a = 0; a < m && ok; ++a)
        for (Eigen::Index b = 0; b < m && ok; ++b)
            if (a != b && std::abs(rep.gram(a, b)) > tol * dmax)
                ok = false;
    rep.orthogonal = ok;
    return rep;
}

} // namespace qctrl
