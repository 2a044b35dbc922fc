#pragma once

// Linear maps between Gram spaces. Adjoints are taken with respect to the Gram
// inner products of domain and codomain: M# = G_dom^{-1} M^H G_cod.

#include <limits>
#include <string>

#include "triplet_forge/spaces.hpp"

namespace triplet_forge {

class MappedOperator {
public:
    MappedOperator(ComplexMatrix matrix, GramSpace domain, GramSpace codomain)
        : matrix_(std::move(matrix)), domain_(std::move(domain)), codomain_(std::move(codomain)) {
        if (matrix_.rows() != codomain_.dim() || matrix_.cols() != domain_.dim()) {
            throw Error(ErrorKind::DimensionMismatch,
                        "operator matrix " + std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()) +
                            " does not map dim " + std::to_string(domain_.dim()) + " to dim " +
                            std::to_string(codomain_.dim()));
        }
        detail::require_finite(matrix_, "operator matrix");
    }

    /// The map acting as the identity on shared coordinates.
    static MappedOperator identity(const GramSpace& from, const GramSpace& to) {
        if (from.dim() != to.dim()) throw Error(ErrorKind::DimensionMismatch, "identity between different dims");
        return MappedOperator(ComplexMatrix::Identity(to.dim(), from.dim()), from, to);
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    const GramSpace& domain() const { return domain_; }
    const GramSpace& codomain() const { return codomain_; }

    ComplexVector operator()(const ComplexVector& x) const {
        if (x.size() != domain_.dim()) throw Error(ErrorKind::DimensionMismatch, "operator applied to wrong length");
        return matrix_ * x;
    }

    bool is_endomorphism() const { return domain_.same_as(codomain_); }

private:
    ComplexMatrix matrix_;
    GramSpace domain_;
    GramSpace codomain_;
};

/// outer o inner
inline MappedOperator compose(const MappedOperator& outer, const MappedOperator& inner) {
    if (!inner.codomain().same_as(outer.domain())) {
        throw Error(ErrorKind::SpaceMismatch, "composition of '" + outer.domain().label() + "' after '" +
                                                  inner.codomain().label() + "'");
    }
    return MappedOperator(outer.matrix() * inner.matrix(), inner.domain(), outer.codomain());
}

inline MappedOperator adjoint(const MappedOperator& m) {
    ComplexMatrix a = m.domain().gram_inverse() * m.matrix().adjoint() * m.codomain().gram();
    return MappedOperator(std::move(a), m.codomain(), m.domain());
}

/// G_cod^{1/2} M G_dom^{-1/2}: the matrix of M in orthonormal coordinates.
inline ComplexMatrix whitened(const MappedOperator& m) {
    return m.codomain().gram_sqrt() * m.matrix() * m.domain().gram_inv_sqrt();
}

/// Moore-Penrose inverse with respect to the Gram inner products.
inline MappedOperator weighted_pinv(const MappedOperator& m, double rtol = kDefaultRtol) {
    if (!(rtol > 0.0)) throw Error(ErrorKind::InvalidArgument, "rtol must be positive");
    if (is_invertible(m.matrix(), rtol)) {
        return MappedOperator(matrix_inverse(m.matrix()), m.codomain(), m.domain());
    }
    ComplexMatrix x = m.domain().gram_inv_sqrt() * pinv(whitened(m), rtol) * m.codomain().gram_sqrt();
    return MappedOperator(std::move(x), m.codomain(), m.domain());
}

inline MappedOperator inverse(const MappedOperator& m, double rtol = kDefaultRtol) {
    if (!is_invertible(m.matrix(), rtol)) {
        throw Error(ErrorKind::NotInvertible, "operator into '" + m.codomain().label() + "' is not invertible");
    }
    return MappedOperator(matrix_inverse(m.matrix()), m.codomain(), m.domain());
}

/// ||G M - (G M)^H||_F / (1 + ||G M||_F) for an operator of a space into itself.
inline double selfadjoint_defect(const MappedOperator& m) {
    if (!m.is_endomorphism()) throw Error(ErrorKind::SpaceMismatch, "selfadjointness needs domain == codomain");
    const ComplexMatrix gm = m.domain().gram() * m.matrix();
    return hermitian_defect(gm) / (1.0 + gm.norm());
}

/// Spectrum of a selfadjoint operator (ascending), read in orthonormal coordinates.
inline EigenDecomposition selfadjoint_eigen(const MappedOperator& m) {
    if (!m.is_endomorphism()) throw Error(ErrorKind::SpaceMismatch, "spectrum needs domain == codomain");
    return hermitian_eigen(whitened(m));
}

/// Positive square root of a positive selfadjoint operator of a Gram space.
inline MappedOperator operator_sqrt(const MappedOperator& m) {
    if (!m.is_endomorphism()) throw Error(ErrorKind::SpaceMismatch, "square root needs domain == codomain");
    const GramSpace& g = m.domain();
    ComplexMatrix root = g.gram_inv_sqrt() * positive_sqrt(whitened(m)) * g.gram_sqrt();
    return MappedOperator(std::move(root), g, g);
}

inline RealVector weighted_singular_values(const MappedOperator& m) { return singular_values(whitened(m)); }

/// Smallest weighted singular value exceeds 1e-10 times the largest.
inline bool is_boundedly_invertible(const MappedOperator& m) {
    if (m.matrix().rows() != m.matrix().cols()) return false;
    const RealVector s = weighted_singular_values(m);
    return s(0) > 0.0 && s(s.size() - 1) > 1e-10 * s(0);
}

struct ContractionVerdict {
    bool holds;
    double margin;            ///< min eigenvalue of I - G_d^{-1/2} M^H G_c M G_d^{-1/2}
    ComplexVector witness;    ///< domain vector realising the margin
};

inline ContractionVerdict is_contraction(const MappedOperator& m, double tol = 0.0) {
    if (tol < 0.0) throw Error(ErrorKind::InvalidArgument, "tol must be non-negative");
    const ComplexMatrix w = whitened(m);
    const Index n = m.domain().dim();
    const ComplexMatrix gap = ComplexMatrix::Identity(n, n) - hermitian_part(w.adjoint() * w);
    const EigenDecomposition eig = hermitian_eigen(gap);
    ComplexVector witness = m.domain().gram_inv_sqrt() * eig.eigenvectors.col(0);
    const double margin = eig.eigenvalues(0);
    return {margin >= -tol, margin, std::move(witness)};
}

struct ResidualVerdict {
    bool holds;
    double residual;
};

/// Gram-unitary: M^H G_cod M = G_dom (relative to 1 + ||G_dom||_F) and M invertible.
inline ResidualVerdict is_unitary(const MappedOperator& m, double tol = 1e-9, double rtol = kDefaultRtol) {
    if (!is_invertible(m.matrix(), rtol)) return {false, std::numeric_limits<double>::infinity()};
    const ComplexMatrix& gd = m.domain().gram();
    const ComplexMatrix form = m.matrix().adjoint() * m.codomain().gram() * m.matrix();
    const double residual = (form - gd).norm() / (1.0 + gd.norm());
    return {residual <= tol, residual};
}

/// M M# = identity on the codomain.
inline ResidualVerdict is_coisometry(const MappedOperator& m, double tol = 1e-9) {
    const ComplexMatrix prod = m.matrix() * adjoint(m).matrix();
    const double residual = (prod - ComplexMatrix::Identity(prod.rows(), prod.cols())).norm();
    return {residual <= tol, residual};
}

}  // namespace triplet_forge
