#pragma once

// The two model constructions of closely embedded spaces:
//   D(T): ker(T)-perp renormed by |x|_T = ||T x||, embedded by i_T x = x;
//   R(T): Ran(T) with <T x, T y>_T = <x, y> (x, y perp ker T), embedded by j_T u = u.
// Completion is a no-op at finite dimension.

#include <algorithm>
#include <string>

#include "triplet_forge/certificate.hpp"
#include "triplet_forge/operators.hpp"

namespace triplet_forge {

struct DSpace {
    GramSpace space;
    ComplexMatrix basis;       ///< P: coordinates of ker(T)-perp in the domain of T
    MappedOperator embedding;  ///< i_T: c -> P c
    bool basis_is_identity;
};

struct RSpace {
    GramSpace space;
    ComplexMatrix basis;       ///< Q: coordinates of Ran(T) in the codomain of T
    MappedOperator embedding;  ///< j_T: c -> Q c
    bool basis_is_identity;
};

namespace detail {

/// Deterministic G-orthonormal basis of span(columns): eigenvectors of the
/// whitened orthogonal projector with eigenvalue ~1, in ascending order.
inline ComplexMatrix orthonormal_span_basis(const ComplexMatrix& columns, const GramSpace& g, double rtol) {
    const ComplexMatrix w = g.gram_sqrt() * columns;
    const ComplexMatrix projector = hermitian_part(w * pinv(w, rtol));
    const EigenDecomposition eig = hermitian_eigen(projector);
    const Index n = eig.eigenvalues.size();
    Index first = n;
    while (first > 0 && eig.eigenvalues(first - 1) > 0.5) --first;
    return g.gram_inv_sqrt() * eig.eigenvectors.rightCols(n - first);
}

/// Right null space of m (columns span ker m), from the SVD with relative cut.
inline ComplexMatrix null_space(const ComplexMatrix& m, double rtol) {
    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    const double cut = s.size() > 0 ? rtol * s(0) : 0.0;
    Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

inline ComplexMatrix column_space(const ComplexMatrix& m, double rtol) {
    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU);
    const RealVector& s = svd.singularValues();
    const double cut = s.size() > 0 ? rtol * s(0) : 0.0;
    Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return svd.matrixU().leftCols(r);
}

inline void require_nonzero(const MappedOperator& t) {
    if (t.matrix().isZero(0.0)) throw Error(ErrorKind::ZeroOperator, "operator is identically zero");
}

}  // namespace detail

inline DSpace build_D(const MappedOperator& t, double rtol = kDefaultRtol) {
    detail::require_nonzero(t);
    const GramSpace& in = t.domain();
    const GramSpace& out = t.codomain();
    ComplexMatrix basis;
    bool identity = false;
    if (is_injective(t.matrix(), rtol)) {
        basis = ComplexMatrix::Identity(in.dim(), in.dim());
        identity = true;
    } else {
        // ker(T)-perp in the G_in metric = G_in^{-1} (ker T)-perp in whitened coordinates;
        // span it by the G_in-orthogonal complement of the null space.
        const ComplexMatrix kernel = detail::null_space(t.matrix(), rtol);
        const ComplexMatrix wk = in.gram_sqrt() * kernel;
        const ComplexMatrix complement_projector =
            ComplexMatrix::Identity(in.dim(), in.dim()) - hermitian_part(wk * pinv(wk, rtol));
        const EigenDecomposition eig = hermitian_eigen(hermitian_part(complement_projector));
        const Index n = eig.eigenvalues.size();
        Index first = n;
        while (first > 0 && eig.eigenvalues(first - 1) > 0.5) --first;
        basis = in.gram_inv_sqrt() * eig.eigenvectors.rightCols(n - first);
    }
    const ComplexMatrix tp = t.matrix() * basis;
    GramSpace space(hermitian_part(tp.adjoint() * out.gram() * tp), "D(T)", in.models_countable());
    MappedOperator embedding(basis, space, in);
    return {space, basis, embedding, identity};
}

inline RSpace build_R(const MappedOperator& t, double rtol = kDefaultRtol) {
    detail::require_nonzero(t);
    const GramSpace& in = t.domain();
    const GramSpace& out = t.codomain();
    ComplexMatrix basis;
    bool identity = false;
    if (is_surjective(t.matrix(), rtol)) {
        basis = ComplexMatrix::Identity(out.dim(), out.dim());
        identity = true;
    } else {
        basis = detail::orthonormal_span_basis(detail::column_space(t.matrix(), rtol), out, rtol);
    }
    const ComplexMatrix preimage = weighted_pinv(t, rtol).matrix() * basis;
    GramSpace space(hermitian_part(preimage.adjoint() * in.gram() * preimage), "R(T)", out.models_countable());
    MappedOperator embedding(basis, space, out);
    return {space, basis, embedding, identity};
}

/// The coisometry U_T : domain(T) -> R(T) with T = j_T U_T.
inline MappedOperator coisometry_factor(const MappedOperator& t, const RSpace& r, double tol = 1e-9) {
    const GramSpace& out = t.codomain();
    ComplexMatrix u;
    if (r.basis_is_identity) {
        u = t.matrix();
    } else {
        const ComplexMatrix qg = r.basis.adjoint() * out.gram();
        u = (qg * r.basis).ldlt().solve(qg * t.matrix());
    }
    MappedOperator factor(std::move(u), t.domain(), r.space);
    const double residual = relative_residual(r.basis * factor.matrix(), t.matrix());
    if (!(residual <= tol)) {
        throw Error(ErrorKind::FactorizationResidual, "j_T U_T differs from T by " + std::to_string(residual));
    }
    return factor;
}

/// A = j j#, an operator of j's codomain into itself.
inline MappedOperator kernel_operator(const MappedOperator& j) { return compose(j, adjoint(j)); }

namespace detail {

inline ComplexVector preimage_in_range(const ComplexVector& u, const MappedOperator& t, double rtol,
                                       double range_tol) {
    detail::require_nonzero(t);
    if (u.size() != t.codomain().dim()) throw Error(ErrorKind::DimensionMismatch, "vector not in codomain of T");
    const ComplexVector x = weighted_pinv(t, rtol).matrix() * u;
    if (is_surjective(t.matrix(), rtol)) return x;
    const double gap = t.codomain().norm(u - t.matrix() * x);
    const double scale = t.codomain().norm(u);
    if (gap > range_tol * scale) {
        throw Error(ErrorKind::NotInRange, "distance to Ran(T) is " + std::to_string(gap) + " for |u| = " +
                                               std::to_string(scale));
    }
    return x;
}

}  // namespace detail

/// sup { |<u, v>| / ||T# v|| : T# v != 0 } for u in Ran(T); equals the R(T) norm of u.
inline double dual_norm(const ComplexVector& u, const MappedOperator& t, double rtol = kDefaultRtol,
                        double range_tol = 1e-9) {
    return t.domain().norm(detail::preimage_in_range(u, t, rtol, range_tol));
}

/// A vector v attaining the supremum in dual_norm: v = (T#)^+ T^+ u.
inline ComplexVector dual_norm_maximizer(const ComplexVector& u, const MappedOperator& t,
                                         double rtol = kDefaultRtol) {
    const ComplexVector x = detail::preimage_in_range(u, t, rtol, 1e-9);
    return weighted_pinv(adjoint(t), rtol).matrix() * x;
}

/// |<u, v>_cod| / ||T# v||_dom
inline double dual_quotient(const ComplexVector& u, const ComplexVector& v, const MappedOperator& t) {
    const ComplexVector tv = adjoint(t).matrix() * v;
    return std::abs(t.codomain().inner(u, v)) / t.domain().norm(tv);
}

/// Composition identities for D(T): (i_T i_T#)(T#T) x = x on ker(T)-perp and
/// (T#T)(i_T i_T#) u = u on Ran(T#T).
inline Section verify_p_dete(const MappedOperator& t, double tol = 1e-9, double rtol = kDefaultRtol) {
    Section s{"D(T) closed embedding identities", {}};
    const DSpace d = build_D(t, rtol);
    const MappedOperator a = kernel_operator(d.embedding);
    const MappedOperator h = compose(adjoint(t), t);
    const bool trivial_kernel = d.basis.cols() == t.domain().dim();

    const ComplexMatrix lhs_c = a.matrix() * h.matrix() * d.basis;
    s.add(numeric_check("kernel-op-inverts-TsharpT-on-ker-perp", "D(T): (i_T i_T*)(T*T)x = x on Dom(T*T) - ker T",
                        relative_residual(lhs_c, d.basis), tol,
                        "checked on a basis of ker(T)-perp (dim " + std::to_string(d.basis.cols()) + ")"));

    const ComplexMatrix range_basis = h.matrix() * d.basis;
    const ComplexMatrix lhs_d = h.matrix() * a.matrix() * range_basis;
    s.add(numeric_check("TsharpT-inverts-kernel-op-on-range", "D(T): (T*T)(i_T i_T*)u = u on Ran(T*T)",
                        relative_residual(lhs_d, range_basis), tol, "checked on a spanning set of Ran(T#T)"));

    const double renorm = relative_residual(
        (t.matrix() * d.basis).adjoint() * t.codomain().gram() * (t.matrix() * d.basis), d.space.gram());
    s.add(numeric_check("renorming-isometry", "D(T): T i_T extends to an isometry D(T) -> G", renorm, tol));

    s.add(structural_check(
        "domain-inclusions", "D(T): Ran(T*) in Dom(i_T*), Ran(T*T) in Dom(i_T i_T*)", Verdict::PassStructural,
        trivial_kernel ? "finite dimension: every domain is the whole space, equalities hold (ker T = 0)"
                       : "ker T != 0: only the inclusions are asserted; equalities are not claimed"));
    return s;
}

/// Kernel-operator theorem for an injective embedding j : H+ -> H.
inline Section verify_kernel_theorem(const MappedOperator& j, double tol = 1e-9, double rtol = kDefaultRtol) {
    Section s{"kernel operator of a closed embedding", {}};
    if (!is_injective(j.matrix(), rtol)) throw Error(ErrorKind::NotInjective, "embedding is not injective");
    const GramSpace& hp = j.domain();
    const GramSpace& h = j.codomain();
    const MappedOperator jsharp = adjoint(j);
    const MappedOperator a = compose(j, jsharp);
    const MappedOperator root = operator_sqrt(a);

    auto span_gap = [&](const ComplexMatrix& x) {
        ComplexMatrix both(x.rows(), x.cols() + j.matrix().cols());
        both << x, j.matrix();
        const Index rj = rank(j.matrix(), rtol);
        return static_cast<double>(std::abs(rank(x, rtol) - rj) + std::abs(rank(both, rtol) - rj));
    };
    const bool diag = is_diagonal(root.matrix()) && is_diagonal(j.matrix());
    const double a_gap = diag ? (is_injective(root.matrix()) == is_injective(j.matrix()) ? 0.0 : 1.0)
                              : span_gap(root.matrix());
    s.add(numeric_check("a-root-range-equals-domain", "kernel theorem (a): Ran(A^1/2) = Dom(j+)", a_gap, 0.0,
                        "span equality by rank; density is span equality at finite dimension"));

    // <x, y>_H = <x, A y>_+ for x = j c, y in H.
    const MappedOperator jinv = weighted_pinv(j, rtol);
    const ComplexMatrix lhs = h.gram() * j.matrix();
    const ComplexMatrix rhs = (jinv.matrix() * a.matrix()).adjoint() * hp.gram();
    s.add(numeric_check("b-pairing-identity", "kernel theorem (b): <x,y>_H = <x,Ay>_+", relative_residual(lhs, rhs),
                        tol));

    const double c_gap = diag ? (is_injective(a.matrix()) == is_injective(j.matrix()) ? 0.0 : 1.0)
                              : span_gap(a.matrix());
    s.add(numeric_check("c-kernel-range-dense", "kernel theorem (c): Ran(A) dense in H+", c_gap, 0.0,
                        "span equality by rank"));

    double d_worst = 0.0;
    for (Index i = 0; i < hp.dim(); ++i) {
        const ComplexVector e = ComplexVector::Unit(hp.dim(), i);
        const double sup = dual_norm(j.matrix() * e, root, rtol);
        const double exact = hp.norm(e);
        d_worst = std::max(d_worst, std::abs(sup - exact) / exact);
    }
    s.add(numeric_check("d-sup-formula", "kernel theorem (d): |x|_+ = sup |<x,y>_H| / |A^1/2 y|_H", d_worst, tol,
                        "evaluated on the coordinate basis of H+"));

    const RSpace r = build_R(root, rtol);
    const MappedOperator v(jinv.matrix() * r.basis, r.space, hp);
    const ResidualVerdict vu = is_unitary(v, tol, rtol);
    s.add(numeric_check("e-V-unitary", "kernel theorem (e): identity on Ran(A) extends to a unitary V", vu.residual,
                        tol));
    const ComplexMatrix va = v.matrix() * weighted_pinv(r.embedding, rtol).matrix() * a.matrix();
    s.add(numeric_check("e-VA-equals-jstar", "kernel theorem (e): V A x = j+* x", relative_residual(va, jsharp.matrix()),
                        tol));
    return s;
}

}  // namespace triplet_forge
