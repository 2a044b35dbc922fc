#pragma once

// Triplets (H+; H0; H-) of closely embedded Hilbert spaces with embeddings
// j+ : H+ -> H0 and j- : H0 -> H-.

#include <optional>
#include <string>

#include "triplet_forge/construct.hpp"

namespace triplet_forge {

class CehTriplet {
public:
    CehTriplet(MappedOperator j_plus, MappedOperator j_minus, double rtol = kDefaultRtol)
        : j_plus_(std::move(j_plus)), j_minus_(std::move(j_minus)), kernel_(kernel_operator(j_plus_)) {
        if (!j_plus_.codomain().same_as(j_minus_.domain())) {
            throw Error(ErrorKind::SpaceMismatch, "j+ codomain and j- domain differ");
        }
        if (is_invertible(j_plus_.matrix(), rtol)) j_plus_inv_ = inverse(j_plus_, rtol);
        if (is_invertible(j_minus_.matrix(), rtol)) j_minus_inv_ = inverse(j_minus_, rtol);
        if (j_plus_inv_) hamiltonian_ = compose(adjoint(*j_plus_inv_), *j_plus_inv_);
    }

    /// Triplet over shared coordinates with identity embeddings.
    static CehTriplet from_spaces(const GramSpace& h_plus, const GramSpace& h_zero, const GramSpace& h_minus) {
        return CehTriplet(MappedOperator::identity(h_plus, h_zero), MappedOperator::identity(h_zero, h_minus));
    }

    const GramSpace& h_plus() const { return j_plus_.domain(); }
    const GramSpace& h_zero() const { return j_plus_.codomain(); }
    const GramSpace& h_minus() const { return j_minus_.codomain(); }
    const MappedOperator& j_plus() const { return j_plus_; }
    const MappedOperator& j_minus() const { return j_minus_; }
    const MappedOperator& kernel() const { return kernel_; }

    bool embeddings_invertible() const { return j_plus_inv_.has_value() && j_minus_inv_.has_value(); }

    const MappedOperator& j_plus_inverse() const { return require(j_plus_inv_, "j+"); }
    const MappedOperator& j_minus_inverse() const { return require(j_minus_inv_, "j-"); }
    /// H = A^{-1} = (j+^{-1})# j+^{-1}
    const MappedOperator& hamiltonian() const { return require(hamiltonian_, "j+ (Hamiltonian)"); }

    /// (H-; H0; H+) with embeddings j-^{-1}, j+^{-1}; swaps the cached kernel and Hamiltonian.
    CehTriplet reversed() const {
        CehTriplet r = *this;
        r.j_plus_ = j_minus_inverse();
        r.j_minus_ = j_plus_inverse();
        r.j_plus_inv_ = j_minus_;
        r.j_minus_inv_ = j_plus_;
        r.kernel_ = hamiltonian();
        r.hamiltonian_ = kernel_;
        return r;
    }

private:
    static const MappedOperator& require(const std::optional<MappedOperator>& m, const char* what) {
        if (!m) throw Error(ErrorKind::NotInvertible, std::string(what) + " is not invertible");
        return *m;
    }

    MappedOperator j_plus_;
    MappedOperator j_minus_;
    MappedOperator kernel_;
    std::optional<MappedOperator> j_plus_inv_;
    std::optional<MappedOperator> j_minus_inv_;
    std::optional<MappedOperator> hamiltonian_;
};

namespace detail {

inline double rank_gap(Index expected, Index actual) { return static_cast<double>(expected - actual); }

/// Missing dimensions of the kernel complement and range of m.
inline std::pair<double, double> injectivity_gaps(const ComplexMatrix& m, double rtol) {
    if (m.rows() == m.cols() && is_diagonal(m)) {
        const double zeros = static_cast<double>((m.diagonal().array() == Complex(0.0, 0.0)).count());
        return {zeros, zeros};
    }
    const Index r = rank(m, rtol);
    return {rank_gap(m.cols(), r), rank_gap(m.rows(), r)};
}

/// max_i | ||a e_i|| - ||b e_i|| | / ||b e_i|| over coordinate vectors.
template <typename LhsNorm, typename RhsNorm>
double worst_norm_gap(Index n, LhsNorm&& lhs, RhsNorm&& rhs) {
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) {
        const ComplexVector e = ComplexVector::Unit(n, i);
        const double l = lhs(e);
        const double r = rhs(e);
        worst = std::max(worst, std::abs(l - r) / r);
    }
    return worst;
}

inline Check positivity_check(std::string name, std::string ref, const MappedOperator& m, double rtol) {
    const EigenDecomposition eig = selfadjoint_eigen(m);
    const double lo = eig.eigenvalues(0);
    const double hi = eig.eigenvalues(eig.eigenvalues.size() - 1);
    const bool injective = is_injective(m.matrix(), rtol) && lo > 0.0;
    return numeric_check(std::move(name), std::move(ref), injective ? 0.0 : 1.0, 0.0,
                         "spectrum in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace detail

/// Axioms (th1)-(th3) of a triplet, with (th3) in both its quadratic-form and
/// supremum forms.
inline Section validate_ceh(const CehTriplet& t, double tol = 1e-9, double rtol = kDefaultRtol) {
    Section s{"closely embedded triplet axioms", {}};
    const auto [p_ker, p_ran] = detail::injectivity_gaps(t.j_plus().matrix(), rtol);
    const auto [m_ker, m_ran] = detail::injectivity_gaps(t.j_minus().matrix(), rtol);
    s.add(numeric_check("th1-j-plus-injective", "ceh-axiom th1: j+ is a closed embedding", p_ker, 0.0,
                        "missing rank of j+"));
    s.add(numeric_check("th1-j-plus-dense-range", "ceh-axiom th1: Ran(j+) dense in H0", p_ran, 0.0,
                        "codimension of Ran(j+)"));
    s.add(numeric_check("th2-j-minus-injective", "ceh-axiom th2: j- is a closed embedding", m_ker, 0.0,
                        "missing rank of j-"));
    s.add(numeric_check("th2-j-minus-dense-range", "ceh-axiom th2: Ran(j-) dense in H-", m_ran, 0.0,
                        "codimension of Ran(j-)"));

    const ComplexMatrix jps = adjoint(t.j_plus()).matrix();
    const ComplexMatrix lhs = jps.adjoint() * t.h_plus().gram() * jps;
    const ComplexMatrix rhs = t.j_minus().matrix().adjoint() * t.h_minus().gram() * t.j_minus().matrix();
    s.add(numeric_check("th3-prime-norm-identity", "ceh-axiom th3': |j- y|- = |j+* y|+ on Dom(j-)",
                        relative_residual(lhs, rhs), tol, "(j+#)^H G+ j+# against j-^H G- j-, relative Frobenius"));

    if (t.embeddings_invertible()) {
        const MappedOperator probe = adjoint(t.j_plus_inverse());
        const double gap = detail::worst_norm_gap(
            t.h_zero().dim(), [&](const ComplexVector& y) { return dual_norm(y, probe, rtol); },
            [&](const ComplexVector& y) { return t.h_minus().norm(t.j_minus().matrix() * y); });
        s.add(numeric_check("th3-dual-supremum", "ceh-axiom th3: |y|- = sup |<x,y>_0| / |x|+", gap, tol,
                            "supremum evaluated on the coordinate basis of H0"));
    } else {
        s.add(numeric_check("th3-dual-supremum", "ceh-axiom th3: |y|- = sup |<x,y>_0| / |x|+", INFINITY, tol,
                            "embeddings not invertible; supremum undefined"));
    }

    s.add(numeric_check("kernel-operator-selfadjoint", "triplet structure (a): A = j+ j+* selfadjoint in H0",
                        selfadjoint_defect(t.kernel()), tol));
    s.add(detail::positivity_check("kernel-operator-positive-injective",
                                   "triplet structure (a): A positive, 0 not an eigenvalue", t.kernel(), rtol));
    return s;
}

/// Model triplet (D(T); H0; R(T#)) for a positive selfadjoint H = T# T on H0.
inline CehTriplet build_model_triplet(const MappedOperator& h, const std::optional<MappedOperator>& factor = {},
                                      double rtol = kDefaultRtol, double tol = 1e-9) {
    if (!h.is_endomorphism()) throw Error(ErrorKind::SpaceMismatch, "Hamiltonian must act in one space");
    const GramSpace& h0 = h.domain();
    if (selfadjoint_defect(h) > tol) throw Error(ErrorKind::NotHermitian, "Hamiltonian is not selfadjoint in H0");
    const EigenDecomposition eig = selfadjoint_eigen(h);
    const double lo = eig.eigenvalues(0);
    const double hi = eig.eigenvalues(eig.eigenvalues.size() - 1);
    const bool exact_diag = is_diagonal(h.matrix()) && h0.is_diagonal();
    if (!(lo > 0.0) || (!exact_diag && !(lo > rtol * hi))) {
        throw Error(ErrorKind::NotPositive, "Hamiltonian spectrum starts at " + std::to_string(lo));
    }
    const MappedOperator t = factor ? *factor : operator_sqrt(h);
    if (!t.domain().same_as(h0)) throw Error(ErrorKind::SpaceMismatch, "factor T must be defined on H0");
    const double mismatch = relative_residual(compose(adjoint(t), t).matrix(), h.matrix());
    if (mismatch > tol) {
        throw Error(ErrorKind::FactorMismatch, "T#T differs from H by " + std::to_string(mismatch));
    }
    const DSpace d = build_D(t, rtol);
    const RSpace r = build_R(adjoint(t), rtol);
    const GramSpace hp = d.space.relabeled("H+");
    const GramSpace hm = r.space.relabeled("H-");
    const GramSpace hz = h0.label().empty() ? h0.relabeled("H0") : h0;
    MappedOperator jp(d.embedding.matrix(), hp, hz);
    MappedOperator jm(weighted_pinv(r.embedding, rtol).matrix(), hz, hm);
    return CehTriplet(std::move(jp), std::move(jm), rtol);
}

namespace detail {

/// Gram-unitary W : a.space -> b.space with W a W# = b, from matched ascending spectra.
inline MappedOperator intertwiner(const MappedOperator& a, const MappedOperator& b) {
    const EigenDecomposition ea = selfadjoint_eigen(a);
    const EigenDecomposition eb = selfadjoint_eigen(b);
    ComplexMatrix w = b.domain().gram_inv_sqrt() * eb.eigenvectors * ea.eigenvectors.adjoint() * a.domain().gram_sqrt();
    return MappedOperator(std::move(w), a.domain(), b.domain());
}

}  // namespace detail

/// Statements (i)-(vi) of the model theorem for t = build_model_triplet(T# T, T).
inline Section verify_model_theorem(const CehTriplet& t, const MappedOperator& factor, double tol = 1e-9,
                                    double rtol = kDefaultRtol) {
    Section s{"model triplet", {}};
    const MappedOperator h = compose(adjoint(factor), factor);
    const Index n = t.h_zero().dim();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);

    s.add(numeric_check("i-kernel-equals-inverse-hamiltonian", "model triplet (i): A = i_T i_T* coincides with H^-1",
                        relative_residual(t.kernel().matrix() * h.matrix(), id), tol, "||A H - I||_F / (1 + ||I||_F)"));

    const MappedOperator b = kernel_operator(t.j_minus());
    const MappedOperator w = detail::intertwiner(t.kernel(), b);
    const double equivalence = relative_residual(compose(compose(w, t.kernel()), adjoint(w)).matrix(), b.matrix());
    const double w_unitary = is_unitary(w, tol, rtol).residual;
    s.add(numeric_check("ii-kernels-unitarily-equivalent",
                        "model triplet (ii): kernel of j_{T*}^-1 is unitarily equivalent to H^-1",
                        std::max(equivalence, w_unitary), tol, "intertwiner from matched ascending spectra"));

    const MappedOperator a_tilde = compose(adjoint(t.j_plus()), t.j_minus_inverse());
    s.add(numeric_check("iii-A-tilde-unitary", "model triplet (iii): i_T*|Ran(T*) extends to a unitary A~",
                        is_unitary(a_tilde, tol, rtol).residual, tol));
    const ComplexMatrix a_viewed = t.j_plus_inverse().matrix() * t.kernel().matrix() * t.j_minus_inverse().matrix();
    s.add(numeric_check("iii-A-extends-to-A-tilde", "model triplet (iii): A~ extends A read R(T*) -> D(T)",
                        relative_residual(a_viewed, a_tilde.matrix()), tol));

    const MappedOperator h_tilde(t.j_minus().matrix() * h.matrix() * t.j_plus().matrix(), t.h_plus(), t.h_minus());
    s.add(numeric_check("iv-H-tilde-unitary", "model triplet (iv): H read D(T) -> R(T*) extends to a unitary H~",
                        is_unitary(h_tilde, tol, rtol).residual, tol));
    const Index np = t.h_plus().dim();
    s.add(numeric_check("iv-H-tilde-inverts-A-tilde", "model triplet (iv): H~ = A~^-1",
                        relative_residual(h_tilde.matrix() * a_tilde.matrix(), ComplexMatrix::Identity(np, np)),
                        tol));

    const MappedOperator ts = adjoint(factor);
    const RSpace r = build_R(ts, rtol);
    const MappedOperator u = coisometry_factor(ts, r, tol);
    const ComplexMatrix product = u.matrix() * factor.matrix() * t.j_plus().matrix();
    s.add(numeric_check("v-H-tilde-factorization", "model triplet (v): H~ = U_{T*} V_T^-1",
                        relative_residual(product, h_tilde.matrix()), tol,
                        "U_{T*} from T* = j_{T*} U_{T*}; V_T^-1 = T i_T"));

    const double theta = detail::worst_norm_gap(
        t.h_minus().dim(), [&](const ComplexVector& y) { return t.h_plus().norm(a_tilde.matrix() * y); },
        [&](const ComplexVector& y) { return t.h_minus().norm(y); });
    s.add(numeric_check("vi-theta-isometric", "model triplet (vi): Theta identifies R(T*) with D(T)*", theta, tol,
                        "|A~ a|_T = |a|_{T*} on the coordinate basis"));
    const double sup = detail::worst_norm_gap(
        n, [&](const ComplexVector& y) { return dual_norm(y, ts, rtol); },
        [&](const ComplexVector& y) { return t.h_minus().norm(t.j_minus().matrix() * y); });
    s.add(numeric_check("vi-dual-supremum", "model triplet (vi): |y|_{T*} = sup |<y,x>_H| / |x|_T", sup, tol,
                        "supremum evaluated on the coordinate basis of H0"));
    return s;
}

/// Structure theorem: V~ unitary H- -> H+, A a restriction of V~, H~ = V~^-1, Theta unitary.
inline Section verify_triplet_theorem(const CehTriplet& t, double tol = 1e-9, double rtol = kDefaultRtol) {
    Section s{"triplet structure", {}};
    s.add(detail::positivity_check("a-kernel-positive-injective", "triplet structure (a): A positive, 0 not an eigenvalue",
                                   t.kernel(), rtol));
    s.add(detail::positivity_check("a-hamiltonian-positive-injective",
                                   "triplet structure (a): H = A^-1 positive, 0 not an eigenvalue", t.hamiltonian(),
                                   rtol));

    const MappedOperator v = compose(adjoint(t.j_plus()), t.j_minus_inverse());
    const ResidualVerdict vu = is_unitary(v, tol, rtol);
    s.add(numeric_check("b-V-tilde-unitary", "triplet structure (b): j+* extends to a unitary V~ : H- -> H+",
                        vu.residual, tol));

    const ComplexMatrix a_viewed = t.j_plus_inverse().matrix() * t.kernel().matrix() * t.j_minus_inverse().matrix();
    s.add(numeric_check("c-A-restriction-of-V-tilde", "triplet structure (c): A read H- -> H+ is a restriction of V~",
                        relative_residual(a_viewed, v.matrix()), tol));

    const MappedOperator h_tilde(t.j_minus().matrix() * t.hamiltonian().matrix() * t.j_plus().matrix(), t.h_plus(),
                                 t.h_minus());
    const Index nm = t.h_minus().dim();
    s.add(numeric_check("d-H-tilde-inverts-V-tilde", "triplet structure (d): H~ = V~^-1",
                        (h_tilde.matrix() * v.matrix() - ComplexMatrix::Identity(nm, nm)).norm(), tol,
                        "||H~ V~ - I||_F"));
    s.add(numeric_check("d-H-tilde-unitary", "triplet structure (d): H extends to a unitary H~ : H+ -> H-",
                        is_unitary(h_tilde, tol, rtol).residual, tol));

    const double theta = detail::worst_norm_gap(
        nm, [&](const ComplexVector& y) { return t.h_plus().norm(v.matrix() * y); },
        [&](const ComplexVector& y) { return t.h_minus().norm(y); });
    s.add(numeric_check("e-theta-unitary", "triplet structure (e): Theta y = <V~ y, .>+ identifies H- with H+*", theta,
                        tol, "|V~ y|+ = |y|- on the coordinate basis of H-"));
    return s;
}

/// H- := R(j+^{-1*}) with j- the inverse of its embedding.
inline CehTriplet extend_embedding(const MappedOperator& j_plus, double rtol = kDefaultRtol) {
    if (!is_injective(j_plus.matrix(), rtol)) throw Error(ErrorKind::NotInjective, "j+ is not injective");
    if (!is_surjective(j_plus.matrix(), rtol)) throw Error(ErrorKind::NotSpanning, "Ran(j+) is not dense in H0");
    const RSpace r = build_R(adjoint(inverse(j_plus, rtol)), rtol);
    const GramSpace hm = r.space.relabeled("H-");
    MappedOperator jm(weighted_pinv(r.embedding, rtol).matrix(), j_plus.codomain(), hm);
    return CehTriplet(j_plus, std::move(jm), rtol);
}

struct UniquenessResult {
    MappedOperator phi;  ///< H- of t1 -> H- of t2
    double unitary_residual;
    double identity_residual;  ///< | phi j1- - j2- | on Dom(j-)
    bool unitary;
};

/// Phi- : H-(t1) -> H-(t2) acting as the identity on Dom(j-).
inline UniquenessResult uniqueness_unitary(const CehTriplet& t1, const CehTriplet& t2, double tol = 1e-9,
                                           double rtol = kDefaultRtol) {
    const bool shared = t1.h_plus().same_as(t2.h_plus()) && t1.h_zero().same_as(t2.h_zero()) &&
                        relative_residual(t1.j_plus().matrix(), t2.j_plus().matrix()) <= 1e-12;
    if (!shared) throw Error(ErrorKind::SharedEmbeddingMismatch, "triplets do not share H+, H0 and j+");
    MappedOperator phi(t2.j_minus().matrix() * t1.j_minus_inverse().matrix(), t1.h_minus(), t2.h_minus());
    const double identity = relative_residual(phi.matrix() * t1.j_minus().matrix(), t2.j_minus().matrix());
    const ResidualVerdict u = is_unitary(phi, tol, rtol);
    return {std::move(phi), u.residual, identity, u.holds};
}

inline CehTriplet symmetry_ceh(const CehTriplet& t) { return t.reversed(); }

}  // namespace triplet_forge
