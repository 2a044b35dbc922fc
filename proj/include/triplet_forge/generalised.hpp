#pragma once

// Generalised triplets (H; H0; H') over one shared coordinate space, the
// operator B : H' -> H representing the H0 pairing, and the conversions
// between generalised and closely embedded triplets.

#include <string>
#include <utility>

#include "triplet_forge/triplets.hpp"

namespace triplet_forge {

namespace detail {

inline void require_shared_dims(const GramSpace& h, const GramSpace& h0, const GramSpace& hp) {
    if (h.dim() != h0.dim() || h0.dim() != hp.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "generalised triplet spaces must share one coordinate dimension");
    }
}

/// B = G_H^{-1} G0 read H' -> H: the unique solution of B^H G_H = G0.
inline MappedOperator b_operator(const GramSpace& h, const GramSpace& h0, const GramSpace& hp) {
    return MappedOperator(h.gram_inverse() * h0.gram(), hp, h);
}

}  // namespace detail

class GenTriplet {
public:
    GenTriplet(GramSpace h, GramSpace h_zero, GramSpace h_prime)
        : h_(std::move(h)), h_zero_(std::move(h_zero)), h_prime_(std::move(h_prime)),
          b_(([this] {
              detail::require_shared_dims(h_, h_zero_, h_prime_);
              return detail::b_operator(h_, h_zero_, h_prime_);
          })()) {}

    const GramSpace& h() const { return h_; }
    const GramSpace& h_zero() const { return h_zero_; }
    const GramSpace& h_prime() const { return h_prime_; }
    const MappedOperator& b() const { return b_; }
    Index dim() const { return h_.dim(); }
    bool models_countable() const {
        return h_.models_countable() || h_zero_.models_countable() || h_prime_.models_countable();
    }

private:
    GramSpace h_;
    GramSpace h_zero_;
    GramSpace h_prime_;
    MappedOperator b_;
};

struct FoundB {
    MappedOperator op;
    ContractionVerdict contraction;
    RealVector singular_values;  ///< weighted, descending
};

namespace detail {

inline std::vector<WitnessedError::Witness> pairing_witness(const ContractionVerdict& c, const MappedOperator& b) {
    return {{"phi", c.witness}, {"u", b.matrix() * c.witness}};
}

inline double pairing_ratio(const ContractionVerdict& c) { return std::sqrt(std::max(0.0, 1.0 - c.margin)); }

}  // namespace detail

/// B with its contraction margin and weighted singular values; throws when
/// (gt2) or (gt3) fails.
inline FoundB find_B(const GramSpace& h, const GramSpace& h0, const GramSpace& hp, double tol = 1e-10) {
    detail::require_shared_dims(h, h0, hp);
    MappedOperator b = detail::b_operator(h, h0, hp);
    ContractionVerdict c = is_contraction(b, tol);
    if (!c.holds) {
        throw WitnessedError(ErrorKind::NotContractive,
                             "|<phi,u>_0| exceeds |phi|' |u|_H by factor " + std::to_string(detail::pairing_ratio(c)),
                             detail::pairing_witness(c, b), detail::pairing_ratio(c));
    }
    if (!is_boundedly_invertible(b)) {
        throw Error(ErrorKind::NotBoundedlyInvertible, "B has no bounded inverse at the 1e-10 singular value cut");
    }
    RealVector s = weighted_singular_values(b);
    return {std::move(b), std::move(c), std::move(s)};
}

/// Axioms (gt1)-(gt3) and the pairing identity B^H G_H = G0.
inline Section check_gt_axioms(const GenTriplet& g, double tol = 1e-9) {
    Section s{"generalised triplet axioms", {}};
    s.add(structural_check("gt1-common-dense-subspace", "generalised triplet gt1: D dense in H, H0, H'",
                           Verdict::PassStructural,
                           g.models_countable()
                               ? "finitely supported vectors are dense by the countable-model convention"
                               : "finite model: D is the whole shared coordinate space"));

    const ContractionVerdict c = is_contraction(g.b(), tol);
    Check gt2 = numeric_check("gt2-contraction", "generalised triplet gt2: |<phi,u>_0| <= |phi|' |u|_H",
                              std::max(0.0, -c.margin), tol,
                              "whitened margin " + std::to_string(c.margin));
    if (gt2.failed()) gt2.witnesses = detail::pairing_witness(c, g.b());
    s.add(std::move(gt2));

    const RealVector sv = weighted_singular_values(g.b());
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    s.add(numeric_check("gt3-bounded-inverse", "generalised triplet gt3: B boundedly invertible", cond, 1e10,
                        "weighted condition number of B"));

    s.add(numeric_check("beta-pairing-identity", "pairing operator: <phi,u>_0 = <B phi,u>_H",
                        relative_residual(g.b().matrix().adjoint() * g.h().gram(), g.h_zero().gram()), tol,
                        "B^H G_H against G0"));
    return s;
}

/// (H'; H0; H), whose pairing operator is B#.
inline GenTriplet symmetry_gt(const GenTriplet& g) { return GenTriplet(g.h_prime(), g.h_zero(), g.h()); }

inline Section verify_symmetry_gt(const GenTriplet& g, double tol = 1e-9) {
    Section s{"generalised triplet symmetry", {}};
    const GenTriplet r = symmetry_gt(g);
    s.add(numeric_check("reversed-B-equals-adjoint", "generalised symmetry: C = B* represents the pairing",
                        relative_residual(r.b().matrix(), adjoint(g.b()).matrix()), tol));
    s.append(check_gt_axioms(r, tol));
    return s;
}

struct BridgeResult {
    GenTriplet gt;
    Section report;
};

/// A closely embedded triplet over shared coordinates as a generalised triplet
/// (H+; H0; H-) with B = V~, provided |<phi,u>_0| <= |phi|- |u|+.
inline BridgeResult ceh_to_gt(const CehTriplet& t, double tol = 1e-9) {
    if (!is_identity(t.j_plus().matrix()) || !is_identity(t.j_minus().matrix())) {
        throw Error(ErrorKind::InvalidArgument, "conversion needs identity embeddings over shared coordinates");
    }
    const MappedOperator v = compose(adjoint(t.j_plus()), t.j_minus_inverse());
    const ContractionVerdict c = is_contraction(v, tol);
    if (!c.holds) {
        throw WitnessedError(ErrorKind::BridgeFailure,
                             "|<phi,u>_0| <= |phi|- |u|+ fails by factor " + std::to_string(detail::pairing_ratio(c)),
                             detail::pairing_witness(c, v), detail::pairing_ratio(c));
    }
    GenTriplet g(t.h_plus(), t.h_zero(), t.h_minus());
    Section s{"closely embedded to generalised", {}};
    s.add(numeric_check("c-pairing-bounded", "ceh-to-gt (c): |<phi,u>_0| <= |phi|- |u|+", std::max(0.0, -c.margin),
                        tol, "whitened margin " + std::to_string(c.margin)));
    s.add(numeric_check("B-equals-V-tilde", "ceh-to-gt: B = V~", relative_residual(g.b().matrix(), v.matrix()), tol));
    s.add(structural_check("D-dense-in-each", "ceh-to-gt: D = H+ n H0 n H- dense in each", Verdict::PassStructural,
                           "identity embeddings: D is the shared coordinate space (rank checks in axioms)"));
    s.append(check_gt_axioms(g, tol));
    return {std::move(g), std::move(s)};
}

struct GtToCehResult {
    CehTriplet triplet;
    double c1;    ///< c1 |x|' <= |x|_{T*}
    double c2;    ///< |x|_{T*} <= c2 |x|'
    double cond;  ///< weighted condition number of B
    Section report;
};

/// (R(T); H0; D(T#)) for the identity T : H -> H0.
inline GtToCehResult gt_to_ceh(const GenTriplet& g, double tol = 1e-9, double rtol = kDefaultRtol) {
    const MappedOperator t = MappedOperator::identity(g.h(), g.h_zero());
    const MappedOperator ts = adjoint(t);
    const RSpace r = build_R(t, rtol);
    const DSpace d = build_D(ts, rtol);
    const GramSpace hp = r.space.relabeled("R(T)").with_countable(g.h().models_countable());
    // On identity coordinates B^H G_H B = G0^H B; the short form avoids the G_H^{-1} G_H round trip.
    const GramSpace hm = (d.basis_is_identity ? GramSpace(hermitian_part(g.h_zero().gram().adjoint() * g.b().matrix()))
                                              : d.space)
                             .relabeled("D(T*)")
                             .with_countable(g.h_prime().models_countable());
    MappedOperator jp(r.embedding.matrix(), hp, g.h_zero());
    MappedOperator jm(weighted_pinv(d.embedding, rtol).matrix(), g.h_zero(), hm);
    CehTriplet triplet(std::move(jp), std::move(jm), rtol);

    Section s{"generalised to closely embedded", {}};
    s.add(structural_check("1-closable-embedding", "gt-to-ceh (1): j+,0 is closable", Verdict::PassStructural,
                           "finite model: closure is a no-op"));
    s.add(numeric_check("2-T-adjoint-equals-B", "gt-to-ceh (2): T*|D = B|D",
                        relative_residual(ts.matrix(), g.b().matrix()), tol));
    s.add(numeric_check("3i-R-gram-equals-H", "gt-to-ceh (3)(i): inner product of H equals that of R(T) on D",
                        relative_residual(hp.gram(), g.h().gram()), 1e-10));
    const RealVector sv = weighted_singular_values(g.b());
    const double c2 = sv(0);
    const double c1 = sv(sv.size() - 1);
    const double cond = c1 > 0.0 ? c2 / c1 : INFINITY;
    const double gram_gap = relative_residual(
        hm.gram(), g.b().matrix().adjoint() * g.h().gram() * g.b().matrix());
    s.add(numeric_check("3ii-norm-equivalence", "gt-to-ceh (3)(ii): |.|' and |.|_{T*} equivalent on D", gram_gap, tol,
                        "|x|_{T*} = |Bx|_H; c1 = " + std::to_string(c1) + ", c2 = " + std::to_string(c2)));
    s.append(validate_ceh(triplet, tol, rtol));
    return {std::move(triplet), c1, c2, cond, std::move(s)};
}

/// H' renormed by B^H G_H B, which makes B Gram-unitary.
inline GenTriplet renormed(const GenTriplet& g) {
    const ComplexMatrix& b = g.b().matrix();
    GramSpace hp(hermitian_part(b.adjoint() * g.h().gram() * b), g.h_prime().label(), g.h_prime().models_countable());
    return GenTriplet(g.h(), g.h_zero(), std::move(hp));
}

/// Completeness conditions (i)-(iii) under which a generalised triplet is
/// closely embedded after renorming H'.
inline Section gt_is_ceh(const GenTriplet& g) {
    Section s{"generalised triplet is closely embedded", {}};
    Verdict v = Verdict::PassStructural;
    std::string note = "finite model: all norms on the coordinate space are equivalent, joint Cauchy limits exist";
    if (g.models_countable()) {
        const bool diagonal = g.h().is_diagonal() && g.h_zero().is_diagonal() && g.h_prime().is_diagonal();
        if (diagonal) {
            v = Verdict::PassDiagonal;
            note = "diagonal Grams decouple coordinates: joint Cauchy limits exist componentwise";
        } else {
            v = Verdict::Indeterminate;
            note = "non-diagonal countable model: completeness is not decidable from a truncation";
        }
    }
    s.add(structural_check("i-joint-completeness-H-H0", "gt-is-ceh (i): Cauchy in H and H0 converges in both", v, note));
    s.add(structural_check("ii-joint-completeness-Hprime-H0", "gt-is-ceh (ii): Cauchy in H' and H0 converges in both",
                           v, note));
    const std::string note3 =
        v == Verdict::PassStructural ? note + "; every phi qualifies at finite dimension, so (iii) cannot discriminate"
                                     : note;
    s.add(structural_check("iii-approximation-in-H0-and-Hprime",
                           "gt-is-ceh (iii): bounded-pairing vectors approximable in H0 and H'", v, note3));
    return s;
}

}  // namespace triplet_forge
