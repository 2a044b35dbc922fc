#pragma once

// Instance generators: weighted L2 and Dirichlet-type coefficient spaces, and
// seeded random triplets.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "triplet_forge/generalised.hpp"

namespace triplet_forge {

struct FamilyInstance {
    WeightedSpace plus, zero, minus;
    CehTriplet ceh;
    GenTriplet gt;
    Section bridge;
};

/// All k in {0..degree}^n_vars in lexicographic ascending order.
inline std::vector<MultiIndex> enumerate_multi_indices(int n_vars, int degree) {
    if (n_vars < 1) throw Error(ErrorKind::InvalidArgument, "need at least one variable");
    if (degree < 0) throw Error(ErrorKind::InvalidArgument, "degree cap must be non-negative");
    std::vector<MultiIndex> out;
    MultiIndex k(static_cast<std::size_t>(n_vars), 0);
    while (true) {
        out.push_back(k);
        int v = n_vars - 1;
        while (v >= 0 && k[static_cast<std::size_t>(v)] == degree) k[static_cast<std::size_t>(v--)] = 0;
        if (v < 0) break;
        ++k[static_cast<std::size_t>(v)];
    }
    return out;
}

namespace detail {

inline FamilyInstance assemble(WeightedSpace plus, WeightedSpace zero, WeightedSpace minus, double tol) {
    CehTriplet ceh = CehTriplet::from_spaces(plus.as_gram(), zero.as_gram(), minus.as_gram());
    BridgeResult bridge = ceh_to_gt(ceh, tol);
    return {std::move(plus), std::move(zero), std::move(minus), std::move(ceh), std::move(bridge.gt),
            std::move(bridge.report)};
}

}  // namespace detail

/// (L2_w; L2; L2_{1/w}) over a finite index set.
inline FamilyInstance weighted_l2_triplet(const std::vector<double>& w, bool models_countable, double tol = 1e-9) {
    std::vector<double> ones(w.size(), 1.0);
    std::vector<double> inv(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
            throw Error(ErrorKind::BadWeight, "weight " + std::to_string(i) + " is not in (0, inf)");
        }
        inv[i] = 1.0 / w[i];
    }
    return detail::assemble(WeightedSpace::sequence(w, models_countable, "L2_w"),
                            WeightedSpace::sequence(ones, models_countable, "L2"),
                            WeightedSpace::sequence(inv, models_countable, "L2_1/w"), tol);
}

struct DirichletParams {
    int n_vars = 1;
    std::vector<double> alpha;
    std::vector<double> beta;
    int degree = 0;
};

/// Largest |log| of a weight (k+1)^gamma that is still computed.
inline constexpr double kMaxLogWeight = 700.0;

/// (k+1)^gamma = prod_i (k_i+1)^gamma_i.
inline double dirichlet_weight(const MultiIndex& k, const std::vector<double>& gamma) {
    double log_size = 0.0;
    double w = 1.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double base = static_cast<double>(k[i]) + 1.0;
        log_size += std::abs(gamma[i]) * std::log(base);
        w *= std::pow(base, gamma[i]);
    }
    if (log_size > kMaxLogWeight || !std::isfinite(w) || !(w > 0.0)) {
        throw Error(ErrorKind::Overflow, "weight exponent " + std::to_string(log_size) + " out of range");
    }
    return w;
}

/// (D_beta; D_alpha; D_{2alpha-beta}) truncated to degree cap d in each variable.
inline FamilyInstance dirichlet_triplet(const DirichletParams& p, double tol = 1e-9) {
    const auto n = static_cast<std::size_t>(p.n_vars);
    if (p.n_vars < 1) throw Error(ErrorKind::InvalidArgument, "need at least one variable");
    if (p.alpha.size() != n || p.beta.size() != n) {
        throw Error(ErrorKind::DimensionMismatch, "alpha and beta need one exponent per variable");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(p.alpha[i]) || !std::isfinite(p.beta[i])) {
            throw Error(ErrorKind::NonFinite, "exponents must be finite");
        }
    }
    std::vector<MultiIndex> idx = enumerate_multi_indices(p.n_vars, p.degree);
    std::vector<double> dual(n);
    for (std::size_t i = 0; i < n; ++i) dual[i] = 2.0 * p.alpha[i] - p.beta[i];
    std::vector<double> wp, w0, wm;
    for (const auto& k : idx) {
        wp.push_back(dirichlet_weight(k, p.beta));
        w0.push_back(dirichlet_weight(k, p.alpha));
        wm.push_back(dirichlet_weight(k, dual));
    }
    return detail::assemble(WeightedSpace(idx, wp, true, "D_beta"), WeightedSpace(idx, w0, true, "D_alpha"),
                            WeightedSpace(idx, wm, true, "D_2alpha-beta"), tol);
}

/// Expected pairing operator of a Dirichlet instance: diag((k+1)^{alpha-beta}).
inline RealVector dirichlet_expected_B(const DirichletParams& p) {
    std::vector<double> gap(p.alpha.size());
    for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = p.alpha[i] - p.beta[i];
    const auto idx = enumerate_multi_indices(p.n_vars, p.degree);
    RealVector b(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) b(static_cast<Index>(i)) = dirichlet_weight(idx[i], gap);
    return b;
}

/// phi = u / w attains |<phi,u>_0| = |phi|_w |u|_{1/w}.
inline ComplexVector weighted_l2_equality_witness(const std::vector<double>& w, const ComplexVector& u) {
    ComplexVector phi(u.size());
    for (Index i = 0; i < u.size(); ++i) phi(i) = u(i) / w[static_cast<std::size_t>(i)];
    return phi;
}

/// f = (k+1)^{beta-alpha} g attains |<f,g>_alpha| = |f|_{2alpha-beta} |g|_beta.
inline ComplexVector dirichlet_equality_witness(const DirichletParams& p, const ComplexVector& g) {
    std::vector<double> gap(p.alpha.size());
    for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = p.beta[i] - p.alpha[i];
    const auto idx = enumerate_multi_indices(p.n_vars, p.degree);
    ComplexVector f(g.size());
    for (Index i = 0; i < g.size(); ++i) f(i) = dirichlet_weight(idx[static_cast<std::size_t>(i)], gap) * g(i);
    return f;
}

/// (|phi|_a |u|_b - |<phi,u>_pair|) / (|phi|_a |u|_b); negative means violated.
inline double cauchy_schwarz_slack(const ComplexVector& phi, const ComplexVector& u, const GramSpace& pair,
                                   const GramSpace& phi_space, const GramSpace& u_space) {
    const double bound = phi_space.norm(phi) * u_space.norm(u);
    return (bound - std::abs(pair.inner(phi, u))) / bound;
}

/// mt19937_64 with a portable canonical double and Box-Muller normals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (spare_) {
            const double s = *spare_;
            spare_.reset();
            return s;
        }
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    Complex complex_normal() {
        const double re = normal();
        return {re, normal()};
    }

    ComplexMatrix gaussian(Index rows, Index cols) {
        ComplexMatrix m(rows, cols);
        for (Index j = 0; j < cols; ++j) {
            for (Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
        }
        return m;
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Haar-distributed unitary: Householder QR of a Gaussian matrix with phase fix.
inline ComplexMatrix random_unitary(Index n, Rng& rng) {
    const ComplexMatrix g = rng.gaussian(n, n);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
    const ComplexMatrix& r = qr.matrixQR();
    for (Index i = 0; i < n; ++i) {
        const double a = std::abs(r(i, i));
        if (a > 0.0) q.col(i) *= r(i, i) / a;
    }
    return q;
}

/// Log-uniform spectrum in [1, cond] containing both endpoints when n >= 2.
inline RealVector log_uniform_spectrum(Index n, double cond, Rng& rng) {
    RealVector lambda(n);
    for (Index i = 0; i < n; ++i) {
        double t = rng.uniform();
        if (i == 0) t = 0.0;
        if (i == n - 1 && n > 1) t = 1.0;
        lambda(i) = std::pow(cond, t);
    }
    return lambda;
}

namespace detail {

inline void require_random_args(Index n, double cond) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 1");
    if (!(cond >= 1.0) || !std::isfinite(cond)) throw Error(ErrorKind::InvalidArgument, "cond must be >= 1");
}

inline ComplexMatrix conjugated(const ComplexMatrix& u, const RealVector& lambda) {
    return hermitian_part(u.adjoint() * lambda.cast<Complex>().asDiagonal() * u);
}

}  // namespace detail

/// Random PD Gram U^H Lambda U with condition number cond.
inline ComplexMatrix random_gram(Index n, double cond, Rng& rng) {
    detail::require_random_args(n, cond);
    const ComplexMatrix u = random_unitary(n, rng);
    return detail::conjugated(u, log_uniform_spectrum(n, cond, rng));
}

struct RandomInstance {
    CehTriplet ceh;
    GenTriplet gt;
};

/// G+ = U^H Lambda U, G0 = I, G- = U^H Lambda^{-1} U, identity embeddings.
inline RandomInstance random_instance(Index n, double cond, std::uint64_t seed, double tol = 1e-9) {
    detail::require_random_args(n, cond);
    Rng rng(seed);
    const ComplexMatrix u = random_unitary(n, rng);
    const RealVector lambda = log_uniform_spectrum(n, cond, rng);
    const RealVector inv = lambda.cwiseInverse();
    CehTriplet ceh = CehTriplet::from_spaces(GramSpace(detail::conjugated(u, lambda), "H+"),
                                             GramSpace::standard(n, "H0"),
                                             GramSpace(detail::conjugated(u, inv), "H-"));
    BridgeResult bridge = ceh_to_gt(ceh, tol);
    return {std::move(ceh), std::move(bridge.gt)};
}

/// Positive definite Hamiltonian on the standard space.
inline MappedOperator random_hamiltonian(Index n, double cond, std::uint64_t seed) {
    Rng rng(seed);
    const GramSpace h0 = GramSpace::standard(n, "H0");
    return MappedOperator(random_gram(n, cond, rng), h0, h0);
}

/// Random operator between random Gram spaces; rank < min(rows, cols) when rank_deficient.
inline MappedOperator random_operator(Index rows, Index cols, std::uint64_t seed, bool rank_deficient = false,
                                      double cond = 100.0) {
    if (rows < 1 || cols < 1) throw Error(ErrorKind::InvalidArgument, "operator dimensions must be positive");
    Rng rng(seed);
    const GramSpace dom(random_gram(cols, cond, rng), "G");
    const GramSpace cod(random_gram(rows, cond, rng), "H");
    ComplexMatrix m = rng.gaussian(rows, cols);
    const Index k = std::min(rows, cols);
    if (rank_deficient && k > 1) m = rng.gaussian(rows, k - 1) * rng.gaussian(k - 1, cols);
    return MappedOperator(std::move(m), dom, cod);
}

/// Generalised triplet with strictly contractive B: G' = G0 G_H^{-1} G0 + X X^H.
inline GenTriplet random_gt(Index n, std::uint64_t seed, double cond = 100.0) {
    detail::require_random_args(n, cond);
    Rng rng(seed);
    const GramSpace h(random_gram(n, cond, rng), "H");
    const GramSpace h0(random_gram(n, std::sqrt(cond), rng), "H0");
    const ComplexMatrix base = hermitian_part(h0.gram() * h.gram_inverse() * h0.gram());
    const ComplexMatrix x = rng.gaussian(n, n) * (0.5 * std::sqrt(base.norm() / static_cast<double>(n)));
    const GramSpace hp(hermitian_part(base + x * x.adjoint()), "H'");
    return GenTriplet(h, h0, hp);
}

/// The same triplet with G- multiplied by factor (breaks the th3' identity).
inline CehTriplet perturb_minus(const CehTriplet& t, double factor) {
    const GramSpace hm(t.h_minus().gram() * factor, t.h_minus().label(), t.h_minus().models_countable());
    return CehTriplet(t.j_plus(), MappedOperator(t.j_minus().matrix(), t.h_zero(), hm));
}

}  // namespace triplet_forge
