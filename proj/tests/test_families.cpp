#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "triplet_forge/families.hpp"

using namespace triplet_forge;

namespace {

ComplexVector ones(Index n) { return ComplexVector::Ones(n); }

/// Largest defect residual; skips the gt3 check, whose residual is a condition number.
double max_family_residual(const FamilyInstance& f) {
    double bridge = 0.0;
    for (const Check& c : f.bridge.checks)
        if (c.name != "gt3-bounded-inverse") bridge = std::max(bridge, c.residual);
    return std::max({validate_ceh(f.ceh).max_residual(), verify_triplet_theorem(f.ceh).max_residual(), bridge});
}

}  // namespace

TEST(MultiIndices, LexicographicOrder) {
    const auto idx = enumerate_multi_indices(2, 2);
    ASSERT_EQ(idx.size(), 9u);
    const std::vector<MultiIndex> expected = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}};
    EXPECT_EQ(idx, expected);
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    EXPECT_EQ(enumerate_multi_indices(3, 0), std::vector<MultiIndex>{MultiIndex(3, 0)});
    EXPECT_EQ(enumerate_multi_indices(3, 3).size(), 64u);
    EXPECT_EQ(support::thrown_kind([] { enumerate_multi_indices(0, 2); }), ErrorKind::InvalidArgument);
}

TEST(WeightedL2, FrozenExample) {
    const std::vector<double> w = {4, 0.25};
    const FamilyInstance f = weighted_l2_triplet(w, false);
    EXPECT_EQ(f.ceh.h_plus().gram(), oracle::diag({4, 0.25}));
    EXPECT_EQ(f.ceh.h_zero().gram(), oracle::diag({1, 1}));
    EXPECT_EQ(f.ceh.h_minus().gram(), oracle::diag({0.25, 4}));
    EXPECT_EQ(validate_ceh(f.ceh).max_residual(), 0.0);
    EXPECT_NEAR(is_contraction(f.gt.b()).margin, 0.0, 1e-12);
    EXPECT_TRUE(is_unitary(f.gt.b()).holds);

    // phi = w o u: <phi,u>_0 = |phi|_{1/w} |u|_w = 4.25
    const ComplexVector u = ones(2);
    const ComplexVector phi = (ComplexVector(2) << 4.0, 0.25).finished();
    EXPECT_DOUBLE_EQ(std::abs(f.ceh.h_zero().inner(phi, u)), 4.25);
    EXPECT_DOUBLE_EQ(f.ceh.h_minus().norm(phi) * f.ceh.h_plus().norm(u), 4.25);
    // and in the stated orientation |phi|_w |u|_{1/w} with phi = u / w
    const ComplexVector psi = weighted_l2_equality_witness(w, u);
    EXPECT_NEAR(cauchy_schwarz_slack(psi, u, f.ceh.h_zero(), f.ceh.h_plus(), f.ceh.h_minus()), 0.0, 1e-15);
}

TEST(WeightedL2, UnitWeightsCollapse) {
    const FamilyInstance f = weighted_l2_triplet({1, 1, 1}, false);
    EXPECT_EQ(f.ceh.h_plus().gram(), f.ceh.h_zero().gram());
    EXPECT_EQ(f.ceh.h_minus().gram(), f.ceh.h_zero().gram());
    EXPECT_EQ(f.gt.b().matrix(), ComplexMatrix::Identity(3, 3));
}

TEST(WeightedL2, GrowingWeightsClassification) {
    std::vector<double> sq, inv;
    for (int k = 0; k < 16; ++k) sq.push_back((k + 1.0) * (k + 1.0)), inv.push_back(1.0 / ((k + 1.0) * (k + 1.0)));
    const FamilyInstance a = weighted_l2_triplet(sq, true);
    EXPECT_EQ(classify_embedding(a.plus, a.zero).kind, EmbeddingKind::Continuous);
    EXPECT_EQ(classify_embedding(a.zero, a.minus).kind, EmbeddingKind::Continuous);
    const FamilyInstance b = weighted_l2_triplet(inv, true);
    EXPECT_EQ(classify_embedding(b.plus, b.zero).kind, EmbeddingKind::ClosedUnbounded);
    EXPECT_EQ(classify_embedding(b.zero, b.minus).kind, EmbeddingKind::ClosedUnbounded);
    EXPECT_DOUBLE_EQ(classify_embedding(b.zero, b.minus).sup_ratio, 16.0);
    EXPECT_TRUE(validate_ceh(a.ceh).passed());
    EXPECT_TRUE(validate_ceh(b.ceh).passed());
}

TEST(WeightedL2, RejectsBadWeights) {
    EXPECT_EQ(support::thrown_kind([] { weighted_l2_triplet({1, 0}, false); }), ErrorKind::BadWeight);
    EXPECT_EQ(support::thrown_kind([] { weighted_l2_triplet({1, -2}, false); }), ErrorKind::BadWeight);
}

TEST(WeightedL2, SymmetryExchangesReciprocalWeights) {
    // dyadic weights: 1/(1/w) == w bit for bit
    const std::vector<double> w = {4, 0.25, 2, 8, 0.5, 1};
    std::vector<double> inv;
    for (double x : w) inv.push_back(1.0 / x);
    const CehTriplet r = symmetry_ceh(weighted_l2_triplet(w, false).ceh);
    const CehTriplet d = weighted_l2_triplet(inv, false).ceh;
    EXPECT_EQ(r.h_plus().gram(), d.h_plus().gram());
    EXPECT_EQ(r.h_zero().gram(), d.h_zero().gram());
    EXPECT_EQ(r.h_minus().gram(), d.h_minus().gram());

    // generic weights agree to the last bit of the reciprocal
    const std::vector<double> g = {3, 7, 0.3, 11.5};
    std::vector<double> ginv;
    for (double x : g) ginv.push_back(1.0 / x);
    const CehTriplet rg = symmetry_ceh(weighted_l2_triplet(g, false).ceh);
    const CehTriplet dg = weighted_l2_triplet(ginv, false).ceh;
    EXPECT_LE(relative_residual(rg.h_minus().gram(), dg.h_minus().gram()), 1e-15);
    EXPECT_EQ(rg.h_plus().gram(), dg.h_plus().gram());
}

TEST(Dirichlet, OneVariableFrozenExample) {
    const DirichletParams p{1, {1.0}, {0.0}, 3};
    const FamilyInstance f = dirichlet_triplet(p);
    EXPECT_EQ(f.plus.weights(), (std::vector<double>{1, 1, 1, 1}));
    EXPECT_EQ(f.zero.weights(), (std::vector<double>{1, 2, 3, 4}));
    EXPECT_EQ(f.minus.weights(), (std::vector<double>{1, 4, 9, 16}));
    EXPECT_EQ(f.gt.b().matrix(), oracle::diag({1, 2, 3, 4}));
    // |B phi|^2_{D_0} = sum (k+1)^2 |phi_k|^2 = |phi|^2_{D_2}
    const ComplexVector phi = (ComplexVector(4) << 1.0, Complex(0, 2), -1.0, 0.5).finished();
    EXPECT_NEAR(f.ceh.h_plus().norm(f.gt.b()(phi)), f.ceh.h_minus().norm(phi), 1e-14);
    EXPECT_TRUE(f.plus.models_countable());
}

TEST(Dirichlet, EqualExponentsCollapse) {
    const DirichletParams p{2, {0.5, -1.5}, {0.5, -1.5}, 3};
    const FamilyInstance f = dirichlet_triplet(p);
    EXPECT_EQ(f.plus.weights(), f.zero.weights());
    EXPECT_EQ(f.minus.weights(), f.zero.weights());
}

TEST(Dirichlet, TwoVariablesCauchySchwarzOnRandomPairs) {
    const DirichletParams p{2, {1.0, 0.0}, {0.0, 1.0}, 2};
    const FamilyInstance f = dirichlet_triplet(p);
    ASSERT_EQ(f.zero.dim(), 9);
    EXPECT_LE(max_family_residual(f), 1e-10);
    oracle::Sampler s(61);
    double worst = 1.0;
    for (int k = 0; k < 1000; ++k) {
        const ComplexVector fv = s.vec(9), g = s.vec(9);
        worst = std::min(worst, cauchy_schwarz_slack(fv, g, f.ceh.h_zero(), f.ceh.h_minus(), f.ceh.h_plus()));
    }
    EXPECT_GE(worst, -1e-12);
    const ComplexVector g = s.vec(9);
    const ComplexVector eq = dirichlet_equality_witness(p, g);
    EXPECT_NEAR(cauchy_schwarz_slack(eq, g, f.ceh.h_zero(), f.ceh.h_minus(), f.ceh.h_plus()), 0.0, 1e-12);
}

TEST(Dirichlet, BMatchesClosedFormAndIsIsometric) {
    const DirichletParams p{3, {3.0, -3.0, 1.0}, {-3.0, 3.0, 0.5}, 3};
    const FamilyInstance f = dirichlet_triplet(p);
    const RealVector expected = dirichlet_expected_B(p);
    for (Index i = 0; i < expected.size(); ++i)
        EXPECT_LE(std::abs(f.gt.b().matrix()(i, i) - expected(i)), 1e-12 * expected(i));
    EXPECT_LE(is_unitary(f.gt.b(), 1e-12).residual, 1e-12);
    EXPECT_NEAR(is_contraction(f.gt.b()).margin, 0.0, 1e-12);
    EXPECT_EQ(gt_is_ceh(f.gt).verdict(), Verdict::Pass);
    for (const Check& c : gt_is_ceh(f.gt).checks) EXPECT_EQ(c.verdict, Verdict::PassDiagonal);
}

TEST(Dirichlet, SymmetryExchangesBeta) {
    const DirichletParams p{2, {1.0, 0.5}, {0.0, 2.0}, 3};
    DirichletParams q = p;
    for (std::size_t i = 0; i < q.beta.size(); ++i) q.beta[i] = 2.0 * p.alpha[i] - p.beta[i];
    const CehTriplet r = symmetry_ceh(dirichlet_triplet(p).ceh);
    const CehTriplet d = dirichlet_triplet(q).ceh;
    EXPECT_EQ(r.h_plus().gram(), d.h_plus().gram());
    EXPECT_EQ(r.h_zero().gram(), d.h_zero().gram());
    EXPECT_EQ(r.h_minus().gram(), d.h_minus().gram());
}

TEST(Dirichlet, OverflowAndShapeErrors) {
    using support::thrown_kind;
    EXPECT_EQ(thrown_kind([] { dirichlet_triplet({1, {800.0}, {0.0}, 2}); }), ErrorKind::Overflow);
    EXPECT_EQ(thrown_kind([] { dirichlet_triplet({2, {1.0}, {0.0, 0.0}, 2}); }), ErrorKind::DimensionMismatch);
    EXPECT_EQ(thrown_kind([] { dirichlet_triplet({0, {}, {}, 2}); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(thrown_kind([] { dirichlet_triplet({1, {1.0}, {0.0}, -1}); }), ErrorKind::InvalidArgument);
}

TEST(RandomInstance, FrozenExamples) {
    const RandomInstance one = random_instance(1, 1.0, 123);
    EXPECT_EQ(one.ceh.h_plus().gram()(0, 0), Complex(1, 0));
    EXPECT_EQ(one.ceh.h_minus().gram()(0, 0), Complex(1, 0));

    const RandomInstance small = random_instance(2, 16.0, 0);
    EXPECT_LE(validate_ceh(small.ceh).max_residual(), 1e-12);
    EXPECT_NEAR(small.ceh.h_plus().condition(), 16.0, 1e-12);
}

TEST(RandomInstance, LargeIllConditioned) {
    const RandomInstance r = random_instance(64, 1e8, 7, 1e-6);
    EXPECT_LE(validate_ceh(r.ceh, 1e-6).max_residual(), 1e-6);
    EXPECT_LE(verify_triplet_theorem(r.ceh, 1e-6).max_residual(), 1e-6);
    EXPECT_LE(check_gt_axioms(r.gt, 1e-6).residual("beta-pairing-identity"), 1e-6);
}

TEST(RandomInstance, DeterministicPerSeed) {
    const RandomInstance a = random_instance(6, 1e3, 42), b = random_instance(6, 1e3, 42);
    const RandomInstance c = random_instance(6, 1e3, 43);
    EXPECT_EQ(a.ceh.h_plus().gram(), b.ceh.h_plus().gram());
    EXPECT_EQ(a.ceh.h_minus().gram(), b.ceh.h_minus().gram());
    EXPECT_NE(a.ceh.h_plus().gram(), c.ceh.h_plus().gram());
    EXPECT_EQ(support::thrown_kind([] { random_instance(0, 2.0, 1); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(support::thrown_kind([] { random_instance(2, 0.5, 1); }), ErrorKind::InvalidArgument);
}

TEST(Rng, UniformAndNormalAreSane) {
    Rng rng(9);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double z = rng.normal();
        sum += z, sq += z * z;
    }
    EXPECT_NEAR(sum / 20000, 0.0, 0.05);
    EXPECT_NEAR(sq / 20000, 1.0, 0.05);
}

TEST(Rng, UnitaryAndSpectrum) {
    Rng rng(10);
    const ComplexMatrix u = random_unitary(7, rng);
    EXPECT_LT(oracle::frob(oracle::mul(oracle::herm(u), u) - ComplexMatrix::Identity(7, 7)), 1e-13);
    const RealVector l = log_uniform_spectrum(5, 1e6, rng);
    EXPECT_EQ(l(0), 1.0);
    EXPECT_DOUBLE_EQ(l(4), 1e6);
    for (Index i = 0; i < 5; ++i) EXPECT_TRUE(l(i) >= 1.0 && l(i) <= 1e6);
    const std::vector<double> ev = oracle::eigenvalues(random_gram(5, 1e3, rng));
    EXPECT_NEAR(ev.back() / ev.front(), 1e3, 1e-6);
}

TEST(Generators, RandomGtIsStrictlyContractive) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const GenTriplet g = random_gt(6, seed);
        EXPECT_TRUE(check_gt_axioms(g).passed());
        EXPECT_GT(is_contraction(g.b()).margin, 1e-6);
    }
}

TEST(Generators, PerturbMinusBreaksDuality) {
    const RandomInstance r = random_instance(4, 10.0, 5);
    const Section up = validate_ceh(perturb_minus(r.ceh, 1.01));
    EXPECT_EQ(up.find("th3-prime-norm-identity")->verdict, Verdict::Fail);
    EXPECT_EQ(support::thrown_kind([&] { ceh_to_gt(perturb_minus(r.ceh, 0.99)); }), ErrorKind::BridgeFailure);
}

TEST(Families, BridgeIsIsometric) {
    const FamilyInstance w = weighted_l2_triplet({0.1, 5, 1e3, 2}, true);
    EXPECT_NEAR(is_contraction(w.gt.b()).margin, 0.0, 1e-12);
    EXPECT_TRUE(w.bridge.passed());
    const FamilyInstance d = dirichlet_triplet({2, {-3.0, 3.0}, {3.0, -3.0}, 4});
    EXPECT_NEAR(is_contraction(d.gt.b()).margin, 0.0, 1e-12);
    EXPECT_LE(max_family_residual(d), 1e-10);
}
