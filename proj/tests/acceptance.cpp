// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "triplet_forge/cli.hpp"

using namespace triplet_forge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

/// Named CEH instances that validate: random, model and family triplets.
struct Named {
    std::string name;
    CehTriplet t;
};

std::vector<FamilyInstance> family_instances() {
    std::vector<FamilyInstance> out;
    std::vector<double> sq, inv_sq;
    for (int k = 0; k < 8; ++k) {
        sq.push_back((k + 1.0) * (k + 1.0));
        inv_sq.push_back(1.0 / sq.back());
    }
    out.push_back(weighted_l2_triplet({4, 0.25}, false));
    out.push_back(weighted_l2_triplet(sq, true));
    out.push_back(weighted_l2_triplet(inv_sq, true));
    out.push_back(weighted_l2_triplet({3.0, 0.7, 11.0, 1e-3, 42.0}, false));
    for (const DirichletParams& p : {DirichletParams{1, {1}, {0}, 5}, DirichletParams{2, {1, 0}, {0, 1}, 4},
                                     DirichletParams{2, {-2, 3}, {3, -3}, 5}, DirichletParams{3, {1, 2, -1}, {-3, 0, 2}, 3}}) {
        out.push_back(dirichlet_triplet(p));
    }
    return out;
}

std::vector<Named> validated_instances() {
    std::vector<Named> out;
    std::uint64_t seed = 100;
    for (Index n : {2, 4, 8, 16}) {
        for (double cond : {10.0, 1e3, 1e6}) {
            out.push_back({"random n=" + std::to_string(n) + " cond=" + fmt(cond), random_instance(n, cond, seed++).ceh});
        }
    }
    for (Index n : {2, 8, 16}) {
        const MappedOperator h = random_hamiltonian(n, 1e4, seed++);
        out.push_back({"model n=" + std::to_string(n), build_model_triplet(h)});
    }
    int i = 0;
    for (const FamilyInstance& f : family_instances()) out.push_back({"family #" + std::to_string(i++), f.ceh});
    return out;
}

double named_residual(const Section& s, const char* name) { return s.residual(name); }

/// Largest residual among numeric checks, skipping the condition-number check.
double max_defect(const Section& s) {
    double worst = 0.0;
    for (const Check& c : s.checks) {
        if (c.name != "gt3-bounded-inverse") worst = std::max(worst, c.residual);
    }
    return worst;
}

// 1
Outcome kernel_identity() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const Index dims[] = {2, 8, 16, 64};
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Index n = dims[i % 4];
        const double cond = std::pow(10.0, 1.0 + (i % 6));
        const MappedOperator h = random_hamiltonian(n, cond, 1000 + static_cast<std::uint64_t>(i));
        const CehTriplet t = build_model_triplet(h);
        const double r = relative_residual(t.kernel().matrix() * h.matrix(), ComplexMatrix::Identity(n, n));
        worst = std::max(worst, r);
        o.require(r <= 1e-7, "n=" + std::to_string(n) + " cond=" + fmt(cond) + " residual " + fmt(r));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= 30.0, "runtime " + fmt(secs) + " s");
    if (o.ok) o.detail = "50 Hamiltonians, worst " + fmt(worst) + ", " + fmt(secs) + " s";
    return o;
}

// 2
Outcome norm_identity(const std::vector<Named>& instances) {
    Outcome o;
    double worst = 0.0;
    for (const Named& x : instances) {
        const double r = named_residual(validate_ceh(x.t), "th3-prime-norm-identity");
        worst = std::max(worst, r);
        o.require(r <= 1e-9, x.name + " residual " + fmt(r));
    }
    const CehTriplet control = perturb_minus(random_instance(4, 100.0, 7).ceh, 1.01);
    const Section s = validate_ceh(control);
    o.require(s.find("th3-prime-norm-identity")->verdict == Verdict::Fail, "1.01 control did not fail");
    if (o.ok) o.detail = std::to_string(instances.size()) + " instances, worst " + fmt(worst) + "; control FAIL";
    return o;
}

// 3
Outcome dual_supremum() {
    Outcome o;
    for (int k = 0; k < 20; ++k) {
        const Index rows = 1 + (k * 5) % 16, cols = 1 + (k * 3) % 16;
        const MappedOperator t = random_operator(rows, cols, 300 + static_cast<std::uint64_t>(k), k % 4 == 3);
        Rng rng(900 + static_cast<std::uint64_t>(k));
        const ComplexVector u = t.matrix() * rng.gaussian(cols, 1).col(0);
        const double closed = dual_norm(u, t);
        const double sampled = oracle::sampled_dual_sup(u, t.matrix(), t.domain().gram(), t.codomain().gram(), 10000,
                                                        500 + static_cast<std::uint64_t>(k));
        o.require(sampled <= closed * (1.0 + 1e-12),
                  "operator " + std::to_string(k) + ": sample " + fmt(sampled) + " > closed " + fmt(closed));
        const double attained = dual_quotient(u, dual_norm_maximizer(u, t), t);
        o.require(std::abs(attained - closed) <= 1e-9 * closed,
                  "operator " + std::to_string(k) + ": maximizer gap " + fmt(std::abs(attained - closed) / closed));
    }
    if (o.ok) o.detail = "20 operators x 1e4 samples";
    return o;
}

// 4
Outcome unitary_structure(const std::vector<Named>& instances) {
    Outcome o;
    double worst = 0.0;
    for (const Named& x : instances) {
        const Section s = verify_triplet_theorem(x.t, 1e-8);
        const double v = named_residual(s, "b-V-tilde-unitary");
        const double h = named_residual(s, "d-H-tilde-inverts-V-tilde");
        worst = std::max({worst, v, h});
        o.require(v <= 1e-8 && h <= 1e-8, x.name + ": V~ " + fmt(v) + ", H~V~-I " + fmt(h));
    }
    if (o.ok) o.detail = std::to_string(instances.size()) + " instances, worst " + fmt(worst);
    return o;
}

bool same_space(const GramSpace& a, const GramSpace& b) { return a == b && a.gram() == b.gram(); }

// 5
Outcome symmetry(const std::vector<Named>& instances) {
    Outcome o;
    double worst = 0.0;
    for (const Named& x : instances) {
        const CehTriplet twice = symmetry_ceh(symmetry_ceh(x.t));
        o.require(same_space(twice.h_plus(), x.t.h_plus()) && same_space(twice.h_zero(), x.t.h_zero()) &&
                      same_space(twice.h_minus(), x.t.h_minus()) &&
                      twice.j_plus().matrix() == x.t.j_plus().matrix() &&
                      twice.j_minus().matrix() == x.t.j_minus().matrix(),
                  x.name + ": CEH symmetry twice is not the original");
        const CehTriplet r = symmetry_ceh(x.t);
        const double swap = std::max(relative_residual(r.kernel().matrix(), x.t.hamiltonian().matrix()),
                                     relative_residual(r.hamiltonian().matrix(), x.t.kernel().matrix()));
        worst = std::max(worst, swap);
        o.require(swap <= 1e-9, x.name + ": swap residual " + fmt(swap));
    }
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const GenTriplet g = random_gt(2 + static_cast<Index>(seed % 5), seed);
        const GenTriplet twice = symmetry_gt(symmetry_gt(g));
        o.require(same_space(twice.h(), g.h()) && same_space(twice.h_zero(), g.h_zero()) &&
                      same_space(twice.h_prime(), g.h_prime()) && twice.b().matrix() == g.b().matrix(),
                  "GT symmetry twice is not the original (seed " + std::to_string(seed) + ")");
    }
    if (o.ok) o.detail = "exact involutions; worst swap " + fmt(worst);
    return o;
}

// 6
Outcome bridge(const std::vector<Named>& instances) {
    Outcome o;
    double worst = 0.0;
    for (const Named& x : instances) {
        try {
            const BridgeResult b = ceh_to_gt(x.t);
            const double defect = named_residual(b.report, "c-pairing-bounded");
            worst = std::max(worst, defect);
            o.require(defect <= 1e-9, x.name + ": margin defect " + fmt(defect));
        } catch (const Error& e) {
            o.require(false, x.name + ": " + e.what());
        }
    }
    int controls = 0;
    for (const Named& x : instances) {
        for (double factor : {1.01, 0.99, 1.1, 0.9}) {
            const CehTriplet bad = perturb_minus(x.t, factor);
            bool flagged = false;
            try {
                Section s = validate_ceh(bad);
                s.append(ceh_to_gt(bad).report);
                flagged = s.verdict() == Verdict::Fail;
            } catch (const Error& e) {
                flagged = e.kind() == ErrorKind::BridgeFailure;
            }
            ++controls;
            o.require(flagged, x.name + ": factor " + fmt(factor) + " not flagged");
        }
    }
    if (o.ok) o.detail = "worst margin defect " + fmt(worst) + "; " + std::to_string(controls) + " violations flagged";
    return o;
}

/// Weighted condition number of B from the generalised eigenvalues of (B^H G_H B, G_H').
double oracle_cond(const GenTriplet& g) {
    const oracle::Mat b = g.b().matrix();
    const oracle::Mat form = oracle::mul(oracle::mul(oracle::herm(b), g.h().gram()), b);
    Eigen::GeneralizedSelfAdjointEigenSolver<oracle::Mat> ges(0.5 * (form + oracle::herm(form)), g.h_prime().gram());
    const Eigen::VectorXd ev = ges.eigenvalues();
    return std::sqrt(ev.maxCoeff() / ev.minCoeff());
}

void check_gt_round_trip(Outcome& o, const std::string& name, const GenTriplet& g, bool expect_unit_constants) {
    const GtToCehResult r = gt_to_ceh(g);
    const double gram = named_residual(r.report, "3i-R-gram-equals-H");
    o.require(gram <= 1e-10, name + ": R(T) Gram residual " + fmt(gram));
    const double cond = oracle_cond(g);
    o.require(r.c2 / r.c1 <= (1.0 + 1e-9) * cond,
              name + ": c2/c1 " + fmt(r.c2 / r.c1) + " exceeds cond " + fmt(cond));
    if (expect_unit_constants) {
        o.require(r.c1 <= 1.0 + 1e-9 && r.c2 >= 1.0 - 1e-9,
                  name + ": c1 " + fmt(r.c1) + ", c2 " + fmt(r.c2) + " do not bracket 1");
    }
    const GenTriplet back = ceh_to_gt(r.triplet).gt;
    const double b = relative_residual(back.b().matrix(), g.b().matrix());
    o.require(b <= 1e-8, name + ": round-trip B residual " + fmt(b));
}

// 7
Outcome gt_round_trip(const std::vector<Named>& instances) {
    Outcome o;
    int count = 0;
    for (const Named& x : instances) {
        check_gt_round_trip(o, x.name, ceh_to_gt(x.t).gt, true);
        ++count;
    }
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const GenTriplet g = random_gt(2 + static_cast<Index>(seed % 8), 700 + seed);
        const std::string name = "random GT seed " + std::to_string(seed);
        check_gt_round_trip(o, name, g, false);
        check_gt_round_trip(o, name + " renormed", renormed(g), true);
        count += 2;
    }
    if (o.ok) o.detail = std::to_string(count) + " generalised triplets";
    return o;
}

// 8
Outcome families() {
    Outcome o;
    oracle::Sampler s(808);
    std::vector<double> sq;
    for (int k = 0; k < 10; ++k) sq.push_back((k + 1.0) * (k + 1.0));
    struct Case {
        std::string name;
        FamilyInstance f;
        std::function<ComplexVector(const ComplexVector&)> witness;  // u in H+ -> phi in H- attaining equality
        std::optional<RealVector> expected_b;
    };
    std::vector<Case> cases;
    for (const std::vector<double>& w : {std::vector<double>{4, 0.25}, sq, std::vector<double>{3.0, 0.7, 11.0, 1e-3}}) {
        std::vector<double> inv(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) inv[i] = 1.0 / w[i];
        cases.push_back({"weighted-l2 n=" + std::to_string(w.size()), weighted_l2_triplet(w, true),
                         [inv](const ComplexVector& u) { return weighted_l2_equality_witness(inv, u); }, {}});
    }
    const std::vector<DirichletParams> params = {
        {1, {3}, {-3}, 5}, {1, {0}, {0}, 5}, {2, {1, 0}, {0, 1}, 5}, {2, {-3, 2}, {3, -1}, 4}, {3, {1, -2, 3}, {-3, 3, 0}, 3}};
    for (const DirichletParams& p : params) {
        cases.push_back({"dirichlet N=" + std::to_string(p.n_vars) + " d=" + std::to_string(p.degree), dirichlet_triplet(p),
                         [p](const ComplexVector& g) { return dirichlet_equality_witness(p, g); },
                         dirichlet_expected_B(p)});
    }

    for (const Case& c : cases) {
        Section all = validate_ceh(c.f.ceh, 1e-10);
        all.append(c.f.bridge);
        all.append(check_gt_axioms(c.f.gt, 1e-10));
        const double worst = max_defect(all);
        o.require(all.verdict() != Verdict::Fail && worst <= 1e-10, c.name + ": residual " + fmt(worst));

        const MappedOperator& b = c.f.gt.b();
        if (c.expected_b) {
            const ComplexMatrix expected = c.expected_b->cast<Complex>().asDiagonal();
            o.require(is_diagonal(b.matrix()) && relative_residual(b.matrix(), expected) <= 1e-12,
                      c.name + ": B is not diag((k+1)^(alpha-beta))");
        }
        const double iso = is_unitary(b, 1e-12).residual;
        o.require(iso <= 1e-12, c.name + ": B isometry residual " + fmt(iso));

        const Index n = c.f.ceh.h_zero().dim();
        double slack = INFINITY;
        for (int k = 0; k < 1000; ++k) {
            const ComplexVector phi = s.vec(n), u = s.vec(n);
            slack = std::min(slack, cauchy_schwarz_slack(phi, u, c.f.ceh.h_zero(), c.f.ceh.h_minus(), c.f.ceh.h_plus()));
        }
        o.require(slack >= -1e-12, c.name + ": Cauchy-Schwarz slack " + fmt(slack));
        const ComplexVector u = s.vec(n);
        const double eq =
            cauchy_schwarz_slack(c.witness(u), u, c.f.ceh.h_zero(), c.f.ceh.h_minus(), c.f.ceh.h_plus());
        o.require(std::abs(eq) <= 1e-12, c.name + ": equality witness slack " + fmt(eq));
    }
    if (o.ok) o.detail = std::to_string(cases.size()) + " instances";
    return o;
}

// 9
Outcome extension(const std::vector<Named>& instances) {
    Outcome o;
    double worst = 0.0;
    for (const Named& x : instances) {
        const CehTriplet ext = extend_embedding(x.t.j_plus());
        o.require(validate_ceh(ext).verdict() != Verdict::Fail, x.name + ": extension does not validate");
        const UniquenessResult u = uniqueness_unitary(x.t, ext, 1e-8);
        worst = std::max(worst, u.unitary_residual);
        o.require(u.unitary_residual <= 1e-8, x.name + ": Phi- residual " + fmt(u.unitary_residual));
    }
    if (o.ok) o.detail = std::to_string(instances.size()) + " embeddings, worst " + fmt(worst);
    return o;
}

std::string run_cli(std::vector<std::string> args, int& code) {
    args.insert(args.begin(), "triplet-forge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return out.str() + err.str();
}

// 10
Outcome determinism() {
    Outcome o;
    const std::string ceh = R"({"h_plus": {"weights": [4, 0.25]}, "h_zero": {"dim": 2}, "h_minus": {"weights": [0.25, 4]}})";
    const std::string gt = R"({"h": {"weights": [4, 1]}, "h_zero": {"dim": 2}, "h_prime": {"weights": [0.25, 1]}})";
    const fs::path dir = fs::temp_directory_path() / "triplet_forge_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "a.json") << ceh;
    std::ofstream(dir / "b.json") << gt;
    std::ofstream(dir / "c.json") << R"({"h_plus": {"dim": 2}, "h_zero": {"dim": 2}, "h_minus": {"weights": [2, 2]}})";

    const std::vector<std::vector<std::string>> commands = {
        {"validate-ceh", ceh},
        {"validate-gt", gt},
        {"convert", "--from", "ceh", ceh},
        {"convert", "--from", "gt", gt},
        {"build-model", "--hamiltonian", "[[2, 1], [1, 2]]"},
        {"family", "weighted-l2", "--weights", "1,4,9,16", "--countable"},
        {"family", "dirichlet", "--n-vars", "2", "--alpha", "1,0", "--beta", "0,1", "--degree", "3"},
        {"random", "--dim", "16", "--cond", "1e6", "--seed", "42"},
        {"batch", dir.string(), "--jobs", "4"},
    };
    for (const auto& cmd : commands) {
        int c1 = 0, c2 = 0;
        const std::string a = run_cli(cmd, c1), b = run_cli(cmd, c2);
        o.require(a == b && c1 == c2, cmd[0] + ": outputs differ between runs");
    }
    int c = 0;
    o.require(run_cli({"batch", dir.string(), "--jobs", "1"}, c) == run_cli({"batch", dir.string(), "--jobs", "4"}, c),
              "batch output depends on --jobs");
    fs::remove_all(dir);
    if (o.ok) o.detail = std::to_string(commands.size()) + " commands byte-identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<Named> instances = validated_instances();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"model kernel equals inverse Hamiltonian", kernel_identity},
        {"th3' norm identity", [&] { return norm_identity(instances); }},
        {"dual-norm supremum", dual_supremum},
        {"unitary structure of V~ and H~", [&] { return unitary_structure(instances); }},
        {"symmetry involutions", [&] { return symmetry(instances); }},
        {"closely embedded to generalised bridge", [&] { return bridge(instances); }},
        {"generalised to closely embedded round trip", [&] { return gt_round_trip(instances); }},
        {"weighted-l2 and Dirichlet families", families},
        {"extension and uniqueness", [&] { return extension(instances); }},
        {"CLI determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.ok) ++failures;
        std::printf("[%s] criterion %zu: %s (%s)\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
