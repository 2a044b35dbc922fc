#pragma once

// The triplet-forge command line. run() is the whole program; tools/main.cpp
// forwards to it so tests can drive commands in-process.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "triplet_forge/io.hpp"

namespace triplet_forge::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kInputError = 2 };

struct Options {
    double tol = 1e-9;
    std::optional<double> rtol;
    std::string out;
};

/// --rtol, else TRIPLET_FORGE_RTOL, else the library default.
inline double effective_rtol(const Options& o) {
    if (o.rtol) return *o.rtol;
    if (const char* env = std::getenv("TRIPLET_FORGE_RTOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "TRIPLET_FORGE_RTOL must be a positive number");
        }
        return v;
    }
    return kDefaultRtol;
}

struct Source {
    std::string text;
    std::string descriptor;
};

/// A file path, or inline JSON when the argument starts with '[' or '{'.
inline Source load_source(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (arg[first] == '[' || arg[first] == '{')) return {arg, "inline"};
    return {read_file(arg), std::filesystem::path(arg).filename().string()};
}

inline Json config_json(const Options& o, double rtol) { return {{"tol", o.tol}, {"rtol", rtol}}; }

inline CertificateInput start(const std::string& command, const std::string& descriptor, std::string_view hashed,
                              const Options& o, double rtol) {
    CertificateInput c;
    c.command = command;
    c.descriptor = descriptor;
    c.input_hash = "fnv1a64:" + hex64(fnv1a64(hashed));
    c.config = config_json(o, rtol);
    return c;
}

// Section builders shared by several commands.

/// Structure theorem and symmetry, when the embeddings are invertible.
inline void add_structure(CertificateInput& cert, const CehTriplet& t, double tol, double rtol) {
    if (!t.embeddings_invertible()) return;
    cert.sections.push_back(verify_triplet_theorem(t, tol, rtol));
    const CehTriplet r = symmetry_ceh(t);
    const CehTriplet rr = symmetry_ceh(r);
    Section s{"triplet symmetry", {}};
    const bool exact = rr.j_plus().matrix() == t.j_plus().matrix() && rr.j_minus().matrix() == t.j_minus().matrix() &&
                       rr.h_plus() == t.h_plus() && rr.h_minus() == t.h_minus() &&
                       rr.kernel().matrix() == t.kernel().matrix();
    s.add(numeric_check("involution-exact", "triplet symmetry: reversing twice returns the triplet", exact ? 0.0 : 1.0,
                        0.0));
    s.add(numeric_check("reversed-kernel-equals-hamiltonian",
                        "triplet symmetry (2): kernel of (H-;H0;H+) is the Hamiltonian",
                        relative_residual(kernel_operator(r.j_plus()).matrix(), t.hamiltonian().matrix()), tol));
    s.append(validate_ceh(r, tol, rtol));
    cert.sections.push_back(std::move(s));
}

inline void add_bridge(CertificateInput& cert, const CehTriplet& t, double tol, Json* gt_out) {
    try {
        BridgeResult b = ceh_to_gt(t, tol);
        if (gt_out) *gt_out = gt_to_json(b.gt);
        cert.sections.push_back(std::move(b.report));
    } catch (const WitnessedError& e) {
        if (e.kind() != ErrorKind::BridgeFailure) throw;
        Section s{"closely embedded to generalised", {}};
        Check c = numeric_check("c-pairing-bounded", "ceh-to-gt (c): |<phi,u>_0| <= |phi|- |u|+", e.ratio() - 1.0, tol,
                                e.what());
        c.witnesses = e.witnesses();
        s.add(std::move(c));
        cert.sections.push_back(std::move(s));
    }
}

inline void add_gt(CertificateInput& cert, const GenTriplet& g, double tol, double rtol, Json* ceh_out) {
    Section axioms = check_gt_axioms(g, tol);
    const bool valid = axioms.passed();
    cert.sections.push_back(std::move(axioms));
    cert.sections.push_back(gt_is_ceh(g));
    if (!valid) return;
    cert.sections.push_back(verify_symmetry_gt(g, tol));
    GtToCehResult conv = gt_to_ceh(g, tol, rtol);
    cert.sections.push_back(std::move(conv.report));
    cert.config["c1"] = number(conv.c1);
    cert.config["c2"] = number(conv.c2);
    if (ceh_out) *ceh_out = triplet_to_json(conv.triplet);
}

// Commands. Each returns the certificate; run() maps its verdict to an exit code.

inline CertificateInput cmd_validate_ceh(const std::string& arg, const Options& o) {
    const double rtol = effective_rtol(o);
    const Source src = load_source(arg);
    const CehTriplet t = parse_triplet(parse_json_text(src.text), rtol);
    CertificateInput cert = start("validate-ceh", src.descriptor, src.text, o, rtol);
    cert.sections.push_back(validate_ceh(t, o.tol, rtol));
    add_structure(cert, t, o.tol, rtol);
    return cert;
}

inline CertificateInput cmd_validate_gt(const std::string& arg, const Options& o) {
    const double rtol = effective_rtol(o);
    const Source src = load_source(arg);
    const GenTriplet g = parse_gt(parse_json_text(src.text), rtol);
    CertificateInput cert = start("validate-gt", src.descriptor, src.text, o, rtol);
    add_gt(cert, g, o.tol, rtol, nullptr);
    cert.result = {{"b", matrix_to_json(g.b().matrix())}};
    return cert;
}

inline CertificateInput cmd_convert(const std::string& from, const std::string& arg, const Options& o) {
    const double rtol = effective_rtol(o);
    const Source src = load_source(arg);
    const Json j = parse_json_text(src.text);
    CertificateInput cert = start("convert --from " + from, src.descriptor, src.text, o, rtol);
    if (from == "ceh") {
        const CehTriplet t = parse_triplet(j, rtol);
        cert.sections.push_back(validate_ceh(t, o.tol, rtol));
        Json gt;
        add_bridge(cert, t, o.tol, &gt);
        cert.result = gt;
    } else {
        const GenTriplet g = parse_gt(j, rtol);
        Json ceh;
        add_gt(cert, g, o.tol, rtol, &ceh);
        cert.result = ceh;
    }
    return cert;
}

inline CertificateInput cmd_build_model(const std::string& h_arg, const std::string& t_arg, const Options& o) {
    const double rtol = effective_rtol(o);
    const Source hs = load_source(h_arg);
    const MappedOperator h = parse_hamiltonian(parse_json_text(hs.text), rtol);
    std::optional<MappedOperator> factor;
    std::string hashed = hs.text;
    if (!t_arg.empty()) {
        const Source ts = load_source(t_arg);
        factor = parse_factor(parse_json_text(ts.text), h.domain(), rtol);
        hashed += '\0' + ts.text;
    }
    const CehTriplet t = build_model_triplet(h, factor, rtol, o.tol);
    const MappedOperator used = factor ? *factor : operator_sqrt(h);
    CertificateInput cert = start("build-model", hs.descriptor, hashed, o, rtol);
    cert.config["factor"] = factor ? "given" : "positive square root";
    cert.sections.push_back(validate_ceh(t, o.tol, rtol));
    cert.sections.push_back(verify_model_theorem(t, used, o.tol, rtol));
    cert.sections.push_back(verify_p_dete(used, o.tol, rtol));
    cert.sections.push_back(verify_kernel_theorem(t.j_plus(), o.tol, rtol));
    add_structure(cert, t, o.tol, rtol);
    cert.result = triplet_to_json(t);
    return cert;
}

inline void add_family(CertificateInput& cert, const FamilyInstance& f, double tol, double rtol) {
    cert.sections.push_back(validate_ceh(f.ceh, tol, rtol));
    add_structure(cert, f.ceh, tol, rtol);
    cert.sections.push_back(f.bridge);
    cert.sections.push_back(gt_is_ceh(f.gt));

    Section s{"embedding classification", {}};
    const EmbeddingClass plus = classify_embedding(f.plus, f.zero);
    const EmbeddingClass minus = classify_embedding(f.zero, f.minus);
    s.add(structural_check("j-plus-continuity", "triplet structure (b): j+ and j- simultaneously continuous or not",
                           Verdict::PassStructural, std::string(to_string(plus.kind)) + ": " + plus.note));
    s.add(structural_check("j-minus-continuity", "triplet structure (b): j+ and j- simultaneously continuous or not",
                           Verdict::PassStructural, std::string(to_string(minus.kind)) + ": " + minus.note));
    s.add(numeric_check("simultaneous-continuity", "triplet structure (b): j+ and j- simultaneously continuous or not",
                        plus.kind == minus.kind ? 0.0 : 1.0, 0.0));
    cert.sections.push_back(std::move(s));
    cert.result = {{"ceh", triplet_to_json(f.ceh)}, {"gt", gt_to_json(f.gt)}};
}

/// |<phi,u>_0| <= |phi|_a |u|_b on the equality witness built from u = (1, ..., 1).
inline Section equality_witness_section(const std::string& ref, const ComplexVector& phi, const ComplexVector& u,
                                        const GramSpace& pair, const GramSpace& phi_space, const GramSpace& u_space,
                                        double tol) {
    Section s{"Cauchy-Schwarz equality witness", {}};
    const double slack = cauchy_schwarz_slack(phi, u, pair, phi_space, u_space);
    Check c = numeric_check("cauchy-schwarz-equality", ref, std::abs(slack), tol, "relative slack at the witness");
    c.witnesses = {{"phi", phi}, {"u", u}};
    s.add(std::move(c));
    return s;
}

inline CertificateInput cmd_weighted_l2(const std::vector<double>& w, bool countable, const Options& o) {
    const double rtol = effective_rtol(o);
    const FamilyInstance f = weighted_l2_triplet(w, countable, o.tol);
    std::ostringstream key;
    key << "weighted-l2";
    for (double x : w) key << ' ' << number(x).dump();
    key << (countable ? " countable" : "");
    CertificateInput cert = start("family weighted-l2", key.str(), key.str(), o, rtol);
    cert.config["models_countable"] = countable;
    add_family(cert, f, o.tol, rtol);
    const ComplexVector u = ComplexVector::Ones(static_cast<Index>(w.size()));
    const ComplexVector phi = weighted_l2_equality_witness(w, u);
    cert.sections.push_back(equality_witness_section("weighted L2: |<phi,u>| <= |phi|_w |u|_{1/w}", phi, u,
                                                     f.zero.as_gram(), f.plus.as_gram(), f.minus.as_gram(), o.tol));
    return cert;
}

inline CertificateInput cmd_dirichlet(const DirichletParams& p, const Options& o) {
    const double rtol = effective_rtol(o);
    const FamilyInstance f = dirichlet_triplet(p, o.tol);
    Json params = {{"n_vars", p.n_vars}, {"degree", p.degree}, {"alpha", Json::array()}, {"beta", Json::array()}};
    for (double a : p.alpha) params["alpha"].push_back(number(a));
    for (double b : p.beta) params["beta"].push_back(number(b));
    const std::string key = "dirichlet " + params.dump();
    CertificateInput cert = start("family dirichlet", key, key, o, rtol);
    cert.config["family"] = params;
    add_family(cert, f, o.tol, rtol);

    Section b{"Dirichlet pairing operator", {}};
    const RealVector expected = dirichlet_expected_B(p);
    const ComplexMatrix bm = f.gt.b().matrix();
    double gap = 0.0;
    for (Index i = 0; i < expected.size(); ++i) gap = std::max(gap, std::abs(bm(i, i) - expected(i)) / expected(i));
    b.add(numeric_check("B-diagonal-entries", "Dirichlet example: B = diag((k+1)^(alpha-beta))",
                        is_diagonal(bm) ? gap : INFINITY, o.tol));
    b.add(numeric_check("B-isometric", "Dirichlet example: B Gram-isometric H- -> H+",
                        is_unitary(f.gt.b(), o.tol, rtol).residual, o.tol));
    cert.sections.push_back(std::move(b));

    const ComplexVector g = ComplexVector::Ones(f.zero.dim());
    const ComplexVector fw = dirichlet_equality_witness(p, g);
    cert.sections.push_back(equality_witness_section("Dirichlet example: |<f,g>_alpha| <= |f|_{2alpha-beta} |g|_beta",
                                                     fw, g, f.zero.as_gram(), f.minus.as_gram(), f.plus.as_gram(),
                                                     o.tol));
    return cert;
}

inline CertificateInput cmd_random(Index n, double cond, std::uint64_t seed, const Options& o) {
    const double rtol = effective_rtol(o);
    const double tol = o.tol * std::sqrt(cond);
    const RandomInstance r = random_instance(n, cond, seed, tol);
    const std::string key =
        "random dim=" + std::to_string(n) + " cond=" + number(cond).dump() + " seed=" + std::to_string(seed);
    CertificateInput cert = start("random", key, key, o, rtol);
    cert.config["dim"] = n;
    cert.config["cond"] = number(cond);
    cert.config["seed"] = seed;
    cert.config["effective_tol"] = number(tol);
    cert.sections.push_back(validate_ceh(r.ceh, tol, rtol));
    add_structure(cert, r.ceh, tol, rtol);
    add_bridge(cert, r.ceh, tol, nullptr);
    add_gt(cert, r.gt, tol, rtol, nullptr);
    cert.result = {{"ceh", triplet_to_json(r.ceh)}, {"gt", gt_to_json(r.gt)}};
    return cert;
}

/// Validates one instance file, choosing the schema by its keys.
inline CertificateInput validate_any(const std::string& path, const Options& o) {
    const Json j = parse_json_text(read_file(path));
    if (j.is_object() && j.contains("h_plus")) return cmd_validate_ceh(path, o);
    if (j.is_object() && j.contains("h_prime")) return cmd_validate_gt(path, o);
    throw Error(ErrorKind::Parse, "'" + path + "' is neither a triplet nor a generalised triplet");
}

inline Json cmd_batch(const std::string& dir, unsigned jobs, const Options& o, Verdict& verdict) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(ErrorKind::Parse, "'" + dir + "' is not a directory");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<Json> entries(files.size());
    std::vector<Verdict> verdicts(files.size(), Verdict::Pass);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            Json entry = {{"file", fs::path(files[i]).filename().string()}};
            try {
                const CertificateInput c = validate_any(files[i], o);
                verdicts[i] = overall_verdict(c.sections);
                entry["certificate"] = certificate_to_json(c);
                entry["verdict"] = std::string(to_string(verdicts[i]));
            } catch (const std::exception& e) {
                verdicts[i] = Verdict::Fail;
                entry["verdict"] = "ERROR";
                entry["error"] = e.what();
            }
            entries[i] = std::move(entry);
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    bool indeterminate = false;
    verdict = Verdict::Pass;
    for (Verdict v : verdicts) {
        if (v == Verdict::Fail) verdict = Verdict::Fail;
        indeterminate = indeterminate || v == Verdict::Indeterminate;
    }
    if (verdict != Verdict::Fail && indeterminate) verdict = Verdict::Indeterminate;
    return {{"tool", std::string(kToolName)},
            {"tool_version", std::string(kToolVersion)},
            {"command", "batch"},
            {"entries", entries},
            {"verdict", std::string(to_string(verdict))}};
}

namespace detail {

inline void add_common(CLI::App* app, Options& o) {
    app->add_option("--tol", o.tol, "tolerance for identities")->check(CLI::PositiveNumber);
    app->add_option("--rtol", o.rtol, "relative rank tolerance (env TRIPLET_FORGE_RTOL)")->check(CLI::PositiveNumber);
    app->add_option("--out", o.out, "write the certificate here instead of stdout");
}

inline int emit(const std::string& text, const Options& o, std::ostream& out) {
    if (o.out.empty()) {
        out << text;
        return 0;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::Parse, "cannot write '" + o.out + "'");
    f << text;
    return 0;
}

inline int exit_for(Verdict v) { return v == Verdict::Fail ? kFail : kPass; }

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Verify closely embedded and generalised triplets of Hilbert spaces", std::string(kToolName)};
    app.require_subcommand(1);
    Options o;

    std::string h_arg, t_arg, file, from, dir;
    auto* build = app.add_subcommand("build-model", "model triplet of a positive Hamiltonian H = T* T");
    build->add_option("--hamiltonian", h_arg, "Hamiltonian (file or inline JSON)")->required();
    build->add_option("--factor", t_arg, "factor T with H = T* T (file or inline JSON)");
    detail::add_common(build, o);

    auto* vceh = app.add_subcommand("validate-ceh", "check the axioms of a closely embedded triplet");
    vceh->add_option("file", file, "triplet JSON")->required();
    detail::add_common(vceh, o);

    auto* vgt = app.add_subcommand("validate-gt", "check the axioms of a generalised triplet");
    vgt->add_option("file", file, "generalised triplet JSON")->required();
    detail::add_common(vgt, o);

    auto* conv = app.add_subcommand("convert", "convert between closely embedded and generalised triplets");
    conv->add_option("--from", from, "input kind")->required()->check(CLI::IsMember({"ceh", "gt"}));
    conv->add_option("file", file, "instance JSON")->required();
    detail::add_common(conv, o);

    auto* family = app.add_subcommand("family", "worked example families");
    family->require_subcommand(1);
    std::vector<double> weights;
    bool countable = false;
    auto* wl2 = family->add_subcommand("weighted-l2", "(L2_w; L2; L2_1/w)");
    wl2->add_option("--weights", weights, "positive weights")->required()->delimiter(',');
    wl2->add_flag("--countable", countable, "treat the index set as a truncation of a countable one");
    detail::add_common(wl2, o);
    DirichletParams dp;
    auto* dir_cmd = family->add_subcommand("dirichlet", "(D_beta; D_alpha; D_2alpha-beta)");
    dir_cmd->add_option("--alpha", dp.alpha, "alpha exponents")->required()->delimiter(',');
    dir_cmd->add_option("--beta", dp.beta, "beta exponents")->required()->delimiter(',');
    dir_cmd->add_option("--n-vars", dp.n_vars, "number of variables")->required();
    dir_cmd->add_option("--degree", dp.degree, "degree cap per variable")->required();
    detail::add_common(dir_cmd, o);

    long long dim = 0;
    double cond = 1.0;
    std::uint64_t seed = 0;
    auto* rnd = app.add_subcommand("random", "seeded random triplet");
    rnd->add_option("--dim", dim, "dimension")->required();
    rnd->add_option("--cond", cond, "condition number of G+")->required();
    rnd->add_option("--seed", seed, "seed")->required();
    detail::add_common(rnd, o);

    unsigned jobs = 1;
    auto* batch = app.add_subcommand("batch", "validate every *.json instance in a directory");
    batch->add_option("dir", dir, "directory")->required();
    batch->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    detail::add_common(batch, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kPass;
        }
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (*batch) {
            Verdict v = Verdict::Pass;
            const Json j = cmd_batch(dir, jobs, o, v);
            detail::emit(canonical_dump(j), o, out);
            return detail::exit_for(v);
        }
        CertificateInput cert;
        if (*build) {
            cert = cmd_build_model(h_arg, t_arg, o);
        } else if (*vceh) {
            cert = cmd_validate_ceh(file, o);
        } else if (*vgt) {
            cert = cmd_validate_gt(file, o);
        } else if (*conv) {
            cert = cmd_convert(from, file, o);
        } else if (*wl2) {
            cert = cmd_weighted_l2(weights, countable, o);
        } else if (*dir_cmd) {
            cert = cmd_dirichlet(dp, o);
        } else {
            if (dim < 1) throw Error(ErrorKind::InvalidArgument, "--dim must be at least 1");
            cert = cmd_random(static_cast<Index>(dim), cond, seed, o);
        }
        detail::emit(canonical_dump(certificate_to_json(cert)), o, out);
        return detail::exit_for(overall_verdict(cert.sections));
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

}  // namespace triplet_forge::cli
