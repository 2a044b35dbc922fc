#pragma once

// JSON ingestion of spaces, operators and triplets, and canonical emission.
//
// A matrix is a list of rows; every entry is a number or a [re, im] pair. A
// Gram may also be given as a flat row-major list of n*n entries.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "triplet_forge/families.hpp"

namespace triplet_forge {

using Json = nlohmann::json;

inline constexpr std::string_view kToolName = "triplet-forge";
inline constexpr std::string_view kToolVersion = "1.0.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }

inline Complex parse_entry(const Json& e) {
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        return {e[0].get<double>(), e[1].get<double>()};
    }
    parse_fail("matrix entry must be a number or a [re, im] pair");
}

inline bool is_entry(const Json& e) {
    return e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number());
}

inline const Json& require_key(const Json& j, const char* key, std::string_view context) {
    if (!j.is_object() || !j.contains(key)) parse_fail(std::string(context) + " needs key '" + key + "'");
    return j.at(key);
}

}  // namespace detail

inline ComplexMatrix parse_matrix(const Json& j) {
    if (!j.is_array() || j.empty()) detail::parse_fail("matrix must be a non-empty list of rows");
    if (j[0].is_number()) {
        // a single row of real scalars
        ComplexMatrix m(1, static_cast<Index>(j.size()));
        for (std::size_t c = 0; c < j.size(); ++c) m(0, static_cast<Index>(c)) = detail::parse_entry(j[c]);
        return m;
    }
    const auto rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) detail::parse_fail("matrix rows must be non-empty lists");
    const auto cols = static_cast<Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) detail::parse_fail("ragged matrix rows");
        for (Index c = 0; c < cols; ++c) m(r, c) = detail::parse_entry(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

namespace detail {

inline ComplexMatrix parse_flat(const Json& j, Index dim) {
    ComplexMatrix m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
        for (Index c = 0; c < dim; ++c) m(r, c) = parse_entry(j[static_cast<std::size_t>(r * dim + c)]);
    }
    return m;
}

}  // namespace detail

/// Gram given as rows or as a flat row-major list of dim*dim entries.
inline ComplexMatrix parse_gram(const Json& j, Index dim) {
    if (!j.is_array() || j.empty()) detail::parse_fail("gram must be a non-empty list");
    const bool flat_size = static_cast<Index>(j.size()) == dim * dim;
    if (j[0].is_number() || (flat_size && static_cast<Index>(j.size()) != dim)) {
        if (!flat_size) detail::parse_fail("flat gram must have dim*dim = " + std::to_string(dim * dim) + " entries");
        return detail::parse_flat(j, dim);
    }
    ComplexMatrix m = parse_matrix(j);
    if ((m.rows() != dim || m.cols() != dim) && flat_size && detail::is_entry(j[0])) return detail::parse_flat(j, dim);
    return m;
}

inline WeightedSpace parse_weighted_space(const Json& j) {
    const Json& w = detail::require_key(j, "weights", "weighted space");
    if (!w.is_array()) detail::parse_fail("weights must be a list");
    std::vector<double> weights;
    for (const auto& x : w) {
        if (!x.is_number()) detail::parse_fail("weights must be numbers");
        weights.push_back(x.get<double>());
    }
    const bool countable = j.value("models_countable", false);
    const std::string label = j.value("label", std::string{});
    if (j.contains("indices")) {
        std::vector<MultiIndex> idx;
        for (const auto& k : j.at("indices")) {
            if (k.is_number_integer()) {
                idx.push_back({k.get<int>()});
            } else {
                idx.push_back(k.get<MultiIndex>());
            }
        }
        return WeightedSpace(std::move(idx), std::move(weights), countable, label);
    }
    return WeightedSpace::sequence(weights, countable, label);
}

inline GramSpace parse_space(const Json& j, double rtol = kDefaultRtol) {
    if (!j.is_object()) detail::parse_fail("space must be an object");
    if (j.contains("weights")) return parse_weighted_space(j).as_gram();
    const Json& d = detail::require_key(j, "dim", "space");
    if (!d.is_number_integer()) detail::parse_fail("dim must be an integer");
    const auto dim = d.get<Index>();
    if (dim < 1) throw Error(ErrorKind::DegenerateSpace, "space dim must be at least 1");
    const std::string label = j.value("label", std::string{});
    const bool countable = j.value("models_countable", false);
    if (!j.contains("gram")) return GramSpace(ComplexMatrix::Identity(dim, dim), label, countable, rtol);
    const ComplexMatrix g = parse_gram(j.at("gram"), dim);
    if (g.rows() != dim || g.cols() != dim) {
        throw Error(ErrorKind::DimensionMismatch, "gram is " + std::to_string(g.rows()) + "x" +
                                                      std::to_string(g.cols()) + " for dim " + std::to_string(dim));
    }
    return GramSpace(g, label, countable, rtol);
}

/// Operator between known spaces: a matrix, {"matrix": ...}, or null for the identity.
inline MappedOperator parse_operator_between(const Json* j, const GramSpace& dom, const GramSpace& cod) {
    if (j == nullptr || j->is_null()) return MappedOperator::identity(dom, cod);
    const Json& m = j->is_object() ? detail::require_key(*j, "matrix", "operator") : *j;
    return MappedOperator(parse_matrix(m), dom, cod);
}

/// {"matrix": ..., "domain": <space>, "codomain": <space>}; missing spaces are standard.
inline MappedOperator parse_operator(const Json& j, double rtol = kDefaultRtol) {
    const Json& mj = j.is_object() ? detail::require_key(j, "matrix", "operator") : j;
    const ComplexMatrix m = parse_matrix(mj);
    const bool obj = j.is_object();
    const GramSpace dom = obj && j.contains("domain") ? parse_space(j.at("domain"), rtol) : GramSpace::standard(m.cols());
    const GramSpace cod =
        obj && j.contains("codomain") ? parse_space(j.at("codomain"), rtol) : GramSpace::standard(m.rows());
    return MappedOperator(m, dom, cod);
}

/// Hamiltonian: an operator whose codomain defaults to its domain.
inline MappedOperator parse_hamiltonian(const Json& j, double rtol = kDefaultRtol) {
    const Json& mj = j.is_object() ? detail::require_key(j, "matrix", "hamiltonian") : j;
    const ComplexMatrix m = parse_matrix(mj);
    GramSpace space = GramSpace::standard(m.cols(), "H0");
    if (j.is_object() && j.contains("space")) space = parse_space(j.at("space"), rtol);
    if (j.is_object() && j.contains("domain")) space = parse_space(j.at("domain"), rtol);
    return MappedOperator(m, space, space);
}

/// Factor T defined on the Hamiltonian's space.
inline MappedOperator parse_factor(const Json& j, const GramSpace& h0, double rtol = kDefaultRtol) {
    const Json& mj = j.is_object() ? detail::require_key(j, "matrix", "factor") : j;
    const ComplexMatrix m = parse_matrix(mj);
    const GramSpace cod =
        j.is_object() && j.contains("codomain") ? parse_space(j.at("codomain"), rtol) : GramSpace::standard(m.rows(), "G");
    return MappedOperator(m, h0, cod);
}

inline CehTriplet parse_triplet(const Json& j, double rtol = kDefaultRtol) {
    if (!j.is_object()) detail::parse_fail("triplet must be an object");
    const GramSpace hp = parse_space(detail::require_key(j, "h_plus", "triplet"), rtol).relabeled("H+");
    const GramSpace h0 = parse_space(detail::require_key(j, "h_zero", "triplet"), rtol).relabeled("H0");
    const GramSpace hm = parse_space(detail::require_key(j, "h_minus", "triplet"), rtol).relabeled("H-");
    const Json* jp = j.contains("j_plus") ? &j.at("j_plus") : nullptr;
    const Json* jm = j.contains("j_minus") ? &j.at("j_minus") : nullptr;
    return CehTriplet(parse_operator_between(jp, hp, h0), parse_operator_between(jm, h0, hm), rtol);
}

inline GenTriplet parse_gt(const Json& j, double rtol = kDefaultRtol) {
    if (!j.is_object()) detail::parse_fail("generalised triplet must be an object");
    return GenTriplet(parse_space(detail::require_key(j, "h", "generalised triplet"), rtol).relabeled("H"),
                      parse_space(detail::require_key(j, "h_zero", "generalised triplet"), rtol).relabeled("H0"),
                      parse_space(detail::require_key(j, "h_prime", "generalised triplet"), rtol).relabeled("H'"));
}

/// Parses JSON text; failures become Parse errors.
inline Json parse_json_text(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::exception& e) {
        detail::parse_fail(std::string("malformed JSON: ") + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Emission

/// Finite numbers stay numbers; inf and nan become strings.
inline Json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

inline Json entry_to_json(Complex z) { return Json::array({number(z.real()), number(z.imag())}); }

inline Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(entry_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json vector_to_json(const ComplexVector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(entry_to_json(v(i)));
    return out;
}

inline Json space_to_json(const GramSpace& s) {
    Json j = {{"dim", s.dim()}, {"models_countable", s.models_countable()}};
    if (!s.label().empty()) j["label"] = s.label();
    if (s.is_diagonal()) {
        Json w = Json::array();
        for (Index i = 0; i < s.dim(); ++i) w.push_back(number(s.weights()(i)));
        j["weights"] = std::move(w);
    } else {
        j["gram"] = matrix_to_json(s.gram());
    }
    return j;
}

inline Json operator_to_json(const MappedOperator& m) {
    return {{"matrix", matrix_to_json(m.matrix())},
            {"domain", space_to_json(m.domain())},
            {"codomain", space_to_json(m.codomain())}};
}

inline Json triplet_to_json(const CehTriplet& t) {
    return {{"h_plus", space_to_json(t.h_plus())},
            {"h_zero", space_to_json(t.h_zero())},
            {"h_minus", space_to_json(t.h_minus())},
            {"j_plus", matrix_to_json(t.j_plus().matrix())},
            {"j_minus", matrix_to_json(t.j_minus().matrix())}};
}

inline Json gt_to_json(const GenTriplet& g) {
    return {{"h", space_to_json(g.h())},
            {"h_zero", space_to_json(g.h_zero())},
            {"h_prime", space_to_json(g.h_prime())},
            {"b", matrix_to_json(g.b().matrix())}};
}

inline Json check_to_json(const Check& c, const std::string& section) {
    Json j = {{"name", c.name},
              {"paper_ref", c.ref},
              {"section", section},
              {"verdict", std::string(to_string(c.verdict))},
              {"note", c.note}};
    if (c.verdict == Verdict::Pass || c.verdict == Verdict::Fail) {
        j["residual"] = number(c.residual);
        j["tolerance"] = number(c.tolerance);
    } else {
        j["residual"] = nullptr;
        j["tolerance"] = nullptr;
    }
    if (!c.witnesses.empty()) {
        Json w = Json::object();
        for (const auto& [name, v] : c.witnesses) w[name] = vector_to_json(v);
        j["witness"] = std::move(w);
    }
    return j;
}

struct CertificateInput {
    std::string command;
    std::string descriptor;
    std::string input_hash;
    Json config = Json::object();
    std::vector<Section> sections;
    Json result;
};

inline Verdict overall_verdict(const std::vector<Section>& sections) {
    std::vector<Check> all;
    for (const auto& s : sections) all.insert(all.end(), s.checks.begin(), s.checks.end());
    return combine(all);
}

inline Json certificate_to_json(const CertificateInput& in) {
    Json checks = Json::array();
    for (const auto& s : in.sections) {
        for (const auto& c : s.checks) checks.push_back(check_to_json(c, s.title));
    }
    Json j = {{"tool", std::string(kToolName)},
              {"tool_version", std::string(kToolVersion)},
              {"command", in.command},
              {"instance", {{"descriptor", in.descriptor}, {"input_hash", in.input_hash}}},
              {"config", in.config},
              {"checks", std::move(checks)},
              {"verdict", std::string(to_string(overall_verdict(in.sections)))}};
    if (!in.result.is_null()) j["result"] = in.result;
    return j;
}

namespace detail {

inline void dump_number(std::string& out, const Json& j) {
    if (j.is_number_integer()) {
        out += j.dump();
        return;
    }
    const double x = j.get<double>();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}

inline void dump_canonical(std::string& out, const Json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys sorted
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                dump_canonical(out, it.value(), depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            bool flat = true;
            for (const auto& e : j) flat = flat && !e.is_object() && !(e.is_array() && !detail::is_entry(e));
            if (j.empty()) {
                out += "[]";
                return;
            }
            if (flat) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    dump_canonical(out, j[i], depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump_canonical(out, j[i], depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float:
        case Json::value_t::number_integer:
        case Json::value_t::number_unsigned:
            dump_number(out, j);
            return;
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Sorted keys, 17 significant digits, two-space indentation, trailing newline.
inline std::string canonical_dump(const Json& j) {
    std::string out;
    detail::dump_canonical(out, j, 0);
    out += "\n";
    return out;
}

}  // namespace triplet_forge
