#pragma once

// Named checks with residuals, tolerances and verdicts. Verifiers return a
// Section; the CLI assembles sections into a certificate.

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "triplet_forge/numkernel.hpp"

namespace triplet_forge {

enum class Verdict { Pass, Fail, PassStructural, PassDiagonal, Indeterminate };

constexpr std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::PassStructural: return "PASS-structural";
        case Verdict::PassDiagonal: return "PASS-diagonal";
        case Verdict::Indeterminate: return "INDETERMINATE";
    }
    return "FAIL";
}

struct Check {
    std::string name;
    std::string ref;  ///< statement this check instantiates
    double residual = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Pass;
    std::string note;
    std::vector<std::pair<std::string, ComplexVector>> witnesses;

    bool failed() const { return verdict == Verdict::Fail; }
};

/// PASS iff residual <= tol (NaN fails).
inline Check numeric_check(std::string name, std::string ref, double residual, double tol, std::string note = {}) {
    Check c;
    c.name = std::move(name);
    c.ref = std::move(ref);
    c.residual = residual;
    c.tolerance = tol;
    c.verdict = (residual <= tol) ? Verdict::Pass : Verdict::Fail;
    c.note = std::move(note);
    return c;
}

inline Check structural_check(std::string name, std::string ref, Verdict verdict, std::string note) {
    Check c;
    c.name = std::move(name);
    c.ref = std::move(ref);
    c.verdict = verdict;
    c.note = std::move(note);
    return c;
}

inline Verdict combine(const std::vector<Check>& checks) {
    bool indeterminate = false;
    for (const auto& c : checks) {
        if (c.verdict == Verdict::Fail) return Verdict::Fail;
        indeterminate = indeterminate || c.verdict == Verdict::Indeterminate;
    }
    return indeterminate ? Verdict::Indeterminate : Verdict::Pass;
}

struct Section {
    std::string title;
    std::vector<Check> checks;

    Check& add(Check c) {
        checks.push_back(std::move(c));
        return checks.back();
    }

    void append(const Section& other) {
        for (const auto& c : other.checks) checks.push_back(c);
    }

    Verdict verdict() const { return combine(checks); }
    bool passed() const { return verdict() != Verdict::Fail; }

    const Check* find(std::string_view name) const {
        for (const auto& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }

    /// Residual of the named check; +inf when absent.
    double residual(std::string_view name) const {
        const Check* c = find(name);
        return c ? c->residual : INFINITY;
    }

    /// Largest residual over numeric checks.
    double max_residual() const {
        double m = 0.0;
        for (const auto& c : checks) {
            if (c.verdict == Verdict::Pass || c.verdict == Verdict::Fail) m = std::max(m, c.residual);
        }
        return m;
    }
};

}  // namespace triplet_forge
