#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace triplet_forge {

enum class ErrorKind {
    NonFinite,
    NotHermitian,
    NotPSD,
    NotPositiveDefinite,
    DegenerateSpace,
    DimensionMismatch,
    SpaceMismatch,
    IndexMismatch,
    NotInvertible,
    ZeroOperator,
    FactorizationResidual,
    NotInRange,
    NotPositive,
    FactorMismatch,
    NotInjective,
    NotSpanning,
    SharedEmbeddingMismatch,
    NotContractive,
    NotBoundedlyInvertible,
    BridgeFailure,
    BadWeight,
    Overflow,
    InvalidArgument,
    Parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotPSD: return "NotPSD";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::DegenerateSpace: return "DegenerateSpace";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::SpaceMismatch: return "SpaceMismatch";
        case ErrorKind::IndexMismatch: return "IndexMismatch";
        case ErrorKind::NotInvertible: return "NotInvertible";
        case ErrorKind::ZeroOperator: return "ZeroOperator";
        case ErrorKind::FactorizationResidual: return "FactorizationResidual";
        case ErrorKind::NotInRange: return "NotInRange";
        case ErrorKind::NotPositive: return "NotPositive";
        case ErrorKind::FactorMismatch: return "FactorMismatch";
        case ErrorKind::NotInjective: return "NotInjective";
        case ErrorKind::NotSpanning: return "NotSpanning";
        case ErrorKind::SharedEmbeddingMismatch: return "SharedEmbeddingMismatch";
        case ErrorKind::NotContractive: return "NotContractive";
        case ErrorKind::NotBoundedlyInvertible: return "NotBoundedlyInvertible";
        case ErrorKind::BridgeFailure: return "BridgeFailure";
        case ErrorKind::BadWeight: return "BadWeight";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

/// Every failure raised by the library. `kind()` is the stable, machine-readable part.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// An error that carries named vectors demonstrating the violation (e.g. a pair
/// (phi, u) breaking a Cauchy-Schwarz type bound).
class WitnessedError : public Error {
public:
    using Witness = std::pair<std::string, Eigen::VectorXcd>;

    WitnessedError(ErrorKind kind, const std::string& message, std::vector<Witness> witnesses, double ratio)
        : Error(kind, message), witnesses_(std::move(witnesses)), ratio_(ratio) {}

    const std::vector<Witness>& witnesses() const noexcept { return witnesses_; }
    /// Size of the violation, e.g. |<phi,u>| / (|phi| |u|).
    double ratio() const noexcept { return ratio_; }

private:
    std::vector<Witness> witnesses_;
    double ratio_;
};

}  // namespace triplet_forge
