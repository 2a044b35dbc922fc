#pragma once

// Dense complex decompositions used by every other module. All routines are
// deterministic functions of their input bits.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "triplet_forge/error.hpp"

namespace triplet_forge {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultRtol = 1e-12;
/// Relative bound on ||M - M^H||_F below which M is treated as Hermitian.
inline constexpr double kHermitianBound = 1e-10;

struct EigenDecomposition {
    RealVector eigenvalues;      ///< ascending
    ComplexMatrix eigenvectors;  ///< unitary; column i belongs to eigenvalues(i)
};

namespace detail {

inline void require_finite(const ComplexMatrix& m, std::string_view what) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::NonFinite, std::string(what) + " has a NaN or Inf entry");
    }
}

inline void require_square(const ComplexMatrix& m, std::string_view what) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + " must be square, got " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
    }
}

}  // namespace detail

/// True when every off-diagonal entry is exactly zero.
inline bool is_diagonal(const ComplexMatrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
        }
    }
    return true;
}

inline bool is_identity(const ComplexMatrix& m) {
    return m.rows() == m.cols() && m == ComplexMatrix::Identity(m.rows(), m.cols());
}

/// ||lhs - rhs||_F / (1 + ||rhs||_F).
inline double relative_residual(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    return (lhs - rhs).norm() / (1.0 + rhs.norm());
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) * 0.5; }

inline double hermitian_defect(const ComplexMatrix& m) { return (m - m.adjoint()).norm(); }

inline EigenDecomposition hermitian_eigen(const ComplexMatrix& m) {
    detail::require_finite(m, "hermitian_eigen input");
    detail::require_square(m, "hermitian_eigen input");
    const double defect = hermitian_defect(m);
    if (defect > kHermitianBound * (1.0 + m.norm())) {
        throw Error(ErrorKind::NotHermitian, "symmetry residual " + std::to_string(defect));
    }
    if (m.rows() == 0) return {RealVector(0), ComplexMatrix(0, 0)};
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NotHermitian, "eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Applies a real function to the spectrum of a Hermitian matrix.
template <typename F>
ComplexMatrix spectral_map(const EigenDecomposition& eig, F&& f) {
    const RealVector mapped = eig.eigenvalues.unaryExpr(std::forward<F>(f));
    ComplexMatrix out = eig.eigenvectors * mapped.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
    return hermitian_part(out);
}

inline ComplexMatrix positive_sqrt(const ComplexMatrix& m) {
    const EigenDecomposition eig = hermitian_eigen(m);
    if (eig.eigenvalues.size() == 0) return m;
    const double top = eig.eigenvalues.maxCoeff();
    const double floor = -1e-12 * std::max(1.0, top);
    if (eig.eigenvalues.minCoeff() < floor) {
        throw Error(ErrorKind::NotPSD, "eigenvalue " + std::to_string(eig.eigenvalues.minCoeff()) +
                                           " below floor " + std::to_string(floor));
    }
    if (is_diagonal(m)) {
        ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
        for (Index i = 0; i < m.rows(); ++i) out(i, i) = std::sqrt(std::max(0.0, m(i, i).real()));
        return out;
    }
    return spectral_map(eig, [](double x) { return std::sqrt(std::max(0.0, x)); });
}

inline RealVector singular_values(const ComplexMatrix& m) {
    detail::require_finite(m, "singular_values input");
    if (m.size() == 0) return RealVector(0);
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    return svd.singularValues();
}

inline Index rank(const ComplexMatrix& m, double rtol = kDefaultRtol) {
    if (!(rtol > 0.0)) throw Error(ErrorKind::InvalidArgument, "rtol must be positive");
    const RealVector s = singular_values(m);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cut = rtol * s(0);
    return static_cast<Index>((s.array() > cut).count());
}

inline ComplexMatrix pinv(const ComplexMatrix& m, double rtol = kDefaultRtol) {
    if (!(rtol > 0.0)) throw Error(ErrorKind::InvalidArgument, "rtol must be positive");
    detail::require_finite(m, "pinv input");
    if (m.size() == 0) return ComplexMatrix::Zero(m.cols(), m.rows());
    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    if (s(0) == 0.0) return ComplexMatrix::Zero(m.cols(), m.rows());
    const double cut = rtol * s(0);
    RealVector inv_s(s.size());
    for (Index i = 0; i < s.size(); ++i) inv_s(i) = s(i) > cut ? 1.0 / s(i) : 0.0;
    return svd.matrixV() * inv_s.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

/// Injectivity of the coordinate map. Diagonal matrices are decided exactly.
inline bool is_injective(const ComplexMatrix& m, double rtol = kDefaultRtol) {
    if (m.cols() == 0) return true;
    if (m.rows() == m.cols() && is_diagonal(m)) {
        return (m.diagonal().array() != Complex(0.0, 0.0)).all();
    }
    return rank(m, rtol) == m.cols();
}

inline bool is_surjective(const ComplexMatrix& m, double rtol = kDefaultRtol) {
    if (m.rows() == 0) return true;
    if (m.rows() == m.cols() && is_diagonal(m)) {
        return (m.diagonal().array() != Complex(0.0, 0.0)).all();
    }
    return rank(m, rtol) == m.rows();
}

inline bool is_invertible(const ComplexMatrix& m, double rtol = kDefaultRtol) {
    return m.rows() == m.cols() && is_injective(m, rtol);
}

/// Inverse of an invertible square matrix (exact elementwise for diagonals).
inline ComplexMatrix matrix_inverse(const ComplexMatrix& m) {
    detail::require_square(m, "matrix_inverse input");
    if (is_diagonal(m)) {
        ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
        for (Index i = 0; i < m.rows(); ++i) out(i, i) = Complex(1.0, 0.0) / m(i, i);
        return out;
    }
    return m.partialPivLu().inverse();
}

}  // namespace triplet_forge
