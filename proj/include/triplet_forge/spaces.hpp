#pragma once

// Finite-dimensional Hilbert spaces realized as coordinate spaces with a Gram
// matrix: <x, y> = y^H G x (linear in the first slot).

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "triplet_forge/numkernel.hpp"

namespace triplet_forge {

namespace detail {

/// sum_i w_i x_i conj(y_i), accumulated in index order.
inline Complex diagonal_inner(const RealVector& w, const ComplexVector& x, const ComplexVector& y) {
    Complex acc(0.0, 0.0);
    for (Index i = 0; i < w.size(); ++i) acc += w(i) * x(i) * std::conj(y(i));
    return acc;
}

}  // namespace detail

class GramSpace {
public:
    /// Validates the Gram matrix: finite, Hermitian, positive definite. Diagonal
    /// Grams are accepted whenever every weight is positive; other Grams need
    /// min eigenvalue > rtol * max eigenvalue.
    explicit GramSpace(const ComplexMatrix& gram, std::string label = {}, bool models_countable = false,
                       double rtol = kDefaultRtol)
        : data_(std::make_shared<Data>()) {
        auto& d = *data_;
        if (gram.rows() == 0 || gram.cols() == 0) {
            throw Error(ErrorKind::DegenerateSpace, "zero-dimensional space '" + label + "'");
        }
        detail::require_square(gram, "Gram matrix");
        detail::require_finite(gram, "Gram matrix");
        d.label = std::move(label);
        d.models_countable = models_countable;
        d.diagonal = triplet_forge::is_diagonal(gram);
        if (d.diagonal) {
            const Index n = gram.rows();
            d.weights.resize(n);
            for (Index i = 0; i < n; ++i) {
                const Complex g = gram(i, i);
                if (g.imag() != 0.0 || !(g.real() > 0.0)) {
                    throw Error(ErrorKind::NotPositiveDefinite,
                                "diagonal Gram entry " + std::to_string(i) + " is not a positive real");
                }
                d.weights(i) = g.real();
            }
            d.gram = gram;
            d.inverse = ComplexMatrix::Zero(n, n);
            d.sqrt = ComplexMatrix::Zero(n, n);
            d.inv_sqrt = ComplexMatrix::Zero(n, n);
            for (Index i = 0; i < n; ++i) {
                d.inverse(i, i) = 1.0 / d.weights(i);
                d.sqrt(i, i) = std::sqrt(d.weights(i));
                d.inv_sqrt(i, i) = 1.0 / std::sqrt(d.weights(i));
            }
            d.min_eig = d.weights.minCoeff();
            d.max_eig = d.weights.maxCoeff();
            return;
        }
        const EigenDecomposition eig = hermitian_eigen(gram);
        d.min_eig = eig.eigenvalues(0);
        d.max_eig = eig.eigenvalues(eig.eigenvalues.size() - 1);
        if (!(d.min_eig > rtol * d.max_eig) || !(d.max_eig > 0.0)) {
            throw Error(ErrorKind::NotPositiveDefinite,
                        "Gram of '" + d.label + "' has eigenvalue range [" + std::to_string(d.min_eig) + ", " +
                            std::to_string(d.max_eig) + "]");
        }
        d.gram = hermitian_part(gram);
        d.inverse = hermitian_part(d.gram.llt().solve(ComplexMatrix::Identity(gram.rows(), gram.cols())));
        d.sqrt = spectral_map(eig, [](double x) { return std::sqrt(x); });
        d.inv_sqrt = spectral_map(eig, [](double x) { return 1.0 / std::sqrt(x); });
    }

    static GramSpace standard(Index dim, std::string label = {}) {
        if (dim <= 0) throw Error(ErrorKind::DegenerateSpace, "standard space needs dim >= 1");
        return GramSpace(ComplexMatrix::Identity(dim, dim), std::move(label));
    }

    static GramSpace diagonal(const RealVector& weights, std::string label = {}, bool models_countable = false) {
        return GramSpace(weights.cast<Complex>().asDiagonal().toDenseMatrix(), std::move(label), models_countable);
    }

    Index dim() const { return data_->gram.rows(); }
    const ComplexMatrix& gram() const { return data_->gram; }
    const std::string& label() const { return data_->label; }
    bool models_countable() const { return data_->models_countable; }
    bool is_diagonal() const { return data_->diagonal; }
    /// Only meaningful when is_diagonal().
    const RealVector& weights() const { return data_->weights; }

    const ComplexMatrix& gram_inverse() const { return data_->inverse; }
    const ComplexMatrix& gram_sqrt() const { return data_->sqrt; }
    const ComplexMatrix& gram_inv_sqrt() const { return data_->inv_sqrt; }
    double condition() const { return data_->max_eig / data_->min_eig; }

    Complex inner(const ComplexVector& x, const ComplexVector& y) const {
        check_coords(x);
        check_coords(y);
        if (data_->diagonal) return detail::diagonal_inner(data_->weights, x, y);
        return y.dot(data_->gram * x);
    }

    double norm(const ComplexVector& x) const { return std::sqrt(std::max(0.0, inner(x, x).real())); }

    GramSpace relabeled(std::string label) const {
        GramSpace copy = *this;
        auto d = std::make_shared<Data>(*data_);
        d->label = std::move(label);
        copy.data_ = std::move(d);
        return copy;
    }

    GramSpace with_countable(bool models_countable) const {
        GramSpace copy = *this;
        auto d = std::make_shared<Data>(*data_);
        d->models_countable = models_countable;
        copy.data_ = std::move(d);
        return copy;
    }

    /// Same coordinate dimension and Gram (bitwise, or within tol relative).
    bool same_as(const GramSpace& other, double tol = 1e-10) const {
        if (data_ == other.data_) return true;
        if (dim() != other.dim()) return false;
        if (gram() == other.gram()) return true;
        return (gram() - other.gram()).norm() <= tol * (1.0 + gram().norm());
    }

    bool operator==(const GramSpace& other) const {
        return dim() == other.dim() && gram() == other.gram() && label() == other.label() &&
               models_countable() == other.models_countable();
    }

private:
    void check_coords(const ComplexVector& x) const {
        if (x.size() != dim()) {
            throw Error(ErrorKind::DimensionMismatch, "vector of length " + std::to_string(x.size()) +
                                                          " in space of dim " + std::to_string(dim()));
        }
    }

    struct Data {
        ComplexMatrix gram, inverse, sqrt, inv_sqrt;
        RealVector weights;
        std::string label;
        bool models_countable = false;
        bool diagonal = false;
        double min_eig = 0.0, max_eig = 0.0;
    };
    std::shared_ptr<Data> data_;  // never mutated after construction
};

/// An element of a GramSpace.
struct Vector {
    GramSpace space;
    ComplexVector coords;
};

inline Complex inner(const Vector& x, const Vector& y) {
    if (!x.space.same_as(y.space)) throw Error(ErrorKind::SpaceMismatch, "inner product across different spaces");
    return x.space.inner(x.coords, y.coords);
}

inline double norm(const Vector& x) { return x.space.norm(x.coords); }

using MultiIndex = std::vector<int>;

/// Diagonal weighted sequence space, stored as an explicit finite truncation.
/// When `models_countable` is set the truncation stands for a countable space in
/// which finitely supported vectors are dense by convention.
class WeightedSpace {
public:
    WeightedSpace(std::vector<MultiIndex> indices, std::vector<double> weights, bool models_countable,
                  std::string label = {})
        : indices_(std::move(indices)), weights_(std::move(weights)), models_countable_(models_countable),
          label_(std::move(label)) {
        if (indices_.size() != weights_.size()) {
            throw Error(ErrorKind::DimensionMismatch, "weights and indices differ in length");
        }
        if (weights_.empty()) throw Error(ErrorKind::DegenerateSpace, "weighted space without indices");
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
                throw Error(ErrorKind::BadWeight, "weight " + std::to_string(i) + " = " + std::to_string(weights_[i]) +
                                                      " is not in (0, inf)");
            }
        }
    }

    /// Single-variable indices 0..n-1.
    static WeightedSpace sequence(const std::vector<double>& weights, bool models_countable, std::string label = {}) {
        std::vector<MultiIndex> idx;
        idx.reserve(weights.size());
        for (std::size_t k = 0; k < weights.size(); ++k) idx.push_back({static_cast<int>(k)});
        return WeightedSpace(std::move(idx), weights, models_countable, std::move(label));
    }

    const std::vector<MultiIndex>& indices() const { return indices_; }
    const std::vector<double>& weights() const { return weights_; }
    bool models_countable() const { return models_countable_; }
    const std::string& label() const { return label_; }
    Index dim() const { return static_cast<Index>(weights_.size()); }

    RealVector weight_vector() const { return Eigen::Map<const RealVector>(weights_.data(), dim()); }

    GramSpace as_gram() const { return GramSpace::diagonal(weight_vector(), label_, models_countable_); }

    Complex inner(const ComplexVector& x, const ComplexVector& y) const {
        return detail::diagonal_inner(weight_vector(), x, y);
    }

private:
    std::vector<MultiIndex> indices_;
    std::vector<double> weights_;
    bool models_countable_;
    std::string label_;
};

enum class EmbeddingKind { Continuous, ClosedUnbounded };

inline std::string_view to_string(EmbeddingKind k) {
    return k == EmbeddingKind::Continuous ? "Continuous" : "ClosedUnbounded";
}

struct EmbeddingClass {
    EmbeddingKind kind;
    double sup_ratio;       ///< max_i sqrt(to_i / from_i) over the truncation
    double boundary_ratio;  ///< max ratio over indices on the truncation boundary
    double interior_ratio;  ///< max ratio over the remaining indices (0 if none)
    std::string note;
};

/// Classifies the identity embedding `from -> to` as witnessed on the truncation.
/// Finite models are always Continuous. For countable models the embedding is
/// reported Continuous iff the ratio supremum is attained off the truncation
/// boundary (an index with some coordinate at its maximal value).
inline EmbeddingClass classify_embedding(const WeightedSpace& from, const WeightedSpace& to) {
    if (from.indices() != to.indices()) throw Error(ErrorKind::IndexMismatch, "embedding between different index sets");
    const auto& idx = from.indices();
    MultiIndex cap(idx.front().size(), std::numeric_limits<int>::min());
    for (const auto& k : idx) {
        if (k.size() != cap.size()) throw Error(ErrorKind::IndexMismatch, "multi-indices of mixed length");
        for (std::size_t v = 0; v < k.size(); ++v) cap[v] = std::max(cap[v], k[v]);
    }
    double sup = 0.0, boundary = 0.0, interior = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double r = std::sqrt(to.weights()[i] / from.weights()[i]);
        sup = std::max(sup, r);
        bool on_boundary = false;
        for (std::size_t v = 0; v < cap.size(); ++v) on_boundary = on_boundary || idx[i][v] == cap[v];
        if (idx.size() == 1) on_boundary = false;
        if (on_boundary) {
            boundary = std::max(boundary, r);
        } else {
            interior = std::max(interior, r);
        }
    }
    EmbeddingClass out{EmbeddingKind::Continuous, sup, boundary, interior, {}};
    const bool countable = from.models_countable() || to.models_countable();
    if (!countable) {
        out.note = "finite model: every embedding is bounded, norm " + std::to_string(sup);
        return out;
    }
    const bool attained_inside = interior >= sup * (1.0 - 1e-12);
    if (attained_inside) {
        out.note = "ratio supremum attained inside the truncation (witnessed on truncation only)";
    } else {
        out.kind = EmbeddingKind::ClosedUnbounded;
        out.note = "ratio grows to the truncation boundary: " + std::to_string(interior) + " -> " +
                   std::to_string(boundary) + " (witnessed on truncation only)";
    }
    return out;
}

}  // namespace triplet_forge
