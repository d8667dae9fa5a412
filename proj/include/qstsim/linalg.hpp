// Copyright 2026 The qstsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra on small tensor-product Hilbert spaces.
//
// Composite spaces use Kronecker ordering: the left (first) subsystem is the
// slowest-varying index. All types are immutable values.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qstsim/error.hpp"

namespace qstsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Ordered subsystem dimensions of a tensor-product space.
class HilbertDims {
  public:
    HilbertDims() = default;

    explicit HilbertDims(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) {
            throw DimensionError("HilbertDims needs at least one subsystem");
        }
        for (std::size_t d : dims_) {
            if (d < 1) throw DimensionError("subsystem dimension must be >= 1");
        }
    }

    HilbertDims(std::initializer_list<std::size_t> dims)
        : HilbertDims(std::vector<std::size_t>(dims)) {}

    std::size_t subsystems() const noexcept { return dims_.size(); }
    std::size_t operator[](std::size_t i) const { return dims_.at(i); }
    std::span<const std::size_t> dims() const noexcept { return dims_; }

    std::size_t total() const noexcept {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                               std::multiplies<>());
    }

    HilbertDims concat(const HilbertDims& other) const {
        std::vector<std::size_t> out = dims_;
        out.insert(out.end(), other.dims_.begin(), other.dims_.end());
        return HilbertDims(std::move(out));
    }

    /// Flat index of a multi-index (one entry per subsystem).
    std::size_t flat_index(std::span<const std::size_t> digits) const {
        if (digits.size() != dims_.size()) {
            throw DimensionError("multi-index length does not match subsystem count");
        }
        std::size_t idx = 0;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (digits[k] >= dims_[k]) throw DimensionError("multi-index digit out of range");
            idx = idx * dims_[k] + digits[k];
        }
        return idx;
    }

    std::vector<std::size_t> digits(std::size_t flat) const {
        std::vector<std::size_t> out(dims_.size());
        for (std::size_t k = dims_.size(); k-- > 0;) {
            out[k] = flat % dims_[k];
            flat /= dims_[k];
        }
        return out;
    }

    std::string to_string() const {
        std::string s = "[";
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (k) s += ", ";
            s += std::to_string(dims_[k]);
        }
        return s + "]";
    }

    friend bool operator==(const HilbertDims&, const HilbertDims&) = default;

  private:
    std::vector<std::size_t> dims_;
};

namespace detail {

inline void require_same_dims(const HilbertDims& a, const HilbertDims& b, const char* what) {
    if (!(a == b)) {
        throw DimensionError(std::string(what) + ": dims " + a.to_string() + " vs " +
                             b.to_string());
    }
}

}  // namespace detail

class StateVector {
  public:
    StateVector(HilbertDims dims, Vector amplitudes)
        : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amplitudes_.size()) != dims_.total()) {
            throw DimensionError("state length " + std::to_string(amplitudes_.size()) +
                                 " does not match dims " + dims_.to_string());
        }
        if (!amplitudes_.allFinite()) throw DimensionError("state has non-finite amplitudes");
    }

    /// Computational basis vector |digits⟩.
    static StateVector basis(const HilbertDims& dims, std::span<const std::size_t> digits) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
        v(static_cast<Eigen::Index>(dims.flat_index(digits))) = 1.0;
        return {dims, std::move(v)};
    }

    static StateVector basis(std::size_t dim, std::size_t k) {
        const std::size_t digit[] = {k};
        return basis(HilbertDims{dim}, digit);
    }

    const HilbertDims& dims() const noexcept { return dims_; }
    const Vector& amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](std::size_t i) const {
        return amplitudes_(static_cast<Eigen::Index>(i));
    }
    std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }

    double norm() const { return amplitudes_.norm(); }
    double norm_squared() const { return amplitudes_.squaredNorm(); }

    StateVector normalized() const {
        const double n = norm();
        if (n == 0.0) throw DimensionError("cannot normalize the zero vector");
        return {dims_, amplitudes_ / n};
    }

    std::vector<double> populations() const {
        std::vector<double> p(size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm((*this)[i]);
        return p;
    }

  private:
    HilbertDims dims_;
    Vector amplitudes_;
};

class Operator {
  public:
    Operator(HilbertDims dims, Matrix matrix) : dims_(std::move(dims)), matrix_(std::move(matrix)) {
        const auto side = static_cast<Eigen::Index>(dims_.total());
        if (matrix_.rows() != matrix_.cols()) throw DimensionError("operator matrix not square");
        if (matrix_.rows() != side) {
            throw DimensionError("operator side " + std::to_string(matrix_.rows()) +
                                 " does not match dims " + dims_.to_string());
        }
    }

    static Operator identity(const HilbertDims& dims) {
        const auto n = static_cast<Eigen::Index>(dims.total());
        return {dims, Matrix::Identity(n, n)};
    }

    static Operator zero(const HilbertDims& dims) {
        const auto n = static_cast<Eigen::Index>(dims.total());
        return {dims, Matrix::Zero(n, n)};
    }

    const HilbertDims& dims() const noexcept { return dims_; }
    const Matrix& matrix() const noexcept { return matrix_; }
    std::size_t side() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

    Complex operator()(std::size_t row, std::size_t col) const {
        return matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    friend Operator operator+(const Operator& a, const Operator& b) {
        detail::require_same_dims(a.dims_, b.dims_, "operator +");
        return {a.dims_, a.matrix_ + b.matrix_};
    }
    friend Operator operator-(const Operator& a, const Operator& b) {
        detail::require_same_dims(a.dims_, b.dims_, "operator -");
        return {a.dims_, a.matrix_ - b.matrix_};
    }
    friend Operator operator*(const Operator& a, const Operator& b) {
        detail::require_same_dims(a.dims_, b.dims_, "operator *");
        return {a.dims_, a.matrix_ * b.matrix_};
    }
    friend Operator operator*(Complex c, const Operator& a) { return {a.dims_, c * a.matrix_}; }
    friend Operator operator*(double c, const Operator& a) { return {a.dims_, c * a.matrix_}; }

    friend StateVector operator*(const Operator& a, const StateVector& psi) {
        detail::require_same_dims(a.dims_, psi.dims(), "operator * state");
        return {a.dims_, a.matrix_ * psi.amplitudes()};
    }

  private:
    HilbertDims dims_;
    Matrix matrix_;
};

class DensityMatrix {
  public:
    /// Default hermiticity tolerance for construction.
    static constexpr double kHermitianTol = 1e-10;

    DensityMatrix(HilbertDims dims, Matrix matrix, double hermitian_tol = kHermitianTol)
        : dims_(std::move(dims)), matrix_(std::move(matrix)) {
        const auto side = static_cast<Eigen::Index>(dims_.total());
        if (matrix_.rows() != side || matrix_.cols() != side) {
            throw DimensionError("density matrix shape does not match dims " + dims_.to_string());
        }
        const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > hermitian_tol * scale) {
            throw DimensionError("density matrix is not Hermitian");
        }
    }

    /// |ψ⟩⟨ψ| without normalization (conditional states keep their norm).
    static DensityMatrix from_state(const StateVector& psi) {
        return {psi.dims(), psi.amplitudes() * psi.amplitudes().adjoint()};
    }

    const HilbertDims& dims() const noexcept { return dims_; }
    const Matrix& matrix() const noexcept { return matrix_; }
    std::size_t side() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

    Complex operator()(std::size_t row, std::size_t col) const {
        return matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    Complex trace() const { return matrix_.trace(); }

    std::vector<double> populations() const {
        std::vector<double> p(side());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = (*this)(i, i).real();
        return p;
    }

    double min_eigenvalue() const {
        const Matrix herm = 0.5 * (matrix_ + matrix_.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

  private:
    HilbertDims dims_;
    Matrix matrix_;
};

// ---------------------------------------------------------------------------
// Tensor products

inline Operator tensor(const Operator& a, const Operator& b) {
    return {a.dims().concat(b.dims()), Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval()};
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    return {a.dims().concat(b.dims()),
            Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval()};
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return {a.dims().concat(b.dims()), Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval()};
}

template <typename T, typename... Rest>
T tensor(const T& a, const T& b, const Rest&... rest) {
    return tensor(tensor(a, b), rest...);
}

// ---------------------------------------------------------------------------
// Reductions and queries

/// Reduced density matrix of subsystem `keep`, tracing out all others.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep) {
    const HilbertDims& dims = rho.dims();
    if (dims.subsystems() < 2) throw DimensionError("partial_trace needs >= 2 subsystems");
    if (keep >= dims.subsystems()) {
        throw DimensionError("partial_trace: subsystem index " + std::to_string(keep) +
                             " out of range for dims " + dims.to_string());
    }
    const std::size_t n = dims.total();
    const std::size_t dk = dims[keep];
    std::vector<std::vector<std::size_t>> digits(n);
    for (std::size_t i = 0; i < n; ++i) digits[i] = dims.digits(i);

    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            bool traced_equal = true;
            for (std::size_t s = 0; s < dims.subsystems() && traced_equal; ++s) {
                if (s != keep && digits[r][s] != digits[c][s]) traced_equal = false;
            }
            if (traced_equal) {
                out(static_cast<Eigen::Index>(digits[r][keep]),
                    static_cast<Eigen::Index>(digits[c][keep])) += rho(r, c);
            }
        }
    }
    // A conditional (non-normalized) state is still Hermitian; rounding is
    // the only source of asymmetry here.
    return {HilbertDims{dk}, std::move(out), 1e-8};
}

inline Complex expectation(const Operator& op, const StateVector& psi) {
    detail::require_same_dims(op.dims(), psi.dims(), "expectation");
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

inline Complex expectation(const Operator& op, const DensityMatrix& rho) {
    detail::require_same_dims(op.dims(), rho.dims(), "expectation");
    return (op.matrix() * rho.matrix()).trace();
}

inline Operator dagger(const Operator& op) { return {op.dims(), op.matrix().adjoint()}; }

/// True iff every entry of A - A† has modulus <= tol.
inline bool is_hermitian(const Operator& op, double tol) {
    return (op.matrix() - op.matrix().adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Single-subsystem building blocks

namespace ops {

inline Operator identity(std::size_t n) { return Operator::identity(HilbertDims{n}); }

/// |row⟩⟨col| on an n-level space.
inline Operator outer(std::size_t n, std::size_t row, std::size_t col) {
    if (row >= n || col >= n) throw DimensionError("outer: level index out of range");
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = 1.0;
    return {HilbertDims{n}, std::move(m)};
}

inline Operator projector(std::size_t n, std::size_t k) { return outer(n, k, k); }

/// Bosonic annihilation operator truncated to `levels` Fock states.
inline Operator destroy(std::size_t levels) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(levels), static_cast<Eigen::Index>(levels));
    for (std::size_t k = 1; k < levels; ++k) {
        m(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) =
            std::sqrt(static_cast<double>(k));
    }
    return {HilbertDims{levels}, std::move(m)};
}

inline Operator create(std::size_t levels) { return dagger(destroy(levels)); }

inline Operator number(std::size_t levels) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(levels), static_cast<Eigen::Index>(levels));
    for (std::size_t k = 0; k < levels; ++k) {
        m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = static_cast<double>(k);
    }
    return {HilbertDims{levels}, std::move(m)};
}

/// |0⟩⟨1| on a two-level system.
inline Operator sigma_minus() { return outer(2, 0, 1); }
inline Operator sigma_plus() { return outer(2, 1, 0); }

}  // namespace ops

/// Embed a single-subsystem operator at position `site` of `dims`.
inline Operator embed(const Operator& local, const HilbertDims& dims, std::size_t site) {
    if (site >= dims.subsystems()) throw DimensionError("embed: site out of range");
    if (local.side() != dims[site]) throw DimensionError("embed: local operator dimension mismatch");
    Operator out = site == 0 ? local : ops::identity(dims[0]);
    for (std::size_t s = 1; s < dims.subsystems(); ++s) {
        out = tensor(out, s == site ? local : ops::identity(dims[s]));
    }
    return out;
}

}  // namespace qstsim
