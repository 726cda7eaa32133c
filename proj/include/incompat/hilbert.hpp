// Copyright 2026 The incompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra on finite-dimensional Hilbert spaces.
//
// Matrices are Eigen dynamic complex matrices. The Hermitian eigensolver is a
// cyclic complex Jacobi iteration; it is the workhorse behind PSD projection
// and is small enough to audit.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "incompat/error.hpp"

namespace incompat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianRejectTolerance = 1e-8;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiTolerance = 1e-12;

inline ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline bool all_finite(const ComplexMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
        }
    }
    return true;
}

/// Largest entrywise modulus of A - A^dagger.
inline double hermitian_deviation(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Dense Hermitian operator. Construction symmetrizes the input as (H + H^dagger)/2
/// and rejects inputs whose deviation exceeds 1e-8 relative to (1 + ||H||_F).
class HermitianOperator {
public:
    HermitianOperator() = default;

    explicit HermitianOperator(const ComplexMatrix& m) {
        if (m.rows() != m.cols() || m.rows() == 0) {
            throw Error(ErrorKind::DimMismatch, "Hermitian operator must be square and non-empty");
        }
        if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
        const double dev = hermitian_deviation(m);
        if (dev > kHermitianRejectTolerance * (1.0 + m.norm())) {
            throw Error(ErrorKind::NonHermitian, "deviation " + std::to_string(dev));
        }
        m_ = 0.5 * (m + m.adjoint());
    }

    static HermitianOperator identity(Eigen::Index dim) {
        return from_trusted(ComplexMatrix::Identity(dim, dim));
    }
    static HermitianOperator zero(Eigen::Index dim) {
        return from_trusted(ComplexMatrix::Zero(dim, dim));
    }
    /// |v><v|, no normalization applied.
    static HermitianOperator projector(const ComplexVector& v) {
        return from_trusted(v * v.adjoint());
    }
    static HermitianOperator diagonal(const std::vector<double>& d) {
        ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                              static_cast<Eigen::Index>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
        return from_trusted(m);
    }

    /// Wraps a matrix that is Hermitian by construction, symmetrizing without checks.
    static HermitianOperator from_trusted(const ComplexMatrix& m) {
        HermitianOperator h;
        h.m_ = 0.5 * (m + m.adjoint());
        return h;
    }

    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    double norm() const { return m_.norm(); }
    double trace() const { return m_.trace().real(); }

    HermitianOperator operator+(const HermitianOperator& o) const {
        check_same_dim(o);
        return raw(m_ + o.m_);
    }
    HermitianOperator operator-(const HermitianOperator& o) const {
        check_same_dim(o);
        return raw(m_ - o.m_);
    }
    HermitianOperator operator-() const { return raw(-m_); }
    HermitianOperator& operator+=(const HermitianOperator& o) {
        check_same_dim(o);
        m_ += o.m_;
        return *this;
    }
    friend HermitianOperator operator*(double s, const HermitianOperator& h) { return raw(s * h.m_); }
    HermitianOperator operator*(double s) const { return raw(s * m_); }

private:
    static HermitianOperator raw(ComplexMatrix m) {
        HermitianOperator h;
        h.m_ = std::move(m);
        return h;
    }
    void check_same_dim(const HermitianOperator& o) const {
        if (o.dim() != dim()) throw Error(ErrorKind::DimMismatch, "operator dimensions differ");
    }

    ComplexMatrix m_;
};

struct SpectralDecomposition {
    RealVector eigenvalues;      // ascending
    ComplexMatrix eigenvectors;  // columns, unitary
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) s += std::norm(a(i, j));
        }
    }
    return std::sqrt(s);
}

// In-place cyclic Jacobi. On return `a` is diagonal up to the tolerance and
// `v` holds the accumulated unitary, so that a_in = v * diag(a) * v^dagger.
// Returns false if the sweep cap was hit before convergence.
inline bool jacobi_diagonalize(ComplexMatrix& a, ComplexMatrix& v, int max_sweeps = kJacobiMaxSweeps,
                               double tol = kJacobiTolerance) {
    const Eigen::Index n = a.rows();
    v.setIdentity(n, n);
    const double scale = a.norm();
    if (n < 2 || scale == 0.0) return true;
    const double threshold = tol * scale;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= threshold) return true;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double g = std::abs(apq);
                if (g <= 1e-300 || g < 1e-18 * scale) continue;
                const Complex phase = std::conj(apq / g);
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * g);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // W = diag(1, conj(e^{i phi})) * [[c, s], [-s, c]]
                const Complex wpp = c, wpq = s, wqp = -s * phase, wqq = c * phase;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * wpp + akq * wqp;
                    a(k, q) = akp * wpq + akq * wqq;
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * wpp + vkq * wqp;
                    v(k, q) = vkp * wpq + vkq * wqq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(wpp) * apk + std::conj(wqp) * aqk;
                    a(q, k) = std::conj(wpq) * apk + std::conj(wqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    return off_diagonal_norm(a) <= threshold;
}

inline SpectralDecomposition spectral_unchecked(const ComplexMatrix& h) {
    ComplexMatrix a = h;
    ComplexMatrix v;
    if (!jacobi_diagonalize(a, v)) {
        throw Error(ErrorKind::NoConvergence, "Jacobi sweep cap reached");
    }
    const Eigen::Index n = a.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        out.eigenvalues(i) = a(src, src).real();
        out.eigenvectors.col(i) = v.col(src);
    }
    return out;
}

// Clips negative eigenvalues of a Hermitian matrix in place. Returns the
// magnitude of the most negative eigenvalue (0 when already PSD).
inline double psd_project_in_place(ComplexMatrix& h) {
    const Eigen::Index n = h.rows();
    if (n == 1) {
        const double x = h(0, 0).real();
        h(0, 0) = std::max(x, 0.0);
        return std::max(-x, 0.0);
    }
    ComplexMatrix a = h;
    ComplexMatrix v;
    if (!jacobi_diagonalize(a, v)) {
        throw Error(ErrorKind::NoConvergence, "Jacobi sweep cap reached");
    }
    double most_negative = 0.0;
    int n_neg = 0, n_pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = a(i, i).real();
        if (x < 0.0) {
            ++n_neg;
            most_negative = std::max(most_negative, -x);
        } else if (x > 0.0) {
            ++n_pos;
        }
    }
    if (n_neg == 0) return 0.0;
    // Rebuild from whichever side of the spectrum has fewer terms.
    if (n_pos <= n_neg) {
        h.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = a(i, i).real();
            if (x > 0.0) h.noalias() += x * v.col(i) * v.col(i).adjoint();
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = a(i, i).real();
            if (x < 0.0) h.noalias() -= x * v.col(i) * v.col(i).adjoint();
        }
    }
    return most_negative;
}

}  // namespace detail

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
inline SpectralDecomposition spectral(const HermitianOperator& h) {
    return detail::spectral_unchecked(h.matrix());
}

/// Raw-matrix overload; rejects inputs outside the Hermitian invariant.
inline SpectralDecomposition spectral(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw Error(ErrorKind::DimMismatch, "spectral needs a square matrix");
    if (hermitian_deviation(h) > kHermitianTolerance * (1.0 + h.norm())) {
        throw Error(ErrorKind::NonHermitian, "spectral input is not Hermitian");
    }
    return detail::spectral_unchecked(0.5 * (h + h.adjoint()));
}

inline double min_eigenvalue(const HermitianOperator& h) { return spectral(h).eigenvalues(0); }

/// Frobenius-nearest positive semidefinite operator.
inline HermitianOperator psd_project(const HermitianOperator& h) {
    ComplexMatrix m = h.matrix();
    detail::psd_project_in_place(m);
    return HermitianOperator::from_trusted(m);
}

/// Hilbert-Schmidt inner product Re tr[A B]; for a state and an effect this is
/// the outcome probability.
inline double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "hs_inner operands differ in dimension");
    return (a.matrix().cwiseProduct(b.matrix().conjugate())).sum().real();
}

/// Function of a Hermitian operator through its spectrum.
template <typename F>
HermitianOperator spectral_apply(const HermitianOperator& h, F&& f) {
    const SpectralDecomposition sd = spectral(h);
    ComplexMatrix out = ComplexMatrix::Zero(h.dim(), h.dim());
    for (Eigen::Index i = 0; i < h.dim(); ++i) {
        out.noalias() += f(sd.eigenvalues(i)) * sd.eigenvectors.col(i) * sd.eigenvectors.col(i).adjoint();
    }
    return HermitianOperator::from_trusted(out);
}

inline bool commutes(const HermitianOperator& a, const HermitianOperator& b, double tol) {
    return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm() <= tol;
}

}  // namespace incompat
