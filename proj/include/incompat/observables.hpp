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

// Quantum observables as POVMs: construction, noisy mixtures, the Fourier
// mutually unbiased pair, block direct sums, and explicit joint observables.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "incompat/hilbert.hpp"

namespace incompat {

inline constexpr double kPovmTolerance = 1e-9;
inline constexpr double kDistributionTolerance = 1e-12;
inline constexpr double kOrthonormalTolerance = 1e-10;
inline constexpr int kDirectSumMaxBlock = 40;

/// Outcome label (block, index). Observables without block structure use block 0.
struct Label {
    int block = 0;
    int index = 0;

    friend auto operator<=>(const Label&, const Label&) = default;
    friend bool operator==(const Label&, const Label&) = default;

    std::string str() const { return "(" + std::to_string(block) + "," + std::to_string(index) + ")"; }
};

inline std::vector<Label> flat_labels(int n) {
    std::vector<Label> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out.push_back({0, j});
    return out;
}

inline void check_unique(const std::vector<Label>& labels) {
    std::vector<Label> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorKind::LabelMismatch, "duplicate outcome label");
    }
}

class OutcomeDistribution {
public:
    OutcomeDistribution() = default;
    OutcomeDistribution(std::vector<Label> labels, std::vector<double> probs)
        : labels_(std::move(labels)), probs_(std::move(probs)) {
        if (labels_.size() != probs_.size() || labels_.empty()) {
            throw Error(ErrorKind::InvalidArgument, "distribution needs one probability per label");
        }
        check_unique(labels_);
        double total = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidArgument, "negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > kDistributionTolerance) {
            throw Error(ErrorKind::InvalidArgument, "probabilities sum to " + std::to_string(total));
        }
    }

    static OutcomeDistribution uniform(const std::vector<Label>& labels) {
        return {labels, std::vector<double>(labels.size(), 1.0 / static_cast<double>(labels.size()))};
    }
    static OutcomeDistribution point_mass(const std::vector<Label>& labels, std::size_t at) {
        std::vector<double> p(labels.size(), 0.0);
        p.at(at) = 1.0;
        return {labels, std::move(p)};
    }

    std::size_t size() const { return probs_.size(); }
    const std::vector<Label>& labels() const { return labels_; }
    const std::vector<double>& probs() const { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<Label> labels_;
    std::vector<double> probs_;
};

struct Outcome {
    Label label;
    HermitianOperator effect;
};

/// Finite POVM: PSD effects summing to the identity, uniquely labelled.
class Povm {
public:
    Povm() = default;
    explicit Povm(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
        if (outcomes_.empty()) throw Error(ErrorKind::NotPovm, "a POVM needs at least one outcome");
        dim_ = outcomes_.front().effect.dim();
        std::vector<Label> labels;
        ComplexMatrix total = ComplexMatrix::Zero(dim_, dim_);
        for (const auto& o : outcomes_) {
            if (o.effect.dim() != dim_) throw Error(ErrorKind::DimMismatch, "effects differ in dimension");
            labels.push_back(o.label);
            total += o.effect.matrix();
            const double lo = min_eigenvalue(o.effect);
            if (lo < -kPovmTolerance) {
                throw Error(ErrorKind::NotPovm, "effect " + o.label.str() + " has eigenvalue " + std::to_string(lo));
            }
        }
        check_unique(labels);
        const double dev = (total - ComplexMatrix::Identity(dim_, dim_)).norm();
        if (dev > kPovmTolerance) {
            throw Error(ErrorKind::NotPovm, "effects sum to identity only within " + std::to_string(dev));
        }
    }

    Eigen::Index dim() const { return dim_; }
    std::size_t size() const { return outcomes_.size(); }
    const std::vector<Outcome>& outcomes() const { return outcomes_; }
    const Label& label(std::size_t i) const { return outcomes_[i].label; }
    const HermitianOperator& effect(std::size_t i) const { return outcomes_[i].effect; }

    std::vector<Label> labels() const {
        std::vector<Label> out;
        out.reserve(outcomes_.size());
        for (const auto& o : outcomes_) out.push_back(o.label);
        return out;
    }
    std::vector<HermitianOperator> effects() const {
        std::vector<HermitianOperator> out;
        out.reserve(outcomes_.size());
        for (const auto& o : outcomes_) out.push_back(o.effect);
        return out;
    }
    std::optional<std::size_t> index_of(const Label& l) const {
        for (std::size_t i = 0; i < outcomes_.size(); ++i) {
            if (outcomes_[i].label == l) return i;
        }
        return std::nullopt;
    }

    /// Outcome statistics tr[rho M(j)].
    std::vector<double> probabilities(const HermitianOperator& rho) const {
        std::vector<double> out;
        out.reserve(outcomes_.size());
        for (const auto& o : outcomes_) out.push_back(hs_inner(rho, o.effect));
        return out;
    }

private:
    Eigen::Index dim_ = 0;
    std::vector<Outcome> outcomes_;
};

/// Grid of operators G(j,k) indexed by row (first observable) and column
/// (second observable) outcomes. Stored row-major.
class JointCandidate {
public:
    JointCandidate() = default;
    JointCandidate(std::vector<Label> rows, std::vector<Label> cols, std::vector<HermitianOperator> grid)
        : rows_(std::move(rows)), cols_(std::move(cols)), grid_(std::move(grid)) {
        if (grid_.size() != rows_.size() * cols_.size() || grid_.empty()) {
            throw Error(ErrorKind::DimMismatch, "grid size does not match label counts");
        }
        check_unique(rows_);
        check_unique(cols_);
        dim_ = grid_.front().dim();
        for (const auto& g : grid_) {
            if (g.dim() != dim_) throw Error(ErrorKind::DimMismatch, "grid entries differ in dimension");
        }
    }

    Eigen::Index dim() const { return dim_; }
    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_.size(); }
    const std::vector<Label>& row_labels() const { return rows_; }
    const std::vector<Label>& col_labels() const { return cols_; }
    const std::vector<HermitianOperator>& grid() const { return grid_; }

    const HermitianOperator& at(std::size_t j, std::size_t k) const { return grid_.at(j * cols_.size() + k); }
    const HermitianOperator& at(const Label& j, const Label& k) const {
        const auto rj = std::find(rows_.begin(), rows_.end(), j);
        const auto ck = std::find(cols_.begin(), cols_.end(), k);
        if (rj == rows_.end() || ck == cols_.end()) throw Error(ErrorKind::LabelMismatch, "no such grid entry");
        return at(static_cast<std::size_t>(rj - rows_.begin()), static_cast<std::size_t>(ck - cols_.begin()));
    }

    std::vector<HermitianOperator> row_sums() const {
        std::vector<HermitianOperator> out(rows(), HermitianOperator::zero(dim_));
        for (std::size_t j = 0; j < rows(); ++j) {
            for (std::size_t k = 0; k < cols(); ++k) out[j] += at(j, k);
        }
        return out;
    }
    std::vector<HermitianOperator> col_sums() const {
        std::vector<HermitianOperator> out(cols(), HermitianOperator::zero(dim_));
        for (std::size_t j = 0; j < rows(); ++j) {
            for (std::size_t k = 0; k < cols(); ++k) out[k] += at(j, k);
        }
        return out;
    }

    /// Most negative eigenvalue magnitude over the grid (0 if every entry is PSD).
    double psd_violation() const {
        double worst = 0.0;
        for (const auto& g : grid_) worst = std::max(worst, -min_eigenvalue(g));
        return worst;
    }

private:
    Eigen::Index dim_ = 0;
    std::vector<Label> rows_;
    std::vector<Label> cols_;
    std::vector<HermitianOperator> grid_;
};

inline Povm make_povm(const std::vector<Label>& labels, const std::vector<HermitianOperator>& effects) {
    if (labels.size() != effects.size()) throw Error(ErrorKind::LabelMismatch, "label/effect count differs");
    std::vector<Outcome> out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({labels[i], effects[i]});
    return Povm(std::move(out));
}

inline std::vector<ComplexVector> standard_basis(int d) {
    std::vector<ComplexVector> out;
    for (int j = 0; j < d; ++j) out.push_back(ComplexVector::Unit(d, j));
    return out;
}

/// psi_k = d^{-1/2} sum_j exp(-2 pi i j k / d) phi_j over the standard basis phi_j.
inline std::vector<ComplexVector> fourier_basis(int d) {
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<ComplexVector> out;
    out.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        ComplexVector v(d);
        for (int j = 0; j < d; ++j) {
            const long r = (static_cast<long>(j) * k) % d;
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
            v(j) = norm * Complex(std::cos(angle), std::sin(angle));
        }
        out.push_back(std::move(v));
    }
    return out;
}

/// Projective POVM |v_j><v_j| from an orthonormal family, labels (block, j).
inline Povm projective_from_basis(const std::vector<ComplexVector>& vectors, int block = 0) {
    if (vectors.empty()) throw Error(ErrorKind::NotOrthonormal, "empty basis");
    const Eigen::Index d = vectors.front().size();
    for (std::size_t a = 0; a < vectors.size(); ++a) {
        if (vectors[a].size() != d) throw Error(ErrorKind::DimMismatch, "basis vectors differ in length");
        for (std::size_t b = a; b < vectors.size(); ++b) {
            const Complex ip = vectors[a].dot(vectors[b]);
            const double expected = a == b ? 1.0 : 0.0;
            if (std::abs(ip - expected) > kOrthonormalTolerance) {
                throw Error(ErrorKind::NotOrthonormal, "vectors " + std::to_string(a) + "," + std::to_string(b));
            }
        }
    }
    std::vector<Outcome> out;
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        out.push_back({{block, static_cast<int>(j)}, HermitianOperator::projector(vectors[j])});
    }
    return Povm(std::move(out));
}

enum class Axis { X, Y, Z };

inline ComplexMatrix pauli(Axis a) {
    ComplexMatrix s(2, 2);
    const Complex i(0.0, 1.0);
    switch (a) {
        case Axis::X: s << 0.0, 1.0, 1.0, 0.0; break;
        case Axis::Y: s << 0.0, -i, i, 0.0; break;
        case Axis::Z: s << 1.0, 0.0, 0.0, -1.0; break;
    }
    return s;
}

inline const Label kPlus{0, 1};
inline const Label kMinus{0, -1};

/// Spin-1/2 measurement along an axis: effects (1 +- sigma)/2, labels +1 then -1.
inline Povm qubit_spin(Axis a) {
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix s = pauli(a);
    return Povm({{kPlus, HermitianOperator::from_trusted(0.5 * (id + s))},
                 {kMinus, HermitianOperator::from_trusted(0.5 * (id - s))}});
}

/// Spin measurement along a unit direction in the z-x plane at angle `angle` from z.
inline Povm qubit_spin_zx(double angle) {
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix s = std::cos(angle) * pauli(Axis::Z) + std::sin(angle) * pauli(Axis::X);
    return Povm({{kPlus, HermitianOperator::from_trusted(0.5 * (id + s))},
                 {kMinus, HermitianOperator::from_trusted(0.5 * (id - s))}});
}

/// Trivial observable T(j) = p_j * identity.
inline Povm trivial(const OutcomeDistribution& p, Eigen::Index dim) {
    std::vector<Outcome> out;
    for (std::size_t j = 0; j < p.size(); ++j) {
        out.push_back({p.labels()[j], p[j] * HermitianOperator::identity(dim)});
    }
    return Povm(std::move(out));
}

inline void check_labels_match(const Povm& m, const OutcomeDistribution& p) {
    if (m.labels() != p.labels()) throw Error(ErrorKind::LabelMismatch, "noise labels differ from observable labels");
}

inline void check_weight(double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorKind::LambdaOutOfRange, "weight " + std::to_string(w));
}

/// lambda * M + (1 - lambda) * trivial(p).
inline Povm mix(const Povm& m, double lambda, const OutcomeDistribution& p) {
    check_weight(lambda);
    check_labels_match(m, p);
    const HermitianOperator id = HermitianOperator::identity(m.dim());
    std::vector<Outcome> out;
    for (std::size_t j = 0; j < m.size(); ++j) {
        out.push_back({m.label(j), lambda * m.effect(j) + ((1.0 - lambda) * p[j]) * id});
    }
    return Povm(std::move(out));
}

/// Relabels outcomes positionally; used to align a noise distribution (or a
/// second observable) with an observable's label set.
inline Povm relabel(const Povm& m, const std::vector<Label>& labels) {
    if (labels.size() != m.size()) throw Error(ErrorKind::LabelMismatch, "relabel needs one label per outcome");
    return make_povm(labels, m.effects());
}

inline OutcomeDistribution relabel(const OutcomeDistribution& p, const std::vector<Label>& labels) {
    return {labels, p.probs()};
}

/// G(j,k) = p_k M(j): measure M and independently roll a die for the second outcome.
inline JointCandidate product_joint_trivial(const Povm& m, const OutcomeDistribution& p) {
    std::vector<HermitianOperator> grid;
    grid.reserve(m.size() * p.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        for (std::size_t k = 0; k < p.size(); ++k) grid.push_back(p[k] * m.effect(j));
    }
    return {m.labels(), p.labels(), std::move(grid)};
}

/// G(j,k) = lambda p2(k) M1(j) + (1 - lambda) p1(j) M2(k). Its marginals are
/// lambda M1 + (1-lambda) trivial(p1) and (1-lambda) M2 + lambda trivial(p2).
inline JointCandidate coin_flip_joint(const Povm& m1, const Povm& m2, double lambda, const OutcomeDistribution& p1,
                                      const OutcomeDistribution& p2) {
    check_weight(lambda);
    check_labels_match(m1, p1);
    check_labels_match(m2, p2);
    if (m1.dim() != m2.dim()) throw Error(ErrorKind::DimMismatch, "observables act on different spaces");
    std::vector<HermitianOperator> grid;
    grid.reserve(m1.size() * m2.size());
    for (std::size_t j = 0; j < m1.size(); ++j) {
        for (std::size_t k = 0; k < m2.size(); ++k) {
            grid.push_back((lambda * p2[k]) * m1.effect(j) + ((1.0 - lambda) * p1[j]) * m2.effect(k));
        }
    }
    return {m1.labels(), m2.labels(), std::move(grid)};
}

/// Joint observable for any (lambda, mu) in the triangle lambda + mu <= 1:
/// G(j,k) = lambda p2(k) M1(j) + mu p1(j) M2(k) + (1 - lambda - mu) p1(j) p2(k) 1.
inline JointCandidate triangle_joint(const Povm& m1, const Povm& m2, double lambda, double mu,
                                     const OutcomeDistribution& p1, const OutcomeDistribution& p2) {
    if (!(lambda >= 0.0 && mu >= 0.0 && lambda + mu <= 1.0 + 1e-15)) {
        throw Error(ErrorKind::OutsideTriangle, "lambda + mu must not exceed 1");
    }
    check_labels_match(m1, p1);
    check_labels_match(m2, p2);
    if (m1.dim() != m2.dim()) throw Error(ErrorKind::DimMismatch, "observables act on different spaces");
    const double rest = std::max(0.0, 1.0 - lambda - mu);
    const HermitianOperator id = HermitianOperator::identity(m1.dim());
    std::vector<HermitianOperator> grid;
    grid.reserve(m1.size() * m2.size());
    for (std::size_t j = 0; j < m1.size(); ++j) {
        for (std::size_t k = 0; k < m2.size(); ++k) {
            grid.push_back((lambda * p2[k]) * m1.effect(j) + (mu * p1[j]) * m2.effect(k) +
                           (rest * p1[j] * p2[k]) * id);
        }
    }
    return {m1.labels(), m2.labels(), std::move(grid)};
}

/// Row and column sums of a finalized joint candidate, as POVMs.
inline std::pair<Povm, Povm> marginals(const JointCandidate& g) {
    return {make_povm(g.row_labels(), g.row_sums()), make_povm(g.col_labels(), g.col_sums())};
}

/// Fourier mutually unbiased pair in dimension d: (standard basis, Fourier basis).
inline std::pair<Povm, Povm> mub_pair(int d) {
    return {projective_from_basis(standard_basis(d)), projective_from_basis(fourier_basis(d))};
}

inline int direct_sum_dim(int d_max) { return (d_max * d_max + d_max - 2) / 2; }

/// Block-diagonal Fourier pair on the direct sum of blocks d = 2..d_max, labels (d, j).
inline std::pair<Povm, Povm> direct_sum_mub(int d_max) {
    if (d_max < 2) throw Error(ErrorKind::InvalidArgument, "d_max must be at least 2");
    if (d_max > kDirectSumMaxBlock) {
        throw Error(ErrorKind::InvalidArgument, "d_max is capped at " + std::to_string(kDirectSumMaxBlock));
    }
    const int total = direct_sum_dim(d_max);
    std::vector<Outcome> first, second;
    int offset = 0;
    for (int d = 2; d <= d_max; ++d) {
        const auto fb = fourier_basis(d);
        for (int j = 0; j < d; ++j) {
            ComplexVector phi = ComplexVector::Zero(total);
            phi(offset + j) = 1.0;
            ComplexVector psi = ComplexVector::Zero(total);
            psi.segment(offset, d) = fb[static_cast<std::size_t>(j)];
            first.push_back({{d, j}, HermitianOperator::projector(phi)});
            second.push_back({{d, j}, HermitianOperator::projector(psi)});
        }
        offset += d;
    }
    return {Povm(std::move(first)), Povm(std::move(second))};
}

/// Orthogonal projector onto block d of the direct_sum_mub(d_max) space.
inline HermitianOperator block_projector(int d_max, int d) {
    if (d < 2 || d > d_max) throw Error(ErrorKind::InvalidArgument, "block out of range");
    const int total = direct_sum_dim(d_max);
    const int offset = direct_sum_dim(d - 1) ;
    std::vector<double> diag(static_cast<std::size_t>(total), 0.0);
    for (int j = 0; j < d; ++j) diag[static_cast<std::size_t>(offset + j)] = 1.0;
    return HermitianOperator::diagonal(diag);
}

/// Orthonormal basis (as columns) of the range of a projector, by Gram-Schmidt
/// over its columns. Coordinate projectors yield the coordinate vectors.
inline ComplexMatrix projector_range(const HermitianOperator& p) {
    const ComplexMatrix& m = p.matrix();
    if ((m * m - m).norm() > 1e-10 * (1.0 + m.norm())) throw Error(ErrorKind::NotProjector, "P*P != P");
    std::vector<ComplexVector> basis;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        ComplexVector v = m.col(c);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) v -= b.dot(v) * b;
        }
        const double n = v.norm();
        if (n > 1e-8) basis.push_back(v / n);
    }
    if (basis.empty()) throw Error(ErrorKind::NotProjector, "projector has empty range");
    ComplexMatrix out(m.rows(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = basis[i];
    return out;
}

inline HermitianOperator compress(const HermitianOperator& h, const ComplexMatrix& range) {
    return HermitianOperator::from_trusted(range.adjoint() * h.matrix() * range);
}

/// Compression P M(j) P of every effect, expressed on the range of P.
inline Povm restrict(const Povm& m, const HermitianOperator& p) {
    if (p.dim() != m.dim()) throw Error(ErrorKind::DimMismatch, "projector dimension differs");
    const ComplexMatrix range = projector_range(p);
    std::vector<Outcome> out;
    for (const auto& o : m.outcomes()) out.push_back({o.label, compress(o.effect, range)});
    return Povm(std::move(out));
}

inline JointCandidate restrict(const JointCandidate& g, const HermitianOperator& p) {
    if (p.dim() != g.dim()) throw Error(ErrorKind::DimMismatch, "projector dimension differs");
    const ComplexMatrix range = projector_range(p);
    std::vector<HermitianOperator> grid;
    grid.reserve(g.grid().size());
    for (const auto& e : g.grid()) grid.push_back(compress(e, range));
    return {g.row_labels(), g.col_labels(), std::move(grid)};
}

inline ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix x(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            x(r, c) = Complex(re, im);
        }
    }
    return x;
}

/// Seeded random POVM: effects X_j X_j^dagger for complex Gaussian X_j,
/// normalized as S^{-1/2} E_j S^{-1/2} with S = sum_j E_j.
inline Povm random_povm(int dim, int n_outcomes, std::uint64_t seed) {
    if (dim < 1 || n_outcomes < 1) throw Error(ErrorKind::InvalidArgument, "dim and n_outcomes must be positive");
    std::mt19937_64 rng(seed);
    std::vector<HermitianOperator> raw;
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (int j = 0; j < n_outcomes; ++j) {
        const ComplexMatrix x = gaussian_matrix(dim, dim, rng);
        raw.push_back(HermitianOperator::from_trusted(x * x.adjoint()));
        total += raw.back().matrix();
    }
    const HermitianOperator inv_sqrt =
        spectral_apply(HermitianOperator::from_trusted(total), [](double x) { return 1.0 / std::sqrt(x); });
    std::vector<HermitianOperator> effects;
    for (const auto& e : raw) {
        effects.push_back(HermitianOperator::from_trusted(inv_sqrt.matrix() * e.matrix() * inv_sqrt.matrix()));
    }
    // Absorb the residual normalization drift into the last effect.
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (const auto& e : effects) sum += e.matrix();
    effects.back() = HermitianOperator::from_trusted(effects.back().matrix() + ComplexMatrix::Identity(dim, dim) - sum);
    return make_povm(flat_labels(n_outcomes), effects);
}

}  // namespace incompat
