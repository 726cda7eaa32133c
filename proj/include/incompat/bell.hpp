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

// Binary observables and the CHSH expression
//   B = |<M1 N1> + <M1 N2> + <M2 N1> - <M2 N2>| = |alpha + beta|.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "incompat/hilbert.hpp"
#include "incompat/observables.hpp"

namespace incompat {

/// Two-outcome observable with labels +1 and -1, represented by A = E(+1) - E(-1).
class BinaryObservable {
public:
    explicit BinaryObservable(const Povm& m) : povm_(m) {
        if (m.size() != 2) throw Error(ErrorKind::LabelMismatch, "binary observable needs exactly two outcomes");
        const auto plus = m.index_of(kPlus);
        const auto minus = m.index_of(kMinus);
        if (!plus || !minus) throw Error(ErrorKind::LabelMismatch, "binary observable outcomes must be +1 and -1");
        op_ = m.effect(*plus) - m.effect(*minus);
    }

    const Povm& povm() const { return povm_; }
    const HermitianOperator& op() const { return op_; }
    Eigen::Index dim() const { return povm_.dim(); }

private:
    Povm povm_;
    HermitianOperator op_;
};

/// Density operator on C^{dim_a} (x) C^{dim_b}.
class BipartiteState {
public:
    BipartiteState(Eigen::Index dim_a, Eigen::Index dim_b, HermitianOperator rho)
        : dim_a_(dim_a), dim_b_(dim_b), rho_(std::move(rho)) {
        if (dim_a < 1 || dim_b < 1 || rho_.dim() != dim_a * dim_b) {
            throw Error(ErrorKind::DimMismatch, "state dimension is not dim_a * dim_b");
        }
        if (std::abs(rho_.trace() - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "state trace is not 1");
        if (min_eigenvalue(rho_) < -1e-12) throw Error(ErrorKind::InvalidArgument, "state is not PSD");
    }

    /// (|01> - |10>)/sqrt(2).
    static BipartiteState singlet() {
        ComplexVector psi = ComplexVector::Zero(4);
        psi(1) = 1.0 / std::numbers::sqrt2;
        psi(2) = -1.0 / std::numbers::sqrt2;
        return {2, 2, HermitianOperator::projector(psi)};
    }

    static BipartiteState product(const HermitianOperator& rho_a, const HermitianOperator& rho_b) {
        return {rho_a.dim(), rho_b.dim(), HermitianOperator::from_trusted(kron(rho_a.matrix(), rho_b.matrix()))};
    }

    Eigen::Index dim_a() const { return dim_a_; }
    Eigen::Index dim_b() const { return dim_b_; }
    const HermitianOperator& rho() const { return rho_; }

private:
    Eigen::Index dim_a_, dim_b_;
    HermitianOperator rho_;
};

/// <A (x) B> = tr[rho (A (x) B)].
inline double correlation(const BinaryObservable& a, const BinaryObservable& b, const BipartiteState& rho) {
    if (a.dim() != rho.dim_a() || b.dim() != rho.dim_b()) {
        throw Error(ErrorKind::DimMismatch, "observable dimensions do not match the state factors");
    }
    const ComplexMatrix ab = kron(a.op().matrix(), b.op().matrix());
    return (rho.rho().matrix() * ab).trace().real();
}

struct AlphaBeta {
    double alpha = 0.0;
    double beta = 0.0;
};

/// alpha = <M1 N1> + <M1 N2>, beta = <M2 N1> - <M2 N2>.
inline AlphaBeta alpha_beta(const BinaryObservable& m1, const BinaryObservable& m2, const BinaryObservable& n1,
                            const BinaryObservable& n2, const BipartiteState& rho) {
    return {correlation(m1, n1, rho) + correlation(m1, n2, rho), correlation(m2, n1, rho) - correlation(m2, n2, rho)};
}

inline double chsh_value(const BinaryObservable& m1, const BinaryObservable& m2, const BinaryObservable& n1,
                         const BinaryObservable& n2, const BipartiteState& rho) {
    const AlphaBeta ab = alpha_beta(m1, m2, n1, n2, rho);
    return std::abs(ab.alpha + ab.beta);
}

inline BinaryObservable spin_zx(double angle) { return BinaryObservable(qubit_spin_zx(angle)); }

/// Qubit settings in the z-x plane: Alice at angles a1, a2, Bob at b1, b2
/// (angles measured from +z towards +x).
struct ChshSetting {
    double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
};

/// Tsirelson-optimal settings for the singlet: Bob at +-pi/4, Alice along -z and -x
/// (the singlet anticorrelates, so Alice's axes are flipped to make alpha, beta > 0).
inline ChshSetting optimal_chsh_setting() {
    return {std::numbers::pi, -std::numbers::pi / 2, std::numbers::pi / 4, -std::numbers::pi / 4};
}

inline AlphaBeta alpha_beta(const ChshSetting& s, const BipartiteState& rho = BipartiteState::singlet()) {
    return alpha_beta(spin_zx(s.a1), spin_zx(s.a2), spin_zx(s.b1), spin_zx(s.b2), rho);
}

/// Settings swept to map the attainable (alpha, beta) set on the singlet. The
/// first setting is the optimal one; after that even indices walk the family
/// a1 = pi, a2 = -pi/2, b = +-phi (which reaches (2 cos phi, 2 sin phi)) on a
/// golden-ratio sequence of phi, and odd indices draw all four angles uniformly.
inline std::vector<ChshSetting> sweep_settings(int n_settings, std::uint64_t seed) {
    if (n_settings < 1) throw Error(ErrorKind::InvalidArgument, "n_settings must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    std::vector<ChshSetting> out;
    out.reserve(static_cast<std::size_t>(n_settings));
    out.push_back(optimal_chsh_setting());
    for (int i = 1; i < n_settings; ++i) {
        if (i % 2 == 0) {
            const double frac = std::fmod(golden * static_cast<double>(i / 2), 1.0);
            const double phi = 2.0 * std::numbers::pi * frac;
            out.push_back({std::numbers::pi, -std::numbers::pi / 2, phi, -phi});
        } else {
            const double a1 = angle(rng), a2 = angle(rng), b1 = angle(rng), b2 = angle(rng);
            out.push_back({a1, a2, b1, b2});
        }
    }
    return out;
}

/// (alpha, beta) for every swept setting on the singlet.
inline std::vector<AlphaBeta> disc_sweep(int n_settings, std::uint64_t seed) {
    const BipartiteState singlet = BipartiteState::singlet();
    std::vector<AlphaBeta> out;
    for (const auto& s : sweep_settings(n_settings, seed)) out.push_back(alpha_beta(s, singlet));
    return out;
}

/// Area of the convex hull (monotone chain).
inline double convex_hull_area(std::vector<AlphaBeta> pts) {
    if (pts.size() < 3) return 0.0;
    std::sort(pts.begin(), pts.end(),
              [](const AlphaBeta& p, const AlphaBeta& q) { return p.alpha < q.alpha || (p.alpha == q.alpha && p.beta < q.beta); });
    auto cross = [](const AlphaBeta& o, const AlphaBeta& a, const AlphaBeta& b) {
        return (a.alpha - o.alpha) * (b.beta - o.beta) - (a.beta - o.beta) * (b.alpha - o.alpha);
    };
    std::vector<AlphaBeta> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    double area = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& p = hull[i];
        const auto& q = hull[(i + 1) % hull.size()];
        area += p.alpha * q.beta - q.alpha * p.beta;
    }
    return 0.5 * std::abs(area);
}

/// Hull area of a sweep relative to the disc alpha^2 + beta^2 <= 4.
inline double disc_coverage(const std::vector<AlphaBeta>& pts) {
    return convex_hull_area(pts) / (4.0 * std::numbers::pi);
}

/// max |lambda alpha + mu beta| over the disc alpha^2 + beta^2 <= 4.
inline double max_scaled_chsh(double lambda, double mu) {
    check_weight(lambda);
    check_weight(mu);
    return 2.0 * std::hypot(lambda, mu);
}

/// Numeric counterpart of max_scaled_chsh over a finite point set.
inline double max_scaled_chsh(double lambda, double mu, const std::vector<AlphaBeta>& pts) {
    double best = 0.0;
    for (const auto& p : pts) best = std::max(best, std::abs(lambda * p.alpha + mu * p.beta));
    return best;
}

/// True when uniformly noised binary observables with weights (lambda, mu) can
/// never violate CHSH: lambda^2 + mu^2 <= 1.
inline bool binary_noise_region(double lambda, double mu) {
    check_weight(lambda);
    check_weight(mu);
    return lambda * lambda + mu * mu <= 1.0;
}

/// Random sharp qubit observable along a uniformly drawn Bloch direction.
inline BinaryObservable random_binary_qubit(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double v[3];
    double n = 0.0;
    do {
        for (double& x : v) x = normal(rng);
        n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    } while (n < 1e-12);
    const ComplexMatrix s = (v[0] / n) * pauli(Axis::X) + (v[1] / n) * pauli(Axis::Y) + (v[2] / n) * pauli(Axis::Z);
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    return BinaryObservable(Povm({{kPlus, HermitianOperator::from_trusted(0.5 * (id + s))},
                                  {kMinus, HermitianOperator::from_trusted(0.5 * (id - s))}}));
}

/// Random two-qubit density matrix X X^dagger / tr, X complex Gaussian.
inline BipartiteState random_two_qubit_state(std::mt19937_64& rng) {
    const ComplexMatrix x = gaussian_matrix(4, 4, rng);
    ComplexMatrix rho = x * x.adjoint();
    rho /= rho.trace().real();
    return {2, 2, HermitianOperator::from_trusted(rho)};
}

}  // namespace incompat
