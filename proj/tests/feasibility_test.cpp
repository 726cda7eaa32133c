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

#include "incompat/feasibility.hpp"

#include <cmath>

#include "gtest/gtest.h"

#include "oracles.hpp"

using namespace incompat;

namespace {

const OutcomeDistribution kUniformPm = OutcomeDistribution::uniform({kPlus, kMinus});

Povm noisy(Axis a, double w) { return mix(qubit_spin(a), w, kUniformPm); }

/// Independent residual: recompute marginals entrywise and eigenvalues with Eigen.
double oracle_residual(const JointCandidate& g, const std::vector<ComplexMatrix>& rows,
                       const std::vector<ComplexMatrix>& cols) {
    double worst = 0.0;
    for (std::size_t j = 0; j < g.rows(); ++j) {
        ComplexMatrix s = -rows[j];
        for (std::size_t k = 0; k < g.cols(); ++k) s += g.at(j, k).matrix();
        worst = std::max(worst, s.norm());
    }
    for (std::size_t k = 0; k < g.cols(); ++k) {
        ComplexMatrix s = -cols[k];
        for (std::size_t j = 0; j < g.rows(); ++j) s += g.at(j, k).matrix();
        worst = std::max(worst, s.norm());
    }
    for (const auto& e : g.grid()) worst = std::max(worst, -oracle::eigenvalues(e.matrix())(0));
    return worst;
}

std::vector<ComplexMatrix> targets(const Povm& m, double w, const std::optional<OutcomeDistribution>& p) {
    std::vector<ComplexMatrix> out;
    for (std::size_t j = 0; j < m.size(); ++j) {
        ComplexMatrix t = w * m.effect(j).matrix();
        if (p) t += (1.0 - w) * (*p)[j] * ComplexMatrix::Identity(m.dim(), m.dim());
        out.push_back(t);
    }
    return out;
}

void expect_sound(const FeasibilityReport& r, const Povm& m1, const Povm& m2, double tol) {
    ASSERT_EQ(r.status, Status::Feasible);
    ASSERT_TRUE(r.certificate.has_value());
    EXPECT_LE(oracle_residual(*r.certificate, targets(m1, 1.0, std::nullopt), targets(m2, 1.0, std::nullopt)), tol);
}

double inner(const detail::GridPoint& a, const detail::GridPoint& b, double dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.grid.size(); ++i) s += (a.grid[i].adjoint() * b.grid[i]).trace().real();
    for (std::size_t i = 0; i < a.c.size(); ++i) s += dim * a.c[i] * b.c[i];
    for (std::size_t i = 0; i < a.e.size(); ++i) s += dim * a.e[i] * b.e[i];
    return s;
}

detail::GridPoint minus(const detail::GridPoint& a, const detail::GridPoint& b) {
    detail::GridPoint out = a;
    for (std::size_t i = 0; i < a.grid.size(); ++i) out.grid[i] -= b.grid[i];
    for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] -= b.c[i];
    for (std::size_t i = 0; i < a.e.size(); ++i) out.e[i] -= b.e[i];
    return out;
}

detail::GridPoint random_point(std::size_t cells, Eigen::Index d, std::size_t nc, std::size_t ne, std::mt19937_64& rng) {
    detail::GridPoint x;
    for (std::size_t i = 0; i < cells; ++i) x.grid.push_back(oracle::random_hermitian(static_cast<int>(d), rng));
    std::normal_distribution<double> n(0.0, 1.0);
    for (std::size_t i = 0; i < nc; ++i) x.c.push_back(n(rng));
    for (std::size_t i = 0; i < ne; ++i) x.e.push_back(n(rng));
    return x;
}

}  // namespace

TEST(feasibility, config_validation) {
    SolverConfig cfg;
    EXPECT_NO_THROW(validate(cfg));
    cfg.residual_tolerance = 0.0;
    EXPECT_THROW(validate(cfg), Error);
    cfg = {};
    cfg.stall_window = 0;
    EXPECT_THROW(validate(cfg), Error);
    cfg = {};
    cfg.max_iterations = -1;
    EXPECT_THROW(validate(cfg), Error);
}

TEST(feasibility, simplex_projection) {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(1 + trial % 7);
        for (auto& x : v) x = n(rng);
        const double mass = 0.1 + 0.01 * (trial % 90);
        const auto p = project_simplex(v, mass);
        double total = 0.0;
        for (double x : p) {
            EXPECT_GE(x, 0.0);
            total += x;
        }
        EXPECT_NEAR(total, mass, 1e-12);
        // Optimality: no random simplex point is closer to v.
        for (int k = 0; k < 20; ++k) {
            std::vector<double> q(v.size());
            double s = 0.0;
            for (auto& x : q) s += (x = std::exponential_distribution<double>(1.0)(rng));
            double dp = 0.0, dq = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                q[i] *= mass / s;
                dp += (p[i] - v[i]) * (p[i] - v[i]);
                dq += (q[i] - v[i]) * (q[i] - v[i]);
            }
            EXPECT_LE(dp, dq + 1e-12);
        }
        const auto again = project_simplex(p, mass);
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(again[i], p[i], 1e-14);
    }
    const auto already = project_simplex({0.2, 0.3}, 0.5);
    EXPECT_NEAR(already[0], 0.2, 1e-15);
    EXPECT_NEAR(already[1], 0.3, 1e-15);
}

TEST(feasibility, affine_projection_is_idempotent_and_orthogonal) {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 12; ++trial) {
        const int dim = 2 + trial % 3;
        const Povm m1 = random_povm(dim, 2 + trial % 2, 40 + static_cast<std::uint64_t>(trial));
        const Povm m2 = random_povm(dim, 3, 60 + static_cast<std::uint64_t>(trial));
        const bool optimize = trial % 2 == 1;
        const FeasibilityProblem problem =
            optimize ? FeasibilityProblem::optimize_trivial(m1, m2, 0.6, 0.3) : FeasibilityProblem::fixed(m1, m2);
        const detail::DykstraSolver solver(problem);
        const std::size_t nc = optimize ? m1.size() : 0, ne = optimize ? m2.size() : 0;
        const double dd = dim;

        const auto h = random_point(m1.size() * m2.size(), dim, nc, ne, rng);
        const auto z0 = random_point(m1.size() * m2.size(), dim, nc, ne, rng);
        detail::GridPoint p, pp, z;
        solver.project_affine(h, p);
        solver.project_affine(p, pp);
        solver.project_affine(z0, z);

        EXPECT_LE(solver.marginal_deviation(p), 1e-12);
        EXPECT_LE(detail::weighted_distance(p, pp, dd), 1e-12);
        // h - P(h) is orthogonal to every direction inside the affine set.
        const double ip = inner(minus(h, p), minus(z, p), dd);
        EXPECT_LE(std::abs(ip), 1e-10 * (1.0 + detail::weighted_distance(h, p, dd) * detail::weighted_distance(z, p, dd)));
    }
}

TEST(feasibility, trivial_partner_is_feasible_with_product_certificate) {
    const Povm m = random_povm(3, 4, 77);
    const auto p = OutcomeDistribution(flat_labels(3), {0.2, 0.5, 0.3});
    const FeasibilityReport r = decide(m, trivial(p, 3));
    expect_sound(r, m, trivial(p, 3), 1e-7);
    const JointCandidate prod = product_joint_trivial(m, p);
    for (std::size_t i = 0; i < prod.grid().size(); ++i) {
        EXPECT_LE((r.certificate->grid()[i].matrix() - prod.grid()[i].matrix()).norm(), 1e-9);
    }
}

TEST(feasibility, spin_x_and_y_without_noise_are_infeasible) {
    const FeasibilityReport r = decide(qubit_spin(Axis::X), qubit_spin(Axis::Y));
    EXPECT_EQ(r.status, Status::Infeasible);
    EXPECT_FALSE(r.certificate.has_value());
    EXPECT_GT(r.gap_estimate, 10.0 * SolverConfig{}.residual_tolerance);
}

TEST(feasibility, noisy_spins_at_0_7_are_feasible) {
    const Povm a = noisy(Axis::X, 0.7), b = noisy(Axis::Y, 0.7);
    expect_sound(decide(a, b), a, b, 1e-7);
}

TEST(feasibility, dimension_mismatch) {
    try {
        decide(qubit_spin(Axis::X), random_povm(3, 2, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
    }
}

TEST(feasibility, residual_examples) {
    const Povm m1 = random_povm(3, 2, 81), m2 = random_povm(3, 3, 82);
    const auto p1 = OutcomeDistribution::uniform(m1.labels());
    const auto p2 = OutcomeDistribution::uniform(m2.labels());
    const JointCandidate g = triangle_joint(m1, m2, 0.3, 0.6, p1, p2);
    const auto [a, b] = marginals(g);
    EXPECT_LE(residual(g, FeasibilityProblem::fixed(a, b)), 1e-12);
    EXPECT_LE(residual(g, FeasibilityProblem::optimize_trivial(m1, m2, 0.3, 0.6), p1, p2), 1e-12);

    std::vector<HermitianOperator> zeros(6, HermitianOperator::zero(3));
    const JointCandidate z(m1.labels(), m2.labels(), zeros);
    double biggest = 0.0;
    for (const auto& e : m1.effects()) biggest = std::max(biggest, e.matrix().norm());
    for (const auto& e : m2.effects()) biggest = std::max(biggest, e.matrix().norm());
    EXPECT_NEAR(residual(z, FeasibilityProblem::fixed(m1, m2)), biggest, 1e-14);
}

TEST(feasibility, gap_history_decreases_on_average) {
    SolverConfig cfg;
    cfg.history_stride = 1;
    cfg.residual_tolerance = 1e-10;
    // A generic instance that needs a couple of hundred iterations.
    const Povm m1 = random_povm(3, 3, 93), m2 = random_povm(3, 3, 94);
    const Povm a = mix(m1, 0.8, OutcomeDistribution::uniform(m1.labels()));
    const Povm b = mix(m2, 0.8, OutcomeDistribution::uniform(m2.labels()));
    const FeasibilityReport r = decide(a, b, cfg);
    ASSERT_EQ(r.status, Status::Feasible);
    const auto& h = r.residual_history;
    const std::size_t window = 10;
    ASSERT_GE(h.size(), 2 * window) << "instance converged too quickly to observe a trend";
    double previous = INFINITY;
    for (std::size_t start = 0; start + window <= h.size(); start += window) {
        double mean = 0.0;
        for (std::size_t i = start; i < start + window; ++i) mean += h[i];
        mean /= window;
        EXPECT_LE(mean, previous * (1.0 + 1e-9));
        previous = mean;
    }
}

TEST(feasibility, qubit_oracle_agreement_15x15) {
    SolverConfig cfg;
    for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 15; ++j) {
            const double lam = i / 14.0, mu = j / 14.0;
            const Povm a = noisy(Axis::X, lam), b = noisy(Axis::Y, mu);
            const FeasibilityReport r = decide(a, b, cfg);
            const double s = lam * lam + mu * mu - 1.0;
            if (std::abs(s) <= 2e-3) {
                EXPECT_NE(r.status, oracle::qubit_compatible(lam, mu) ? Status::Infeasible : Status::Feasible)
                    << lam << "," << mu;
            } else {
                EXPECT_EQ(r.status, oracle::qubit_compatible(lam, mu) ? Status::Feasible : Status::Infeasible)
                    << lam << "," << mu;
            }
            if (r.status == Status::Feasible) { EXPECT_LE(residual(*r.certificate, FeasibilityProblem::fixed(a, b)), 1e-7); }
        }
    }
}

TEST(feasibility, soundness_of_feasible_certificates) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const int dim = 2 + static_cast<int>(seed % 3);
        const Povm m1 = random_povm(dim, 2 + static_cast<int>(seed % 2), 300 + seed);
        const Povm m2 = random_povm(dim, 2 + static_cast<int>(seed % 3), 400 + seed);
        for (double w : {0.3, 0.5}) {
            const auto u1 = OutcomeDistribution::uniform(m1.labels());
            const auto u2 = OutcomeDistribution::uniform(m2.labels());
            const Povm a = mix(m1, w, u1), b = mix(m2, w, u2);
            const FeasibilityReport r = decide(a, b);
            expect_sound(r, a, b, 1e-7);
        }
        const FeasibilityReport o = decide_with_optimal_trivial(m1, m2, 0.45, 0.45);
        ASSERT_EQ(o.status, Status::Feasible);
        ASSERT_TRUE(o.noise1 && o.noise2);
        EXPECT_LE(oracle_residual(*o.certificate, targets(m1, 0.45, o.noise1), targets(m2, 0.45, o.noise2)), 1e-7);
    }
}

TEST(feasibility, transpose_symmetry) {
    const std::vector<std::pair<Povm, Povm>> cases{
        {qubit_spin(Axis::X), qubit_spin(Axis::Z)},
        {noisy(Axis::X, 0.6), noisy(Axis::Z, 0.6)},
        {noisy(Axis::X, 0.8), noisy(Axis::Z, 0.8)},
        mub_pair(3),
        {random_povm(3, 2, 5), random_povm(3, 3, 6)},
    };
    for (const auto& [a, b] : cases) {
        const Status s1 = decide(a, b).status, s2 = decide(b, a).status;
        EXPECT_EQ(s1, s2);
    }
}

TEST(feasibility, restriction_consistency) {
    const auto [n1, n2] = direct_sum_mub(4);
    const auto u1 = OutcomeDistribution::uniform(n1.labels());
    const auto u2 = OutcomeDistribution::uniform(n2.labels());
    const Povm a = mix(n1, 0.5, u1), b = mix(n2, 0.45, u2);
    ASSERT_EQ(decide(a, b).status, Status::Feasible);
    for (int d = 2; d <= 4; ++d) {
        const HermitianOperator p = block_projector(4, d);
        EXPECT_EQ(decide(restrict(a, p), restrict(b, p)).status, Status::Feasible) << "block " << d;
    }
}

TEST(feasibility, optimal_trivial_examples) {
    const auto [a, b] = mub_pair(3);
    EXPECT_EQ(decide_with_optimal_trivial(a, b, 0.0, 0.0).status, Status::Feasible);
    EXPECT_EQ(decide_with_optimal_trivial(a, b, 0.5, 0.5).status, Status::Feasible);
    const double edge = 0.5 * (1.0 + (std::sqrt(3.0) - 1.0) / 2.0) + 0.01;
    EXPECT_EQ(decide_with_optimal_trivial(a, b, edge, edge).status, Status::Infeasible);
    EXPECT_THROW(decide_with_optimal_trivial(a, b, 1.5, 0.0), Error);
}

TEST(feasibility, completeness_below_the_triangle) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Povm m1 = random_povm(3, 3, 1100 + seed), m2 = random_povm(3, 2, 1200 + seed);
        for (int i = 0; i <= 7; ++i) {
            for (int j = 0; i + j <= 7; ++j) {
                const double lam = 0.98 * i / 7.0, mu = 0.98 * j / 7.0;
                EXPECT_EQ(decide_with_optimal_trivial(m1, m2, lam, mu).status, Status::Feasible) << lam << "," << mu;
            }
        }
    }
}

TEST(feasibility, commuting_examples) {
    const Povm z = qubit_spin(Axis::Z);
    const FeasibilityReport r = decide_commuting(z, z);
    ASSERT_EQ(r.status, Status::Feasible);
    for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) {
            const ComplexMatrix want = j == k ? z.effect(j).matrix() : ComplexMatrix::Zero(2, 2);
            EXPECT_LE((r.certificate->at(j, k).matrix() - want).norm(), 1e-15);
        }
    }

    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = 2 + trial % 4;
        auto diag_povm = [&](int n) {
            std::vector<std::vector<double>> w(n, std::vector<double>(dim));
            for (int i = 0; i < dim; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += (w[j][i] = u(rng));
                for (int j = 0; j < n; ++j) w[j][i] /= s;
            }
            std::vector<HermitianOperator> eff;
            for (int j = 0; j < n; ++j) eff.push_back(HermitianOperator::diagonal(w[j]));
            return make_povm(flat_labels(n), eff);
        };
        const Povm a = diag_povm(2), b = diag_povm(3);
        const FeasibilityReport c = decide_commuting(a, b);
        expect_sound(c, a, b, 1e-12);
        EXPECT_EQ(decide(a, b).status, Status::Feasible);
    }

    // Block-diagonal effects with supports in disjoint blocks commute.
    const HermitianOperator p1 = HermitianOperator::diagonal({1, 1, 0, 0});
    const HermitianOperator p2 = HermitianOperator::diagonal({0, 0, 1, 1});
    ComplexMatrix x(4, 4);
    x.setZero();
    x.topLeftCorner(2, 2) = 0.5 * (ComplexMatrix::Identity(2, 2) + pauli(Axis::X));
    const HermitianOperator half = HermitianOperator::from_trusted(x);
    const Povm a = make_povm(flat_labels(3), {half, p1 - half, p2});
    ComplexMatrix y(4, 4);
    y.setZero();
    y.bottomRightCorner(2, 2) = 0.5 * (ComplexMatrix::Identity(2, 2) + pauli(Axis::Y));
    const HermitianOperator low = HermitianOperator::from_trusted(y);
    const Povm b = make_povm(flat_labels(3), {p1, low, p2 - low});
    expect_sound(decide_commuting(a, b), a, b, 1e-12);

    try {
        decide_commuting(qubit_spin(Axis::X), z);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotCommuting);
    }
}
