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

// Joint measurability as a convex feasibility problem.
//
// Unknown: a grid G(j,k) of PSD operators whose row sums reproduce the first
// observable and whose column sums reproduce the second. In optimize-trivial
// mode the targets are lambda*M1(j) + c_j*1 and mu*M2(k) + e_k*1 where the
// scalars c, e range over simplices of mass (1-lambda) and (1-mu).
//
// The solver runs Dykstra's alternating projections between
//   K = (PSD cone)^{m n} x (scaled simplex) x (scaled simplex)
//   L = the affine set of grids with the prescribed marginals.
// Both projections are closed form. The scalar variables are weighted by the
// dimension D so that c_j behaves like the operator c_j*1 in Frobenius norm.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "incompat/hilbert.hpp"
#include "incompat/observables.hpp"

namespace incompat {

enum class Status { Feasible, Infeasible, Undecided };

inline std::string to_string(Status s) {
    switch (s) {
        case Status::Feasible: return "Feasible";
        case Status::Infeasible: return "Infeasible";
        case Status::Undecided: return "Undecided";
    }
    return "Unknown";
}

struct SolverConfig {
    int max_iterations = 20000;
    double residual_tolerance = 1e-7;
    int stall_window = 500;
    /// Decrease of the set gap over one stall window at or below which the gap
    /// counts as stalled.
    double stall_improvement = 1e-10;
    std::uint64_t seed = 0;
    /// Iterations between certificate checks.
    int check_interval = 10;
    /// Iterations between entries of the residual history.
    int history_stride = 100;
    /// Split problems with a common block-diagonal structure (fixed mode only).
    bool split_blocks = true;
};

inline void validate(const SolverConfig& cfg) {
    if (cfg.max_iterations <= 0 || !(cfg.residual_tolerance > 0.0) || cfg.stall_window <= 0 ||
        !(cfg.stall_improvement > 0.0) || cfg.check_interval <= 0 || cfg.history_stride <= 0) {
        throw Error(ErrorKind::InvalidArgument, "solver configuration values must be positive");
    }
}

enum class ProblemMode { FixedMarginals, OptimizeTrivial };

struct FeasibilityProblem {
    Eigen::Index dim = 0;
    ProblemMode mode = ProblemMode::FixedMarginals;
    std::vector<Label> row_labels;
    std::vector<Label> col_labels;
    /// Operator part of the targets: A(j), B(k) in fixed mode; lambda*M1(j),
    /// mu*M2(k) in optimize mode.
    std::vector<ComplexMatrix> row_targets;
    std::vector<ComplexMatrix> col_targets;
    double lambda = 1.0;
    double mu = 1.0;

    double row_noise_mass() const { return mode == ProblemMode::OptimizeTrivial ? 1.0 - lambda : 0.0; }
    double col_noise_mass() const { return mode == ProblemMode::OptimizeTrivial ? 1.0 - mu : 0.0; }

    static FeasibilityProblem fixed(const Povm& a, const Povm& b) {
        if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "observables act on different spaces");
        FeasibilityProblem p;
        p.dim = a.dim();
        p.row_labels = a.labels();
        p.col_labels = b.labels();
        for (const auto& e : a.effects()) p.row_targets.push_back(e.matrix());
        for (const auto& e : b.effects()) p.col_targets.push_back(e.matrix());
        return p;
    }

    static FeasibilityProblem optimize_trivial(const Povm& m1, const Povm& m2, double lambda, double mu) {
        check_weight(lambda);
        check_weight(mu);
        FeasibilityProblem p = fixed(m1, m2);
        p.mode = ProblemMode::OptimizeTrivial;
        p.lambda = lambda;
        p.mu = mu;
        for (auto& t : p.row_targets) t *= lambda;
        for (auto& t : p.col_targets) t *= mu;
        return p;
    }
};

struct FeasibilityReport {
    Status status = Status::Undecided;
    std::optional<JointCandidate> certificate;
    /// Noise distributions found in optimize-trivial mode.
    std::optional<OutcomeDistribution> noise1;
    std::optional<OutcomeDistribution> noise2;
    double final_residual = INFINITY;
    /// Distance between the last cone and affine iterates; in the infeasible
    /// case this approaches the distance between the two sets.
    double gap_estimate = INFINITY;
    int iterations_used = 0;
    std::vector<double> residual_history;
};

/// Euclidean projection onto {x >= 0, sum x = mass}, sorted-threshold method.
inline std::vector<double> project_simplex(const std::vector<double>& v, double mass) {
    std::vector<double> out(v.size(), 0.0);
    if (v.empty()) return out;
    if (mass <= 0.0) return out;
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumulative += u[i];
        const double t = (cumulative - mass) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
    return out;
}

namespace detail {

struct GridPoint {
    std::vector<ComplexMatrix> grid;  // row-major m x n
    std::vector<double> c;            // row noise scalars (empty in fixed mode)
    std::vector<double> e;            // column noise scalars
};

inline double weighted_distance(const GridPoint& a, const GridPoint& b, double dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.grid.size(); ++i) s += (a.grid[i] - b.grid[i]).squaredNorm();
    for (std::size_t i = 0; i < a.c.size(); ++i) s += dim * (a.c[i] - b.c[i]) * (a.c[i] - b.c[i]);
    for (std::size_t i = 0; i < a.e.size(); ++i) s += dim * (a.e[i] - b.e[i]) * (a.e[i] - b.e[i]);
    return std::sqrt(s);
}

inline ComplexMatrix traceless(const ComplexMatrix& x, double& identity_coeff) {
    const Eigen::Index d = x.rows();
    identity_coeff = x.trace().real() / static_cast<double>(d);
    ComplexMatrix out = x;
    out.diagonal().array() -= identity_coeff;
    return out;
}

class DykstraSolver {
public:
    explicit DykstraSolver(const FeasibilityProblem& p)
        : p_(p),
          m_(p.row_targets.size()),
          n_(p.col_targets.size()),
          d_(p.dim),
          row_scalars_(p.row_noise_mass() > 0.0),
          col_scalars_(p.col_noise_mass() > 0.0) {}

    /// Orthogonal projection onto the affine marginal set.
    void project_affine(const GridPoint& h, GridPoint& out) const {
        const double m = static_cast<double>(m_), n = static_cast<double>(n_);
        std::vector<ComplexMatrix> r0(m_), c0(n_);
        std::vector<double> r(m_), c(n_);
        std::vector<ComplexMatrix> col_acc(n_, ComplexMatrix::Zero(d_, d_));
        for (std::size_t j = 0; j < m_; ++j) {
            ComplexMatrix row = p_.row_targets[j];
            for (std::size_t k = 0; k < n_; ++k) {
                const ComplexMatrix& hjk = h.grid[j * n_ + k];
                row -= hjk;
                col_acc[k] += hjk;
            }
            if (row_scalars_) row.diagonal().array() += h.c[j];
            r0[j] = traceless(row, r[j]);
        }
        for (std::size_t k = 0; k < n_; ++k) {
            ComplexMatrix col = p_.col_targets[k] - col_acc[k];
            if (col_scalars_) col.diagonal().array() += h.e[k];
            c0[k] = traceless(col, c[k]);
        }
        ComplexMatrix t0 = ComplexMatrix::Zero(d_, d_);
        for (const auto& x : r0) t0 += x;
        for (const auto& x : c0) t0 += x;
        t0 *= 0.5 / (m * n);

        const double sum_r = std::accumulate(r.begin(), r.end(), 0.0);
        const double sum_c = std::accumulate(c.begin(), c.end(), 0.0);
        std::vector<double> u(m_), v(n_);
        if (row_scalars_ || col_scalars_) {
            const double alpha = n + (row_scalars_ ? 1.0 : 0.0);
            const double beta = m + (col_scalars_ ? 1.0 : 0.0);
            const double det = alpha * beta - m * n;
            const double su = (beta * sum_r - m * sum_c) / det;
            const double sv = (alpha * sum_c - n * sum_r) / det;
            for (std::size_t j = 0; j < m_; ++j) u[j] = (r[j] - sv) / alpha;
            for (std::size_t k = 0; k < n_; ++k) v[k] = (c[k] - su) / beta;
        } else {
            const double total = 0.5 * (sum_r + sum_c);
            for (std::size_t j = 0; j < m_; ++j) u[j] = r[j] / n - total / (m * n);
            for (std::size_t k = 0; k < n_; ++k) v[k] = c[k] / m;
        }
        out.grid.resize(m_ * n_);
        for (std::size_t j = 0; j < m_; ++j) {
            const ComplexMatrix rj = r0[j] / n - t0;
            for (std::size_t k = 0; k < n_; ++k) {
                ComplexMatrix& g = out.grid[j * n_ + k];
                g = h.grid[j * n_ + k] + rj + c0[k] / m;
                g.diagonal().array() += u[j] + v[k];
            }
        }
        out.c.assign(row_scalars_ ? m_ : 0, 0.0);
        out.e.assign(col_scalars_ ? n_ : 0, 0.0);
        // With the weight D on scalars, dL/dc_j = 0 gives c_j = a_j - u_j.
        for (std::size_t j = 0; j < out.c.size(); ++j) out.c[j] = h.c[j] - u[j];
        for (std::size_t k = 0; k < out.e.size(); ++k) out.e[k] = h.e[k] - v[k];
    }

    /// Projection onto the PSD cone product and the noise simplices.
    void project_cone(GridPoint& x) const {
        for (auto& g : x.grid) {
            g = 0.5 * (g + g.adjoint()).eval();
            psd_project_in_place(g);
        }
        if (row_scalars_) x.c = project_simplex(x.c, p_.row_noise_mass());
        if (col_scalars_) x.e = project_simplex(x.e, p_.col_noise_mass());
    }

    /// Largest Frobenius deviation of any row or column sum from its target.
    double marginal_deviation(const GridPoint& x) const {
        double worst = 0.0;
        std::vector<ComplexMatrix> cols(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            cols[k] = -p_.col_targets[k];
            if (col_scalars_) cols[k].diagonal().array() -= x.e[k];
        }
        for (std::size_t j = 0; j < m_; ++j) {
            ComplexMatrix row = -p_.row_targets[j];
            if (row_scalars_) row.diagonal().array() -= x.c[j];
            for (std::size_t k = 0; k < n_; ++k) {
                row += x.grid[j * n_ + k];
                cols[k] += x.grid[j * n_ + k];
            }
            worst = std::max(worst, row.norm());
        }
        for (const auto& c : cols) worst = std::max(worst, c.norm());
        return worst;
    }

    GridPoint initial_point(std::uint64_t seed) const {
        GridPoint x;
        const double dd = static_cast<double>(d_);
        std::vector<ComplexMatrix> a = p_.row_targets, b = p_.col_targets;
        if (row_scalars_) {
            x.c.assign(m_, p_.row_noise_mass() / static_cast<double>(m_));
            for (auto& t : a) t.diagonal().array() += x.c.front();
        }
        if (col_scalars_) {
            x.e.assign(n_, p_.col_noise_mass() / static_cast<double>(n_));
            for (auto& t : b) t.diagonal().array() += x.e.front();
        }
        x.grid.resize(m_ * n_);
        for (std::size_t j = 0; j < m_; ++j) {
            for (std::size_t k = 0; k < n_; ++k) x.grid[j * n_ + k] = a[j] * (b[k].trace().real() / dd);
        }
        if (p_.mode == ProblemMode::OptimizeTrivial) {
            std::mt19937_64 rng(seed);
            const double scale = 1e-3 / static_cast<double>(m_ * n_);
            for (auto& g : x.grid) {
                const ComplexMatrix z = gaussian_matrix(d_, d_, rng);
                g += scale * (z + z.adjoint());
            }
        }
        return x;
    }

    FeasibilityReport run(const SolverConfig& cfg) const {
        validate(cfg);
        FeasibilityReport report;
        const double dd = static_cast<double>(d_);
        GridPoint x = initial_point(cfg.seed);
        project_cone(x);
        GridPoint y, q;
        q.grid.assign(m_ * n_, ComplexMatrix::Zero(d_, d_));
        q.c.assign(x.c.size(), 0.0);
        q.e.assign(x.e.size(), 0.0);

        std::vector<double> gaps;
        gaps.reserve(static_cast<std::size_t>(cfg.max_iterations));
        double best = marginal_deviation(x);
        GridPoint best_x = x;
        auto finish = [&](Status s, int iters) {
            report.status = s;
            report.iterations_used = iters;
            report.final_residual = best;
            if (s == Status::Feasible) {
                report.certificate = to_candidate(best_x);
                if (row_scalars_) report.noise1 = to_distribution(best_x.c, p_.row_labels, p_.row_noise_mass());
                if (col_scalars_) report.noise2 = to_distribution(best_x.e, p_.col_labels, p_.col_noise_mass());
            }
            return report;
        };
        if (best <= cfg.residual_tolerance) return finish(Status::Feasible, 0);

        GridPoint w;
        for (int it = 1; it <= cfg.max_iterations; ++it) {
            project_affine(x, y);
            // w = y + q, x = P_K(w), q = w - x
            w = y;
            for (std::size_t i = 0; i < w.grid.size(); ++i) w.grid[i] += q.grid[i];
            for (std::size_t i = 0; i < w.c.size(); ++i) w.c[i] += q.c[i];
            for (std::size_t i = 0; i < w.e.size(); ++i) w.e[i] += q.e[i];
            x = w;
            project_cone(x);
            for (std::size_t i = 0; i < w.grid.size(); ++i) q.grid[i] = w.grid[i] - x.grid[i];
            for (std::size_t i = 0; i < w.c.size(); ++i) q.c[i] = w.c[i] - x.c[i];
            for (std::size_t i = 0; i < w.e.size(); ++i) q.e[i] = w.e[i] - x.e[i];

            const double gap = weighted_distance(x, y, dd);
            gaps.push_back(gap);
            report.gap_estimate = gap;
            if (it % cfg.history_stride == 0) report.residual_history.push_back(gap);

            if (it % cfg.check_interval == 0 || it == cfg.max_iterations) {
                const double dev = marginal_deviation(x);
                if (dev < best) {
                    best = dev;
                    best_x = x;
                }
                if (best <= cfg.residual_tolerance) return finish(Status::Feasible, it);
            }
            const auto window = static_cast<std::size_t>(cfg.stall_window);
            if (gaps.size() > window && gap > 10.0 * cfg.residual_tolerance) {
                const double earlier = gaps[gaps.size() - 1 - window];
                if (earlier - gap <= cfg.stall_improvement) return finish(Status::Infeasible, it);
            }
        }
        return finish(Status::Undecided, cfg.max_iterations);
    }

private:
    JointCandidate to_candidate(const GridPoint& x) const {
        std::vector<HermitianOperator> grid;
        grid.reserve(x.grid.size());
        for (const auto& g : x.grid) grid.push_back(HermitianOperator::from_trusted(g));
        return {p_.row_labels, p_.col_labels, std::move(grid)};
    }

    static OutcomeDistribution to_distribution(const std::vector<double>& s, const std::vector<Label>& labels,
                                               double mass) {
        std::vector<double> p(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) p[i] = s[i] / mass;
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        for (auto& x : p) x /= total;
        return {labels, p};
    }

    const FeasibilityProblem& p_;
    std::size_t m_, n_;
    Eigen::Index d_;
    bool row_scalars_, col_scalars_;
};

// Connected components of the union of the targets' sparsity patterns. Each
// component is a sorted index set; targets are block diagonal over them.
inline std::vector<std::vector<Eigen::Index>> common_blocks(const FeasibilityProblem& p) {
    const Eigen::Index d = p.dim;
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(d));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    auto scan = [&](const ComplexMatrix& a) {
        const double tiny = 1e-14 * (1.0 + a.norm());
        for (Eigen::Index c = 0; c < d; ++c) {
            for (Eigen::Index r = c + 1; r < d; ++r) {
                if (std::abs(a(r, c)) > tiny) parent[static_cast<std::size_t>(find(r))] = find(c);
            }
        }
    };
    for (const auto& a : p.row_targets) scan(a);
    for (const auto& b : p.col_targets) scan(b);
    std::vector<std::vector<Eigen::Index>> blocks;
    std::vector<Eigen::Index> block_of_root(static_cast<std::size_t>(d), -1);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index root = find(i);
        auto& slot = block_of_root[static_cast<std::size_t>(root)];
        if (slot < 0) {
            slot = static_cast<Eigen::Index>(blocks.size());
            blocks.emplace_back();
        }
        blocks[static_cast<std::size_t>(slot)].push_back(i);
    }
    return blocks;
}

inline ComplexMatrix sub_block(const ComplexMatrix& a, const std::vector<Eigen::Index>& idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    ComplexMatrix out(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) out(r, c) = a(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
    }
    return out;
}

}  // namespace detail

/// Feasibility residual of a candidate grid: the larger of the worst marginal
/// Frobenius deviation and the most negative eigenvalue magnitude. In
/// optimize-trivial mode the noise scalars are taken from `noise1`/`noise2`
/// when given, otherwise inferred from the trace of each marginal defect.
inline double residual(const JointCandidate& g, const FeasibilityProblem& problem,
                       const std::optional<OutcomeDistribution>& noise1 = std::nullopt,
                       const std::optional<OutcomeDistribution>& noise2 = std::nullopt) {
    if (g.rows() != problem.row_targets.size() || g.cols() != problem.col_targets.size() ||
        g.dim() != problem.dim) {
        throw Error(ErrorKind::DimMismatch, "candidate shape does not match problem");
    }
    const double dd = static_cast<double>(problem.dim);
    const auto rows = g.row_sums();
    const auto cols = g.col_sums();
    auto scalars = [&](const std::vector<HermitianOperator>& sums, const std::vector<ComplexMatrix>& targets,
                       double mass, const std::optional<OutcomeDistribution>& given) {
        std::vector<double> s(sums.size(), 0.0);
        if (mass <= 0.0) return s;
        if (given) {
            for (std::size_t i = 0; i < s.size(); ++i) s[i] = mass * (*given)[i];
            return s;
        }
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = (sums[i].matrix() - targets[i]).trace().real() / dd;
        return project_simplex(s, mass);
    };
    const auto c = scalars(rows, problem.row_targets, problem.row_noise_mass(), noise1);
    const auto e = scalars(cols, problem.col_targets, problem.col_noise_mass(), noise2);
    double worst = 0.0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        ComplexMatrix diff = rows[j].matrix() - problem.row_targets[j];
        diff.diagonal().array() -= c[j];
        worst = std::max(worst, diff.norm());
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
        ComplexMatrix diff = cols[k].matrix() - problem.col_targets[k];
        diff.diagonal().array() -= e[k];
        worst = std::max(worst, diff.norm());
    }
    return std::max(worst, g.psd_violation());
}

/// Runs the solver on a problem. Fixed-marginal problems whose targets share a
/// block-diagonal structure are split: the pinching of any joint observable
/// onto the blocks is again a joint observable, so the problem is feasible
/// exactly when every block is.
inline FeasibilityReport solve(const FeasibilityProblem& problem, const SolverConfig& cfg = {}) {
    validate(cfg);
    if (problem.row_targets.empty() || problem.col_targets.empty()) {
        throw Error(ErrorKind::InvalidArgument, "problem needs at least one outcome per side");
    }
    const auto blocks = detail::common_blocks(problem);
    if (!cfg.split_blocks || problem.mode != ProblemMode::FixedMarginals || blocks.size() < 2) {
        return detail::DykstraSolver(problem).run(cfg);
    }
    FeasibilityReport merged;
    merged.status = Status::Feasible;
    merged.final_residual = 0.0;
    merged.gap_estimate = 0.0;
    std::vector<ComplexMatrix> grid(problem.row_targets.size() * problem.col_targets.size(),
                                    ComplexMatrix::Zero(problem.dim, problem.dim));
    for (const auto& idx : blocks) {
        FeasibilityProblem sub;
        sub.dim = static_cast<Eigen::Index>(idx.size());
        sub.row_labels = problem.row_labels;
        sub.col_labels = problem.col_labels;
        for (const auto& a : problem.row_targets) sub.row_targets.push_back(detail::sub_block(a, idx));
        for (const auto& b : problem.col_targets) sub.col_targets.push_back(detail::sub_block(b, idx));
        const FeasibilityReport r = detail::DykstraSolver(sub).run(cfg);
        merged.iterations_used += r.iterations_used;
        merged.final_residual = std::max(merged.final_residual, r.final_residual);
        if (r.gap_estimate >= merged.gap_estimate) {
            merged.gap_estimate = r.gap_estimate;
            merged.residual_history = r.residual_history;
        }
        if (r.status == Status::Infeasible) {
            merged.status = Status::Infeasible;
            merged.certificate.reset();
            return merged;
        }
        if (r.status == Status::Undecided) merged.status = Status::Undecided;
        if (merged.status == Status::Feasible) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const ComplexMatrix& blk = r.certificate->grid()[i].matrix();
                for (std::size_t c = 0; c < idx.size(); ++c) {
                    for (std::size_t rr = 0; rr < idx.size(); ++rr) {
                        grid[i](idx[rr], idx[c]) = blk(static_cast<Eigen::Index>(rr), static_cast<Eigen::Index>(c));
                    }
                }
            }
        }
    }
    if (merged.status == Status::Feasible) {
        std::vector<HermitianOperator> ops;
        ops.reserve(grid.size());
        for (const auto& g : grid) ops.push_back(HermitianOperator::from_trusted(g));
        merged.certificate = JointCandidate(problem.row_labels, problem.col_labels, std::move(ops));
    }
    return merged;
}

/// Decides joint measurability of two POVMs on the same space.
inline FeasibilityReport decide(const Povm& m1, const Povm& m2, const SolverConfig& cfg = {}) {
    return solve(FeasibilityProblem::fixed(m1, m2), cfg);
}

/// Decides whether lambda*M1 + (1-lambda)*T1 and mu*M2 + (1-mu)*T2 are jointly
/// measurable for some trivial observables T1, T2 (optimized jointly with G).
inline FeasibilityReport decide_with_optimal_trivial(const Povm& m1, const Povm& m2, double lambda, double mu,
                                                     const SolverConfig& cfg = {}) {
    return solve(FeasibilityProblem::optimize_trivial(m1, m2, lambda, mu), cfg);
}

inline constexpr double kCommutingTolerance = 1e-10;

/// Exact decision for pairwise commuting effects: G(j,k) = M1(j) M2(k).
inline FeasibilityReport decide_commuting(const Povm& m1, const Povm& m2) {
    if (m1.dim() != m2.dim()) throw Error(ErrorKind::DimMismatch, "observables act on different spaces");
    std::vector<HermitianOperator> grid;
    grid.reserve(m1.size() * m2.size());
    for (const auto& a : m1.outcomes()) {
        for (const auto& b : m2.outcomes()) {
            if (!commutes(a.effect, b.effect, kCommutingTolerance)) {
                throw Error(ErrorKind::NotCommuting, a.label.str() + " vs " + b.label.str());
            }
            grid.push_back(HermitianOperator::from_trusted(a.effect.matrix() * b.effect.matrix()));
        }
    }
    FeasibilityReport report;
    report.status = Status::Feasible;
    report.certificate = JointCandidate(m1.labels(), m2.labels(), std::move(grid));
    report.final_residual = residual(*report.certificate, FeasibilityProblem::fixed(m1, m2));
    report.gap_estimate = 0.0;
    return report;
}

}  // namespace incompat
