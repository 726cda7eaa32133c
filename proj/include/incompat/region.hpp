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

// Joint measurability regions J(M1, M2) in the (lambda, mu) unit square:
// analytic reference bounds, ray bisection of the boundary, and dimension scans
// over Fourier pairs and their block direct sums.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "incompat/feasibility.hpp"
#include "incompat/observables.hpp"

namespace incompat {

/// The region every pair of observables shares: lambda + mu <= 1 in [0,1]^2.
inline bool triangle_contains(double lambda, double mu) {
    return lambda >= 0.0 && lambda <= 1.0 && mu >= 0.0 && mu <= 1.0 && lambda + mu <= 1.0;
}

/// 1 + (sqrt(d) - 1)/(d - 1): above this value of lambda + mu the noisy Fourier
/// pair in dimension d is incompatible for every choice of trivial noise.
inline double mub_linear_bound(int d) {
    if (d < 2) throw Error(ErrorKind::InvalidArgument, "d must be at least 2");
    const double s = std::sqrt(static_cast<double>(d));
    return 1.0 + (s - 1.0) / (static_cast<double>(d) - 1.0);
}

/// Excess of the bound over 1, in the form 1/(sqrt(d) + 1).
inline double mub_excess(long d) { return 1.0 / (std::sqrt(static_cast<double>(d)) + 1.0); }

/// Smallest d >= 2 with 1/(sqrt(d) + 1) <= eps.
inline long dimension_for_epsilon(double eps) {
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
    const double root = 1.0 / eps - 1.0;
    if (root * root > 1e15) throw Error(ErrorKind::InvalidArgument, "epsilon too small");
    long d = std::max(2L, static_cast<long>(std::ceil(root * root)));
    while (d > 2 && mub_excess(d - 1) <= eps) --d;
    while (mub_excess(d) > eps) ++d;
    return d;
}

enum class NoiseMode { Uniform, Optimize };

inline std::string to_string(NoiseMode m) { return m == NoiseMode::Uniform ? "uniform" : "optimize"; }

/// Membership oracle for a point (lambda, mu) of J(M1, M2).
inline FeasibilityReport decide_point(const Povm& m1, const Povm& m2, double lambda, double mu, NoiseMode mode,
                                      const SolverConfig& cfg) {
    if (mode == NoiseMode::Optimize) return decide_with_optimal_trivial(m1, m2, lambda, mu, cfg);
    return decide(mix(m1, lambda, OutcomeDistribution::uniform(m1.labels())),
                  mix(m2, mu, OutcomeDistribution::uniform(m2.labels())), cfg);
}

struct BisectionConfig {
    int max_steps = 12;
    double tolerance = 5e-3;
};

struct RegionSample {
    double theta = 0.0;
    /// Boundary estimate along (cos theta, sin theta): midpoint of the bracket.
    double radius = 0.0;
    double radius_lo = 0.0;  // last point found Feasible
    double radius_hi = 0.0;  // last point found not Feasible (== clip when clipped)
    Status status_lo = Status::Feasible;
    Status status_hi = Status::Infeasible;
    bool clipped = false;
    int undecided_count = 0;
    int iterations = 0;

    double lambda() const { return radius * std::cos(theta); }
    double mu() const { return radius * std::sin(theta); }
    /// True when the upper bracket rests on an Undecided evaluation.
    bool undecided() const { return !clipped && status_hi == Status::Undecided; }
};

/// Radius at which the ray (cos theta, sin theta) leaves the unit square.
inline double clip_radius(double theta) {
    return 1.0 / std::max(std::cos(theta), std::sin(theta));
}

/// Bisects the boundary of J(M1, M2) along one ray. Undecided evaluations are
/// bracketed as if infeasible and counted, so the radius is an inner estimate.
inline RegionSample ray_bisect(const Povm& m1, const Povm& m2, double theta, NoiseMode mode,
                               const SolverConfig& cfg = {}, const BisectionConfig& bis = {}) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2 + 1e-12)) {
        throw Error(ErrorKind::InvalidArgument, "theta must lie in [0, pi/2]");
    }
    RegionSample s;
    s.theta = theta;
    const double c = std::max(0.0, std::cos(theta)), sn = std::max(0.0, std::sin(theta));
    const double clip = clip_radius(theta);
    auto eval = [&](double r) {
        const FeasibilityReport rep =
            decide_point(m1, m2, std::min(1.0, r * c), std::min(1.0, r * sn), mode, cfg);
        s.iterations += rep.iterations_used;
        if (rep.status == Status::Undecided) ++s.undecided_count;
        return rep.status;
    };
    const Status at_clip = eval(clip);
    if (at_clip == Status::Feasible) {
        s.clipped = true;
        s.radius = s.radius_lo = s.radius_hi = clip;
        s.status_lo = s.status_hi = Status::Feasible;
        return s;
    }
    double lo = 0.0, hi = clip;
    Status hi_status = at_clip;
    for (int step = 0; step < bis.max_steps && hi - lo > bis.tolerance; ++step) {
        const double mid = 0.5 * (lo + hi);
        const Status st = eval(mid);
        if (st == Status::Feasible) {
            lo = mid;
        } else {
            hi = mid;
            hi_status = st;
        }
    }
    s.radius_lo = lo;
    s.radius_hi = hi;
    s.status_hi = hi_status;
    s.radius = 0.5 * (lo + hi);
    return s;
}

struct RegionTrace {
    std::vector<RegionSample> samples;
    SolverConfig solver;
    BisectionConfig bisection;
    NoiseMode noise = NoiseMode::Uniform;
    std::string first_name;
    std::string second_name;

    double undecided_fraction() const {
        if (samples.empty()) return 0.0;
        const auto n = std::count_if(samples.begin(), samples.end(), [](const RegionSample& s) { return s.undecided(); });
        return static_cast<double>(n) / static_cast<double>(samples.size());
    }
};

/// Worker count from INCOMPAT_THREADS, defaulting to 1.
inline int thread_budget() {
    if (const char* env = std::getenv("INCOMPAT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

/// Evaluates f(0..count-1) on up to `threads` workers; results in index order.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int threads, const std::function<T(std::size_t)>& f) {
    std::vector<T> out(count);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, static_cast<std::size_t>(threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::future<void>> futures;
    for (std::size_t w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < count; i += workers) out[i] = f(i);
        }));
    }
    for (auto& fu : futures) fu.get();
    return out;
}

/// Samples the boundary on n_rays equally spaced angles in [0, pi/2]. Ray i
/// uses solver seed cfg.seed + i.
inline RegionTrace trace_region(const Povm& m1, const Povm& m2, int n_rays, NoiseMode mode,
                                const SolverConfig& cfg = {}, const BisectionConfig& bis = {},
                                int threads = thread_budget()) {
    if (n_rays < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 rays");
    RegionTrace trace;
    trace.solver = cfg;
    trace.bisection = bis;
    trace.noise = mode;
    trace.samples = parallel_map<RegionSample>(static_cast<std::size_t>(n_rays), threads, [&](std::size_t i) {
        SolverConfig ray_cfg = cfg;
        ray_cfg.seed = cfg.seed + i;
        const double theta = static_cast<double>(i) / static_cast<double>(n_rays - 1) * (std::numbers::pi / 2);
        return ray_bisect(m1, m2, theta, mode, ray_cfg, bis);
    });
    return trace;
}

struct ScanRow {
    int d = 0;
    RegionSample sample;
    /// lambda + mu at the boundary estimate.
    double linear_sum = 0.0;
    double bound = 0.0;
    bool within_bound = false;
};

inline constexpr double kScanBoundSlack = 2e-2;

inline ScanRow make_scan_row(int d, const RegionSample& s) {
    ScanRow row;
    row.d = d;
    row.sample = s;
    row.linear_sum = s.radius * (std::cos(s.theta) + std::sin(s.theta));
    row.bound = mub_linear_bound(d);
    row.within_bound = row.linear_sum <= row.bound + kScanBoundSlack;
    return row;
}

/// Boundary radius along theta for the Fourier pair in each dimension of d_list.
inline std::vector<ScanRow> dimension_scan(const std::vector<int>& d_list, double theta = std::numbers::pi / 4,
                                           const SolverConfig& cfg = {}, NoiseMode mode = NoiseMode::Uniform,
                                           const BisectionConfig& bis = {}, int threads = thread_budget()) {
    return parallel_map<ScanRow>(d_list.size(), threads, [&](std::size_t i) {
        const int d = d_list[i];
        const auto [a, b] = mub_pair(d);
        return make_scan_row(d, ray_bisect(a, b, theta, mode, cfg, bis));
    });
}

/// Same, for the truncated direct sums direct_sum_mub(d_max); the bound column
/// refers to the largest block.
inline std::vector<ScanRow> direct_sum_scan(const std::vector<int>& d_max_list,
                                            double theta = std::numbers::pi / 4, const SolverConfig& cfg = {},
                                            NoiseMode mode = NoiseMode::Uniform, const BisectionConfig& bis = {},
                                            int threads = thread_budget()) {
    return parallel_map<ScanRow>(d_max_list.size(), threads, [&](std::size_t i) {
        const int d = d_max_list[i];
        const auto [a, b] = direct_sum_mub(d);
        return make_scan_row(d, ray_bisect(a, b, theta, mode, cfg, bis));
    });
}

/// True when radii do not increase by more than `slack` from one row to the next.
inline bool non_increasing(const std::vector<ScanRow>& rows, double slack) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].sample.radius > rows[i - 1].sample.radius + slack) return false;
    }
    return true;
}

}  // namespace incompat
