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

// incompat: command-line front end.
//
//   incompat check  A.json B.json [--lambda x --mu y [--optimize-noise]]
//   incompat region A.json B.json --rays 17 --noise uniform --out svg
//   incompat mub    --dim d | --direct-sum d_max --out prefix
//   incompat bounds --dims 2,4,16 | --epsilons 0.2,0.1
//   incompat chsh   --sweep N --lambda x --mu y --out sweep.csv
//   incompat scan   --dims 2..8 | --direct-sum-max 6
//
// Exit codes: 0 feasible / success, 1 infeasible, 2 undecided, 64 usage or
// malformed input.

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "incompat/incompat.hpp"
#include "incompat/io.hpp"

namespace {

using namespace incompat;
using nlohmann::json;

constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

int exit_code(Status s) {
    switch (s) {
        case Status::Feasible: return 0;
        case Status::Infeasible: return 1;
        case Status::Undecided: return 2;
    }
    return kExitInternal;
}

struct SolverFlags {
    SolverConfig cfg;
    void add(CLI::App* app) {
        app->add_option("--max-iterations", cfg.max_iterations, "Solver iteration cap")->capture_default_str();
        app->add_option("--tolerance", cfg.residual_tolerance, "Certificate residual tolerance")->capture_default_str();
        app->add_option("--stall-window", cfg.stall_window, "Iterations without progress before giving up")
            ->capture_default_str();
        app->add_option("--stall-improvement", cfg.stall_improvement, "Gap decrease per stall window counted as progress")
            ->capture_default_str();
        app->add_option("--seed", cfg.seed, "Seed for solver initialization and sweeps")->capture_default_str();
    }
};

/// "2,4,16" or "2..8" or a mix of both.
std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        const auto dots = tok.find("..");
        try {
            if (dots == std::string::npos) {
                out.push_back(std::stoi(tok));
            } else {
                const int lo = std::stoi(tok.substr(0, dots));
                const int hi = std::stoi(tok.substr(dots + 2));
                if (hi < lo) throw Error(ErrorKind::InvalidArgument, "empty range " + tok);
                for (int d = lo; d <= hi; ++d) out.push_back(d);
            }
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::InvalidArgument, "cannot parse integer list entry '" + tok + "'");
        }
    }
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::InvalidArgument, "cannot parse number '" + tok + "'");
        }
    }
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty list");
    return out;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        io::write_atomic(path, content);
    }
}

// Expands `--config file.json` into flags placed before the user's own, so
// explicit flags win. Keys are long flag names without dashes.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string path;
        std::size_t consumed = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            consumed = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            consumed = 1;
        } else {
            continue;
        }
        const json cfg = io::parse_json(io::read_text(path), path);
        if (!cfg.is_object()) throw Error(ErrorKind::Parse, path + ": config must be a JSON object");
        std::vector<std::string> flags;
        for (const auto& [key, value] : cfg.items()) {
            const std::string flag = "--" + key;
            if (value.is_boolean()) {
                if (value.get<bool>()) flags.push_back(flag);
            } else if (value.is_array()) {
                std::string joined;
                for (const auto& v : value) {
                    if (!joined.empty()) joined += ",";
                    joined += v.is_string() ? v.get<std::string>() : v.dump();
                }
                flags.push_back(flag);
                flags.push_back(joined);
            } else {
                flags.push_back(flag);
                flags.push_back(value.is_string() ? value.get<std::string>() : value.dump());
            }
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + consumed));
        // Insert after the subcommand name so the flags bind to it.
        args.insert(args.begin() + 2, flags.begin(), flags.end());
        break;
    }
    return args;
}

int cmd_check(const std::string& path_a, const std::string& path_b, double lambda, double mu, bool optimize,
              const std::string& certificate_path, bool as_json, const SolverConfig& cfg) {
    const Povm a = io::read_povm(path_a);
    const Povm b = io::read_povm(path_b);
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "observables act on different dimensions");
    FeasibilityReport report;
    if (optimize) {
        report = decide_with_optimal_trivial(a, b, lambda, mu, cfg);
    } else {
        report = decide_point(a, b, lambda, mu, NoiseMode::Uniform, cfg);
    }
    if (as_json) {
        std::cout << io::report_to_json(report).dump(2) << "\n";
    } else {
        std::cout << "status: " << to_string(report.status) << "\n"
                  << "residual: " << report.final_residual << "\n"
                  << "gap: " << report.gap_estimate << "\n"
                  << "iterations: " << report.iterations_used << "\n";
        if (report.noise1) {
            std::cout << "noise1:";
            for (double p : report.noise1->probs()) std::cout << " " << p;
            std::cout << "\nnoise2:";
            for (double p : report.noise2->probs()) std::cout << " " << p;
            std::cout << "\n";
        }
    }
    if (!certificate_path.empty() && report.certificate) {
        io::write_atomic(certificate_path, io::dump(io::candidate_to_json(*report.certificate)));
    }
    return exit_code(report.status);
}

int cmd_region(const std::string& path_a, const std::string& path_b, int rays, const std::string& noise,
               const std::string& format, const std::string& output, const SolverConfig& cfg) {
    const Povm a = io::read_povm(path_a);
    const Povm b = io::read_povm(path_b);
    const NoiseMode mode = noise == "optimize" ? NoiseMode::Optimize : NoiseMode::Uniform;
    RegionTrace trace = trace_region(a, b, rays, mode, cfg);
    trace.first_name = path_a;
    trace.second_name = path_b;
    if (format == "csv") {
        emit(output, io::region_to_csv(trace));
    } else if (format == "json") {
        emit(output, io::dump(io::region_to_json(trace)));
    } else {
        emit(output, io::region_to_svg(trace));
    }
    const double undecided = trace.undecided_fraction();
    if (!output.empty() && output != "-") {
        std::cout << "rays: " << trace.samples.size() << ", undecided: " << undecided * 100.0 << "%\n";
    }
    return undecided > 0.2 ? 2 : 0;
}

int cmd_mub(std::optional<int> dim, std::optional<int> direct_sum, const std::string& prefix) {
    std::pair<Povm, Povm> pair;
    if (dim) {
        if (*dim < 2) throw Error(ErrorKind::InvalidArgument, "--dim must be at least 2");
        if (*dim > 100) throw Error(ErrorKind::InvalidArgument, "--dim is capped at 100");
        pair = mub_pair(*dim);
    } else {
        pair = direct_sum_mub(*direct_sum);
    }
    const auto& [first, second] = pair;
    double worst = 0.0;
    const bool print_table = first.size() <= 8;
    if (print_table) std::cout << "overlaps tr[M1(j) M2(k)]:\n";
    for (std::size_t j = 0; j < first.size(); ++j) {
        for (std::size_t k = 0; k < second.size(); ++k) {
            const double o = hs_inner(first.effect(j), second.effect(k));
            if (first.label(j).block == second.label(k).block) {
                worst = std::max(worst, std::abs(o - 1.0 / std::max(1, dim ? *dim : first.label(j).block)));
            } else {
                worst = std::max(worst, std::abs(o));
            }
            if (print_table) std::cout << (k ? " " : "  ") << std::fixed << std::setprecision(6) << o;
        }
        if (print_table) std::cout << "\n";
    }
    std::cout.unsetf(std::ios::floatfield);
    std::cout << std::setprecision(6) << "dim: " << first.dim() << ", outcomes: " << first.size()
              << ", max unbiasedness deviation: " << worst << "\n";
    if (!prefix.empty()) {
        io::write_atomic(prefix + "_a.json", io::dump(io::povm_to_json(first)));
        io::write_atomic(prefix + "_b.json", io::dump(io::povm_to_json(second)));
        std::cout << "wrote " << prefix << "_a.json and " << prefix << "_b.json\n";
    }
    return 0;
}

int cmd_bounds(const std::string& dims, const std::string& epsilons) {
    if (!dims.empty()) {
        std::cout << "d,bound,excess\n";
        for (int d : parse_int_list(dims)) {
            std::cout << d << "," << io::fmt(mub_linear_bound(d)) << "," << io::fmt(mub_excess(d)) << "\n";
        }
    }
    if (!epsilons.empty()) {
        std::cout << "epsilon,d\n";
        for (double e : parse_double_list(epsilons)) std::cout << io::fmt(e) << "," << dimension_for_epsilon(e) << "\n";
    }
    return 0;
}

int cmd_chsh(int sweep, double lambda, double mu, std::uint64_t seed, const std::string& out,
             const std::string& overlay) {
    const auto pts = disc_sweep(sweep, seed);
    const double numeric = max_scaled_chsh(lambda, mu, pts);
    const double analytic = max_scaled_chsh(lambda, mu);
    double max_norm = 0.0;
    for (const auto& p : pts) max_norm = std::max(max_norm, std::hypot(p.alpha, p.beta));
    std::cout << std::setprecision(6) << "settings: " << pts.size() << "\n"
              << "max |lambda*alpha + mu*beta| (sweep): " << std::fixed << std::setprecision(4) << numeric << "\n"
              << "max |lambda*alpha + mu*beta| (disc):  " << analytic << "\n"
              << "max sqrt(alpha^2 + beta^2): " << max_norm << "\n"
              << "hull coverage of disc: " << disc_coverage(pts) << "\n"
              << "verdict: " << (binary_noise_region(lambda, mu) ? "no-violation" : "violation-possible") << "\n";
    if (!out.empty()) io::write_atomic(out, io::sweep_to_csv(pts));
    if (!overlay.empty()) io::write_atomic(overlay, io::chsh_overlay_csv(lambda, mu));
    return 0;
}

int cmd_scan(const std::string& dims, std::optional<int> direct_sum_max, double theta, const std::string& noise,
             const std::string& out, const SolverConfig& cfg) {
    const NoiseMode mode = noise == "optimize" ? NoiseMode::Optimize : NoiseMode::Uniform;
    std::vector<ScanRow> rows;
    if (direct_sum_max) {
        std::vector<int> ds;
        for (int d = 2; d <= *direct_sum_max; ++d) ds.push_back(d);
        rows = direct_sum_scan(ds, theta, cfg, mode);
    } else {
        rows = dimension_scan(parse_int_list(dims), theta, cfg, mode);
    }
    std::cout << "d      radius    lambda+mu  bound     within\n";
    for (const auto& r : rows) {
        std::cout << std::left << std::setw(6) << r.d << " " << std::fixed << std::setprecision(5) << std::setw(9)
                  << r.sample.radius << " " << std::setw(10) << r.linear_sum << " " << std::setw(9) << r.bound << " "
                  << (r.within_bound ? "yes" : "no") << "\n";
    }
    const BisectionConfig bis;
    std::cout << "non-increasing: " << (non_increasing(rows, bis.tolerance) ? "yes" : "no") << "\n";
    if (!out.empty()) io::write_atomic(out, io::scan_to_csv(rows));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint measurability of noisy quantum observables", "incompat"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    int code = 0;

    auto* check = app.add_subcommand("check", "Decide joint measurability of two POVM documents");
    std::string check_a, check_b, certificate;
    double check_lambda = 1.0, check_mu = 1.0;
    bool check_opt = false, check_json = false;
    SolverFlags check_flags;
    check->add_option("povm_a", check_a, "First POVM document")->required();
    check->add_option("povm_b", check_b, "Second POVM document")->required();
    check->add_option("--lambda", check_lambda, "Weight of the first observable")->capture_default_str();
    check->add_option("--mu", check_mu, "Weight of the second observable")->capture_default_str();
    check->add_flag("--optimize-noise", check_opt, "Optimize the trivial noise instead of using uniform noise");
    check->add_option("--certificate", certificate, "Write the joint observable here when feasible");
    check->add_flag("--json", check_json, "Print the report as JSON");
    check->add_option("--config", "JSON file with flag values");
    check_flags.add(check);

    auto* region = app.add_subcommand("region", "Trace the joint measurability region boundary");
    std::string region_a, region_b, noise = "uniform", format = "csv", output;
    int rays = 17;
    SolverFlags region_flags;
    region->add_option("povm_a", region_a)->required();
    region->add_option("povm_b", region_b)->required();
    region->add_option("--rays", rays, "Number of rays in [0, pi/2]")->capture_default_str();
    region->add_option("--noise", noise)->check(CLI::IsMember({"uniform", "optimize"}))->capture_default_str();
    region->add_option("--out", format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}))->capture_default_str();
    region->add_option("--output", output, "Output file (stdout if omitted)");
    region->add_option("--config", "JSON file with flag values");
    region_flags.add(region);

    auto* mub = app.add_subcommand("mub", "Write the Fourier MUB pair or its truncated direct sum");
    std::optional<int> mub_dim, mub_sum;
    std::string mub_out;
    auto* dim_opt = mub->add_option("--dim", mub_dim, "Dimension of the Fourier pair");
    auto* sum_opt = mub->add_option("--direct-sum", mub_sum, "Largest block of the direct sum");
    dim_opt->excludes(sum_opt);
    mub->add_option("--out", mub_out, "Path prefix for <prefix>_a.json and <prefix>_b.json");
    mub->add_option("--config", "JSON file with flag values");

    auto* bounds = app.add_subcommand("bounds", "Tabulate 1 + (sqrt(d)-1)/(d-1) and its inverse");
    std::string bound_dims, bound_eps;
    bounds->add_option("--dims", bound_dims, "Dimensions, e.g. 2,4,16 or 2..8");
    bounds->add_option("--epsilons", bound_eps, "Epsilons, e.g. 0.2,0.1");
    bounds->add_option("--config", "JSON file with flag values");

    auto* chsh = app.add_subcommand("chsh", "Sweep CHSH settings and evaluate the noisy Bell bound");
    int sweep = 10000;
    double chsh_lambda = 1.0, chsh_mu = 1.0;
    std::uint64_t chsh_seed = 0;
    std::string chsh_out, chsh_overlay;
    chsh->add_option("--sweep", sweep, "Number of settings")->capture_default_str();
    chsh->add_option("--lambda", chsh_lambda)->capture_default_str();
    chsh->add_option("--mu", chsh_mu)->capture_default_str();
    chsh->add_option("--seed", chsh_seed)->capture_default_str();
    chsh->add_option("--out", chsh_out, "CSV file for the (alpha, beta) cloud");
    chsh->add_option("--overlay", chsh_overlay, "CSV file for the disc / line / ellipse overlay");
    chsh->add_option("--config", "JSON file with flag values");

    auto* scan = app.add_subcommand("scan", "Diagonal boundary radius versus dimension");
    std::string scan_dims = "2..8", scan_noise = "uniform", scan_out;
    std::optional<int> scan_sum;
    double theta = std::numbers::pi / 4;
    SolverFlags scan_flags;
    auto* sd = scan->add_option("--dims", scan_dims, "Fourier pair dimensions")->capture_default_str();
    auto* ss = scan->add_option("--direct-sum-max", scan_sum, "Scan direct sums with d_max = 2..N");
    sd->excludes(ss);
    scan->add_option("--theta", theta, "Ray angle")->capture_default_str();
    scan->add_option("--noise", scan_noise)->check(CLI::IsMember({"uniform", "optimize"}))->capture_default_str();
    scan->add_option("--out", scan_out, "CSV output file");
    scan->add_option("--config", "JSON file with flag values");
    scan_flags.add(scan);

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*check) {
            code = cmd_check(check_a, check_b, check_lambda, check_mu, check_opt, certificate, check_json,
                             check_flags.cfg);
        } else if (*region) {
            code = cmd_region(region_a, region_b, rays, noise, format, output, region_flags.cfg);
        } else if (*mub) {
            if (!mub_dim && !mub_sum) throw Error(ErrorKind::InvalidArgument, "pass --dim or --direct-sum");
            code = cmd_mub(mub_dim, mub_sum, mub_out);
        } else if (*bounds) {
            if (bound_dims.empty() && bound_eps.empty()) {
                throw Error(ErrorKind::InvalidArgument, "pass --dims or --epsilons");
            }
            code = cmd_bounds(bound_dims, bound_eps);
        } else if (*chsh) {
            code = cmd_chsh(sweep, chsh_lambda, chsh_mu, chsh_seed, chsh_out, chsh_overlay);
        } else if (*scan) {
            code = cmd_scan(scan_dims, scan_sum, theta, scan_noise, scan_out, scan_flags.cfg);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::NoConvergence ? kExitInternal : kExitUsage;
    }
    return code;
}
