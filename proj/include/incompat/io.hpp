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

// File formats: POVM documents (JSON with explicit [re, im] pairs), joint
// certificates, and CSV / JSON / SVG exports of traces, scans and sweeps.

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "incompat/bell.hpp"
#include "incompat/feasibility.hpp"
#include "incompat/observables.hpp"
#include "incompat/region.hpp"

namespace incompat::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal form that parses back to the same double.
inline std::string fmt(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json label_to_json(const Label& l) { return json::array({l.block, l.index}); }

inline json povm_to_json(const Povm& m) {
    json outcomes = json::array();
    for (const auto& o : m.outcomes()) {
        outcomes.push_back({{"label", label_to_json(o.label)}, {"matrix", matrix_to_json(o.effect.matrix())}});
    }
    return {{"schema_version", kSchemaVersion}, {"dim", m.dim()}, {"outcomes", outcomes}};
}

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::Parse, where + ": " + what);
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

inline int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

inline double as_double(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

inline Label label_from_json(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) fail(where, "label must be [block, index]");
    return {as_int(v[0], where + "[0]"), as_int(v[1], where + "[1]")};
}

inline ComplexMatrix matrix_from_json(const json& v, int dim, const std::string& where) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim) fail(where, "expected " + std::to_string(dim) + " rows");
    ComplexMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const std::string rw = where + "[" + std::to_string(r) + "]";
        const json& row = v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) fail(rw, "expected " + std::to_string(dim) + " entries");
        for (int c = 0; c < dim; ++c) {
            const std::string cw = rw + "[" + std::to_string(c) + "]";
            const json& e = row[static_cast<std::size_t>(c)];
            if (!e.is_array() || e.size() != 2) fail(cw, "expected an [re, im] pair");
            m(r, c) = Complex(as_double(e[0], cw + "[0]"), as_double(e[1], cw + "[1]"));
        }
    }
    return m;
}

}  // namespace detail

inline Povm povm_from_json(const json& doc) {
    const int version = detail::as_int(detail::field(doc, "schema_version", "$"), "$.schema_version");
    if (version != kSchemaVersion) detail::fail("$.schema_version", "unsupported version " + std::to_string(version));
    const int dim = detail::as_int(detail::field(doc, "dim", "$"), "$.dim");
    if (dim < 1) detail::fail("$.dim", "must be positive");
    const json& outcomes = detail::field(doc, "outcomes", "$");
    if (!outcomes.is_array() || outcomes.empty()) detail::fail("$.outcomes", "expected a non-empty array");
    std::vector<Outcome> out;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const std::string where = "$.outcomes[" + std::to_string(i) + "]";
        const Label label = detail::label_from_json(detail::field(outcomes[i], "label", where), where + ".label");
        const ComplexMatrix m =
            detail::matrix_from_json(detail::field(outcomes[i], "matrix", where), dim, where + ".matrix");
        try {
            out.push_back({label, HermitianOperator(m)});
        } catch (const Error& e) {
            detail::fail(where + ".matrix", e.what());
        }
    }
    try {
        return Povm(std::move(out));
    } catch (const Error& e) {
        detail::fail("$.outcomes", e.what());
    }
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, source + ": " + e.what());
    }
}

inline Povm read_povm(const std::filesystem::path& path) {
    const json doc = parse_json(read_text(path), path.string());
    try {
        return povm_from_json(doc);
    } catch (const Error& e) {
        std::string what = e.what();
        const std::string prefix = std::string(to_string(ErrorKind::Parse)) + ": ";
        if (what.rfind(prefix, 0) == 0) what = what.substr(prefix.size());
        throw Error(ErrorKind::Parse, path.string() + ": " + what);
    }
}

/// Writes via a sibling temporary file and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
        out << content;
        if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::InvalidArgument, "cannot rename onto " + path.string() + ": " + ec.message());
}

inline std::string dump(const json& j) { return j.dump() + "\n"; }

inline json candidate_to_json(const JointCandidate& g) {
    json rows = json::array(), cols = json::array(), grid = json::array();
    for (const auto& l : g.row_labels()) rows.push_back(label_to_json(l));
    for (const auto& l : g.col_labels()) cols.push_back(label_to_json(l));
    for (std::size_t j = 0; j < g.rows(); ++j) {
        json row = json::array();
        for (std::size_t k = 0; k < g.cols(); ++k) row.push_back(matrix_to_json(g.at(j, k).matrix()));
        grid.push_back(std::move(row));
    }
    return {{"schema_version", kSchemaVersion}, {"dim", g.dim()}, {"row_labels", rows}, {"col_labels", cols}, {"grid", grid}};
}

inline json distribution_to_json(const OutcomeDistribution& p) {
    json out = json::array();
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back({{"label", label_to_json(p.labels()[i])}, {"p", p[i]}});
    return out;
}

inline json report_to_json(const FeasibilityReport& r) {
    json j = {{"status", to_string(r.status)},
              {"residual", r.final_residual},
              {"gap", r.gap_estimate},
              {"iterations", r.iterations_used},
              {"residual_history", r.residual_history}};
    if (r.noise1) j["noise1"] = distribution_to_json(*r.noise1);
    if (r.noise2) j["noise2"] = distribution_to_json(*r.noise2);
    return j;
}

// ---- CSV ------------------------------------------------------------------

/// Status column of a traced ray: clipped, boundary or undecided.
inline std::string sample_status(const RegionSample& s) {
    if (s.clipped) return "clipped";
    return s.undecided() ? "undecided" : "boundary";
}

inline std::string region_to_csv(const RegionTrace& t) {
    std::string out = "theta,lambda,mu,status\n";
    for (const auto& s : t.samples) {
        out += fmt(s.theta) + "," + fmt(s.lambda()) + "," + fmt(s.mu()) + "," + sample_status(s) + "\n";
    }
    return out;
}

inline json config_to_json(const SolverConfig& c) {
    return {{"max_iterations", c.max_iterations},
            {"residual_tolerance", c.residual_tolerance},
            {"stall_window", c.stall_window},
            {"stall_improvement", c.stall_improvement},
            {"seed", c.seed}};
}

inline json region_to_json(const RegionTrace& t) {
    json samples = json::array();
    for (const auto& s : t.samples) {
        samples.push_back({{"theta", s.theta},
                           {"radius", s.radius},
                           {"radius_lo", s.radius_lo},
                           {"radius_hi", s.radius_hi},
                           {"lambda", s.lambda()},
                           {"mu", s.mu()},
                           {"status", sample_status(s)},
                           {"status_hi", to_string(s.status_hi)},
                           {"undecided_evaluations", s.undecided_count},
                           {"iterations", s.iterations}});
    }
    return {{"observables", {t.first_name, t.second_name}},
            {"noise", to_string(t.noise)},
            {"solver", config_to_json(t.solver)},
            {"bisection", {{"max_steps", t.bisection.max_steps}, {"tolerance", t.bisection.tolerance}}},
            {"samples", samples}};
}

/// Unit square, the triangle lambda + mu <= 1, and one path for the traced boundary.
inline std::string region_to_svg(const RegionTrace& t, int size = 400) {
    const double pad = 40.0;
    const double s = static_cast<double>(size);
    auto x = [&](double lambda) { return fmt(pad + lambda * s); };
    auto y = [&](double mu) { return fmt(pad + (1.0 - mu) * s); };
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(s + 2 * pad) + "\" height=\"" +
           fmt(s + 2 * pad) + "\" viewBox=\"0 0 " + fmt(s + 2 * pad) + " " + fmt(s + 2 * pad) + "\">\n";
    out += "  <rect x=\"" + x(0) + "\" y=\"" + y(1) + "\" width=\"" + fmt(s) + "\" height=\"" + fmt(s) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "  <polygon points=\"" + x(0) + "," + y(0) + " " + x(1) + "," + y(0) + " " + x(0) + "," + y(1) +
           "\" fill=\"#cfe3f7\" stroke=\"none\"/>\n";
    out += "  <path d=\"M " + x(0) + " " + y(0);
    for (const auto& smp : t.samples) out += " L " + x(smp.lambda()) + " " + y(smp.mu());
    out += " Z\" fill=\"#3b7dc4\" fill-opacity=\"0.35\" stroke=\"#1d4f8a\" stroke-width=\"2\"/>\n";
    out += "  <text x=\"" + x(0.5) + "\" y=\"" + fmt(pad + s + 30) + "\" text-anchor=\"middle\">lambda</text>\n";
    out += "  <text x=\"" + fmt(pad - 25) + "\" y=\"" + y(0.5) + "\" text-anchor=\"middle\">mu</text>\n";
    out += "</svg>\n";
    return out;
}

inline std::string scan_to_csv(const std::vector<ScanRow>& rows) {
    std::string out = "d,theta,radius,lambda,mu,linear_sum,bound,within_bound,status\n";
    for (const auto& r : rows) {
        out += std::to_string(r.d) + "," + fmt(r.sample.theta) + "," + fmt(r.sample.radius) + "," +
               fmt(r.sample.lambda()) + "," + fmt(r.sample.mu()) + "," + fmt(r.linear_sum) + "," + fmt(r.bound) +
               "," + (r.within_bound ? "true" : "false") + "," + sample_status(r.sample) + "\n";
    }
    return out;
}

inline std::string sweep_to_csv(const std::vector<AlphaBeta>& pts) {
    std::string out = "alpha,beta\n";
    for (const auto& p : pts) out += fmt(p.alpha) + "," + fmt(p.beta) + "\n";
    return out;
}

/// Overlay curves for the CHSH picture: the disc of radius 2, the lines
/// alpha + beta = +-2 and +-2 sqrt(2), and the ellipse (alpha/lambda)^2 +
/// (beta/mu)^2 = 4 reached after noising with weights (lambda, mu).
inline std::string chsh_overlay_csv(double lambda, double mu, int n = 256) {
    std::string out = "curve,alpha,beta\n";
    for (int i = 0; i <= n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        out += "disc," + fmt(2.0 * std::cos(t)) + "," + fmt(2.0 * std::sin(t)) + "\n";
    }
    for (int i = 0; i <= n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        out += "scaled," + fmt(2.0 * lambda * std::cos(t)) + "," + fmt(2.0 * mu * std::sin(t)) + "\n";
    }
    const double tsirelson = 2.0 * std::numbers::sqrt2;
    for (double level : {2.0, -2.0}) {
        out += "classical," + fmt(level + 3.0) + "," + fmt(-3.0) + "\n";
        out += "classical," + fmt(level - 3.0) + "," + fmt(3.0) + "\n";
    }
    for (double level : {tsirelson, -tsirelson}) {
        out += "tsirelson," + fmt(level + 3.0) + "," + fmt(-3.0) + "\n";
        out += "tsirelson," + fmt(level - 3.0) + "," + fmt(3.0) + "\n";
    }
    return out;
}

}  // namespace incompat::io
