// SPDX-License-Identifier: MIT
//
// Report, ensemble and exceedance-table serialisation.
#pragma once

#include "supbound/bounds.hpp"
#include "supbound/config.hpp"
#include "supbound/errors.hpp"
#include "supbound/simulate.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace supbound {

namespace detail {

// JSON has no infinities; encode them as strings.
inline json number_to_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ConfigError("expected a number, got " + j.dump());
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bound report
// ---------------------------------------------------------------------------

inline json to_json_value(const BoundReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr = {{"u", row.u},
                   {"theta_star", row.theta_star},
                   {"bound", detail::number_to_json(row.bound)},
                   {"log_bound", detail::number_to_json(row.log_bound)},
                   {"vacuous", row.vacuous()}};
        if (row.generic_bound) jr["generic_bound"] = detail::number_to_json(*row.generic_bound);
        rows.push_back(std::move(jr));
    }
    return {{"fingerprint", r.fingerprint},
            {"method", method_name(r.method)},
            {"eps0", r.eps0},
            {"eps0_grid", r.eps0_grid},
            {"eps0_discrepancy", r.eps0_discrepancy},
            {"gamma_upper", r.gamma_upper},
            {"C_Z", r.c_z},
            {"gamma0", detail::number_to_json(r.gamma0)},
            {"theta_star", r.theta_star},
            {"existence_integral", r.existence_integral},
            {"admissibility_integral", r.admissibility_integral},
            {"negative_atoms", r.negative_atoms},
            {"rows", rows}};
}

inline BoundReport bound_report_from_json(const json& j) {
    BoundReport r;
    try {
        r.fingerprint = j.at("fingerprint").get<std::string>();
        r.method = method_from_name(j.at("method").get<std::string>());
        r.eps0 = j.at("eps0").get<double>();
        r.eps0_grid = j.at("eps0_grid").get<double>();
        r.eps0_discrepancy = j.at("eps0_discrepancy").get<bool>();
        r.gamma_upper = j.at("gamma_upper").get<double>();
        r.c_z = j.at("C_Z").get<double>();
        r.gamma0 = detail::number_from_json(j.at("gamma0"));
        r.theta_star = j.at("theta_star").get<double>();
        r.existence_integral = j.at("existence_integral").get<double>();
        r.admissibility_integral = j.at("admissibility_integral").get<double>();
        r.negative_atoms = j.at("negative_atoms").get<bool>();
        for (const auto& jr : j.at("rows")) {
            BoundRow row;
            row.u = jr.at("u").get<double>();
            row.theta_star = jr.at("theta_star").get<double>();
            row.bound = detail::number_from_json(jr.at("bound"));
            row.log_bound = detail::number_from_json(jr.at("log_bound"));
            if (jr.contains("generic_bound")) row.generic_bound = detail::number_from_json(jr.at("generic_bound"));
            r.rows.push_back(row);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report: ") + e.what());
    }
    return r;
}

// Columns: u, theta_star, bound, method.
inline std::string report_csv(const BoundReport& r) {
    std::ostringstream out;
    out << "u,theta_star,bound,method\n";
    for (const auto& row : r.rows) {
        out << detail::fmt_double(row.u) << ',' << detail::fmt_double(row.theta_star) << ','
            << detail::fmt_double(row.bound) << ',' << method_name(r.method) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Ensemble
// ---------------------------------------------------------------------------

inline json to_json_value(const SupEnsemble& e) {
    return {{"fingerprint", e.fingerprint},
            {"seed", e.config.seed},
            {"rng", e.rng},
            {"config",
             {{"grid_t", e.config.grid_t}, {"grid_x", e.config.grid_x}, {"n_paths", e.config.n_paths}}},
            {"sups", e.sups}};
}

inline SupEnsemble ensemble_from_json(const json& j) {
    SupEnsemble e;
    try {
        e.fingerprint = j.at("fingerprint").get<std::string>();
        e.config.seed = j.at("seed").get<std::uint64_t>();
        e.rng = j.at("rng").get<std::string>();
        if (j.contains("config")) {
            const auto& c = j.at("config");
            e.config.grid_t = c.at("grid_t").get<int>();
            e.config.grid_x = c.at("grid_x").get<int>();
            e.config.n_paths = c.at("n_paths").get<int>();
        }
        e.sups = j.at("sups").get<std::vector<double>>();
    } catch (const json::exception& e2) {
        throw ConfigError(std::string("ensemble: ") + e2.what());
    }
    if (e.rng != kRngName) {
        throw ConfigError("ensemble was generated with rng '" + e.rng + "', expected '" + std::string(kRngName) + "'");
    }
    return e;
}

// Columns: u, p_hat, ci_upper, bound, ok.
inline std::string exceedance_csv(const std::vector<DominanceRow>& rows) {
    std::ostringstream out;
    out << "u,p_hat,ci_upper,bound,ok\n";
    for (const auto& r : rows) {
        out << detail::fmt_double(r.u) << ',' << detail::fmt_double(r.p_hat) << ',' << detail::fmt_double(r.ci_upper)
            << ',' << detail::fmt_double(r.bound) << ',' << (r.ok ? "true" : "false") << '\n';
    }
    return out.str();
}

}  // namespace supbound
