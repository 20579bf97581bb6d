// SPDX-License-Identifier: MIT
//
// JSON run configuration. Every component block validates through the
// constructors of the corresponding library types.
#pragma once

#include "supbound/admissible.hpp"
#include "supbound/bounds.hpp"
#include "supbound/errors.hpp"
#include "supbound/nfunc.hpp"
#include "supbound/simulate.hpp"
#include "supbound/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace supbound {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Component blocks
// ---------------------------------------------------------------------------

inline json to_json_value(const NFunction& f) {
    switch (f.family()) {
        case NFunction::Family::PowerAlpha: return {{"family", "power_alpha"}, {"alpha", f.alpha()}};
        case NFunction::Family::PiecewisePower: return {{"family", "piecewise_power"}, {"alpha", f.alpha()}};
        case NFunction::Family::ExpAbs: return {{"family", "exp_abs"}};
        case NFunction::Family::GaussianHalfSquare: return {{"family", "gaussian"}};
    }
    return {};
}

namespace detail {

inline double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(where + ": missing numeric field '" + key + "'");
    }
    return j.at(key).get<double>();
}

inline std::string require_string(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
        throw ConfigError(where + ": missing string field '" + key + "'");
    }
    return j.at(key).get<std::string>();
}

// Library constructors throw DomainError on bad parameters; in a config that
// is a configuration error.
template <class F>
auto as_config(const std::string& where, F&& make) {
    try {
        return make();
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace detail

inline NFunction nfunction_from_json(const json& j) {
    const auto family = detail::require_string(j, "family", "phi");
    return detail::as_config("phi", [&] {
        if (family == "power_alpha") return NFunction::power_alpha(detail::require_number(j, "alpha", "phi"));
        if (family == "piecewise_power") return NFunction::piecewise_power(detail::require_number(j, "alpha", "phi"));
        if (family == "exp_abs") return NFunction::exp_abs();
        if (family == "gaussian") return NFunction::gaussian();
        throw ConfigError("phi: unknown family '" + family + "'");
    });
}

inline json to_json_value(const AdmissibleFn& z) {
    if (z.family() == AdmissibleFn::Family::Power) return {{"family", "power"}, {"rho", z.param()}};
    return {{"family", "log_power"}, {"alpha", z.param()}};
}

inline AdmissibleFn admissible_from_json(const json& j) {
    const auto family = detail::require_string(j, "family", "Z");
    return detail::as_config("Z", [&] {
        if (family == "power") return AdmissibleFn::power(detail::require_number(j, "rho", "Z"));
        if (family == "log_power") return AdmissibleFn::log_power(detail::require_number(j, "alpha", "Z"));
        throw ConfigError("Z: unknown family '" + family + "'");
    });
}

inline json to_json_value(const RFunction& r) {
    if (r.family() == RFunction::Family::Log) return {{"family", "log"}};
    return {{"family", "power_minus_one"}, {"beta", r.beta()}};
}

inline RFunction rfunction_from_json(const json& j) {
    const auto family = detail::require_string(j, "family", "r");
    return detail::as_config("r", [&] {
        if (family == "log") return RFunction::log();
        if (family == "power_minus_one") return RFunction::power_minus_one(detail::require_number(j, "beta", "r"));
        throw ConfigError("r: unknown family '" + family + "'");
    });
}

// ---------------------------------------------------------------------------
// Spectral measure sources
// ---------------------------------------------------------------------------

struct InlineMeasure {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> cov;
    friend bool operator==(const InlineMeasure&, const InlineMeasure&) = default;
};

/// Midpoint discretisation of a spectral density on [lo, hi] with n atoms.
/// Atom weights are w_i = f(l_i) dl; "product" coupling sets G_ij = w_i w_j,
/// "diagonal" sets G_ii = w_i (orthogonal increments).
struct MeasureGrid {
    double lo = 0.0;
    double hi = 1.0;
    int n = 8;
    std::string density = "gaussian";  // gaussian | uniform | exponential | cauchy
    double scale = 1.0;
    std::string coupling = "product";  // product | diagonal
    friend bool operator==(const MeasureGrid&, const MeasureGrid&) = default;
};

using MeasureSource = std::variant<std::string, InlineMeasure, MeasureGrid>;

inline SpectralMeasure measure_from_inline(const InlineMeasure& im) {
    const std::size_t n = im.lambdas.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    if (im.cov.size() != n) throw ConfigError("measure: cov must have one row per atom");
    for (const auto& row : im.cov) {
        if (row.size() != n) throw ConfigError("measure: cov rows must have one entry per atom");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return SpectralMeasure(im.lambdas, std::move(flat));
}

inline InlineMeasure inline_measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("lambdas") || !j.contains("cov")) {
        throw ConfigError("measure: expected an object with \"lambdas\" and \"cov\"");
    }
    InlineMeasure im;
    try {
        im.lambdas = j.at("lambdas").get<std::vector<double>>();
        im.cov = j.at("cov").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("measure: ") + e.what());
    }
    return im;
}

inline json to_json_value(const InlineMeasure& im) { return {{"lambdas", im.lambdas}, {"cov", im.cov}}; }

inline InlineMeasure to_inline(const SpectralMeasure& m) {
    InlineMeasure im;
    im.lambdas = m.lambdas();
    for (std::size_t i = 0; i < m.size(); ++i) {
        im.cov.emplace_back(m.cov().begin() + static_cast<std::ptrdiff_t>(i * m.size()),
                            m.cov().begin() + static_cast<std::ptrdiff_t>((i + 1) * m.size()));
    }
    return im;
}

inline SpectralMeasure measure_from_grid(const MeasureGrid& g) {
    if (!(g.hi > g.lo) || g.n < 1 || !(g.scale > 0.0)) {
        throw ConfigError("measure grid: need hi > lo, n >= 1, scale > 0");
    }
    auto density = [&](double l) {
        const double s = l / g.scale;
        if (g.density == "gaussian") return std::exp(-0.5 * s * s);
        if (g.density == "uniform") return 1.0;
        if (g.density == "exponential") return std::exp(-std::abs(s));
        if (g.density == "cauchy") return 1.0 / (1.0 + s * s);
        throw ConfigError("measure grid: unknown density '" + g.density + "'");
    };
    if (g.coupling != "product" && g.coupling != "diagonal") {
        throw ConfigError("measure grid: coupling must be 'product' or 'diagonal'");
    }
    const double dl = (g.hi - g.lo) / g.n;
    std::vector<double> lambdas(g.n), w(g.n);
    for (int i = 0; i < g.n; ++i) {
        lambdas[i] = g.lo + (i + 0.5) * dl;
        w[i] = density(lambdas[i]) * dl;
    }
    std::vector<double> cov(static_cast<std::size_t>(g.n) * g.n, 0.0);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            if (g.coupling == "product") {
                cov[i * g.n + j] = w[i] * w[j];
            } else if (i == j) {
                cov[i * g.n + j] = w[i];
            }
        }
    }
    return SpectralMeasure(std::move(lambdas), std::move(cov));
}

inline SpectralMeasure load_measure_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open measure file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("measure file " + path.string() + ": " + e.what());
    }
    return measure_from_inline(inline_measure_from_json(j));
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    NFunction phi = NFunction::gaussian();
    AdmissibleFn z = AdmissibleFn::power(1.0);
    RFunction r = RFunction::log();
    MeasureSource measure = InlineMeasure{};
    ProblemSpec problem;
    std::vector<double> u_grid;
    std::optional<SimulationConfig> sim;
    std::string output_dir = "out";
    std::string method = "auto";  // auto | generic | closed
    std::string eps0 = "gamma";   // gamma | grid
    double cz_scale = 1.0;        // multiplies C_Z in the sigma oracle (negative controls)

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline MethodRequest method_request(const std::string& s) {
    if (s == "auto") return MethodRequest::Auto;
    if (s == "generic") return MethodRequest::Generic;
    if (s == "closed") return MethodRequest::Closed;
    throw ConfigError("method must be one of auto, generic, closed; got '" + s + "'");
}

inline json to_json_value(const RunConfig& c) {
    json j;
    j["phi"] = to_json_value(c.phi);
    j["Z"] = to_json_value(c.z);
    j["r"] = to_json_value(c.r);
    if (const auto* path = std::get_if<std::string>(&c.measure)) {
        j["measure"] = *path;
    } else if (const auto* im = std::get_if<InlineMeasure>(&c.measure)) {
        j["measure"] = to_json_value(*im);
    } else {
        const auto& g = std::get<MeasureGrid>(c.measure);
        j["measure"] = {{"grid",
                         {{"lo", g.lo},
                          {"hi", g.hi},
                          {"n", g.n},
                          {"density", g.density},
                          {"scale", g.scale},
                          {"coupling", g.coupling}}}};
    }
    const auto& p = c.problem;
    j["problem"] = {{"coeffs", p.coeffs},
                    {"rect", {p.rect.a, p.rect.b, p.rect.c, p.rect.d}},
                    {"kappa", p.kernel == Kernel::Cos ? "cos" : "sin"},
                    {"C_y", p.c_y},
                    {"gaussian", p.gaussian}};
    j["u_grid"] = c.u_grid;
    if (c.sim) {
        j["sim"] = {{"grid_t", c.sim->grid_t},
                    {"grid_x", c.sim->grid_x},
                    {"n_paths", c.sim->n_paths},
                    {"seed", c.sim->seed}};
    }
    j["output_dir"] = c.output_dir;
    j["method"] = c.method;
    j["eps0"] = c.eps0;
    if (c.cz_scale != 1.0) j["verify"] = {{"cz_scale", c.cz_scale}};
    return j;
}

inline RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    for (const char* key : {"phi", "Z", "measure", "problem", "u_grid"}) {
        if (!j.contains(key)) throw ConfigError(std::string("config: missing section '") + key + "'");
    }
    c.phi = nfunction_from_json(j.at("phi"));
    c.z = admissible_from_json(j.at("Z"));
    if (j.contains("r")) c.r = rfunction_from_json(j.at("r"));

    const auto& m = j.at("measure");
    if (m.is_string()) {
        c.measure = m.get<std::string>();
    } else if (m.is_object() && m.contains("grid")) {
        const auto& g = m.at("grid");
        MeasureGrid grid;
        grid.lo = detail::require_number(g, "lo", "measure.grid");
        grid.hi = detail::require_number(g, "hi", "measure.grid");
        grid.n = static_cast<int>(detail::require_number(g, "n", "measure.grid"));
        grid.density = g.value("density", grid.density);
        grid.scale = g.value("scale", grid.scale);
        grid.coupling = g.value("coupling", grid.coupling);
        c.measure = grid;
    } else {
        c.measure = inline_measure_from_json(m);
    }

    const auto& p = j.at("problem");
    try {
        c.problem.coeffs = p.at("coeffs").get<std::vector<double>>();
        const auto rect = p.at("rect").get<std::vector<double>>();
        if (rect.size() != 4) throw ConfigError("problem.rect must be [a, b, c, d]");
        c.problem.rect = {rect[0], rect[1], rect[2], rect[3]};
        const auto kappa = p.value("kappa", std::string("cos"));
        if (kappa != "cos" && kappa != "sin") throw ConfigError("problem.kappa must be 'cos' or 'sin'");
        c.problem.kernel = kappa == "cos" ? Kernel::Cos : Kernel::Sin;
        c.problem.gaussian = p.value("gaussian", false);
        c.problem.c_y = p.value("C_y", 1.0);
        c.u_grid = j.at("u_grid").get<std::vector<double>>();
        if (j.contains("sim")) {
            const auto& s = j.at("sim");
            SimulationConfig sim;
            sim.grid_t = s.value("grid_t", sim.grid_t);
            sim.grid_x = s.value("grid_x", sim.grid_x);
            sim.n_paths = s.value("n_paths", sim.n_paths);
            sim.seed = s.value("seed", sim.seed);
            sim.validate();
            c.sim = sim;
        }
        c.output_dir = j.value("output_dir", c.output_dir);
        c.method = j.value("method", c.method);
        c.eps0 = j.value("eps0", c.eps0);
        if (j.contains("verify")) c.cz_scale = j.at("verify").value("cz_scale", 1.0);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.problem.validate();
    (void)method_request(c.method);
    if (c.eps0 != "gamma" && c.eps0 != "grid") throw ConfigError("eps0 must be 'gamma' or 'grid'");
    if (c.u_grid.empty()) throw ConfigError("u_grid must not be empty");
    for (std::size_t i = 0; i < c.u_grid.size(); ++i) {
        if (!(c.u_grid[i] > 0.0)) throw ConfigError("u_grid entries must be positive");
        if (i > 0 && !(c.u_grid[i] > c.u_grid[i - 1])) throw ConfigError("u_grid must be strictly increasing");
    }
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

// Relative measure paths resolve against `base_dir` (the config's directory).
inline SpectralMeasure resolve_measure(const RunConfig& c, const std::filesystem::path& base_dir = {}) {
    if (const auto* path = std::get_if<std::string>(&c.measure)) {
        std::filesystem::path p(*path);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return load_measure_file(p);
    }
    if (const auto* im = std::get_if<InlineMeasure>(&c.measure)) return measure_from_inline(*im);
    return measure_from_grid(std::get<MeasureGrid>(c.measure));
}

}  // namespace supbound
