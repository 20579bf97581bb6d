// SPDX-License-Identifier: MIT
#include "supbound/commands.hpp"

#include "supbound/io.hpp"
#include "supbound/simulate.hpp"
#include "supbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace supbound {

void apply_overrides(RunConfig& cfg, const CommandOptions& opts) {
    if (opts.method) {
        (void)method_request(*opts.method);
        cfg.method = *opts.method;
    }
    if (opts.seed) {
        if (!cfg.sim) cfg.sim = SimulationConfig{};
        cfg.sim->seed = *opts.seed;
    }
    if (opts.out_dir) cfg.output_dir = *opts.out_dir;
}


BoundReport compute_report(const RunConfig& cfg, const SpectralMeasure& m) {
    BoundRequest req;
    req.phi = cfg.phi;
    req.z = cfg.z;
    req.r = cfg.r;
    req.u_grid = cfg.u_grid;
    req.method = method_request(cfg.method);
    req.eps0_mode = cfg.eps0 == "grid" ? Eps0Mode::Grid : Eps0Mode::GammaUpper;
    return build_report(m, cfg.problem, req);
}

const SimulationConfig& require_sim(const RunConfig& cfg) {
    if (!cfg.sim) throw ConfigError("config has no 'sim' section");
    return *cfg.sim;
}

void print_report(std::ostream& out, const BoundReport& r) {
    out << "method " << method_name(r.method) << "  eps0 " << r.eps0 << "  C_Z " << r.c_z << "  gamma0 " << r.gamma0
        << '\n';
    if (r.eps0_discrepancy) {
        out << "note: grid eps0 " << r.eps0_grid << " differs from the upper bound " << r.gamma_upper
            << " by more than 10%\n";
    }
    if (r.negative_atoms) out << "note: measure has negative atoms\n";
    const bool both = !r.rows.empty() && r.rows.front().generic_bound.has_value();
    out << std::setw(10) << "u" << std::setw(12) << "theta*" << std::setw(16) << "bound";
    if (both) out << std::setw(16) << "generic";
    out << '\n';
    for (const auto& row : r.rows) {
        out << std::setw(10) << row.u << std::setw(12) << row.theta_star << std::setw(16) << row.bound;
        if (both) out << std::setw(16) << *row.generic_bound;
        if (row.vacuous()) out << "  vacuous";
        out << '\n';
    }
}

int cmd_bound(const Session& s) {
    const auto m = resolve_measure(s.cfg, s.base_dir);
    const auto report = compute_report(s.cfg, m);
    detail::write_text(s.output_path("report.json"), to_json_value(report).dump(2) + "\n");
    detail::write_text(s.output_path("report.csv"), report_csv(report));
    print_report(s.out, report);
    return kExitOk;
}

double sample_quantile(std::vector<double> v, double q) {
    if (v.empty()) throw DomainError("sample_quantile: empty sample");
    std::sort(v.begin(), v.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

std::string ensemble_file_text(const SupEnsemble& e) { return to_json_value(e).dump() + "\n"; }

int cmd_simulate(const Session& s) {
    const auto& sim = require_sim(s.cfg);
    const auto m = resolve_measure(s.cfg, s.base_dir);
    const auto ens = sample_paths(m, s.cfg.problem, sim);
    detail::write_text(s.output_path("ensemble.json"), ensemble_file_text(ens));
    s.out << "paths " << ens.sups.size() << "  grid " << sim.grid_t << 'x' << sim.grid_x << "  seed " << sim.seed
          << '\n';
    s.out << "sup quantiles: 50% " << sample_quantile(ens.sups, 0.5) << "  90% " << sample_quantile(ens.sups, 0.9)
          << "  99% " << sample_quantile(ens.sups, 0.99) << '\n';
    return kExitOk;
}

SupEnsemble obtain_ensemble(const Session& s, const SpectralMeasure& m) {
    const auto& sim = require_sim(s.cfg);
    const auto path = s.output_path("ensemble.json");
    if (std::filesystem::exists(path)) {
        auto e = ensemble_from_json(detail::read_json(path));
        if (e.config == sim && e.sups.size() == static_cast<std::size_t>(sim.n_paths)) return e;
    }
    return sample_paths(m, s.cfg.problem, sim);
}

int cmd_verify(const Session& s) {
    const auto& sim = require_sim(s.cfg);
    const auto m = resolve_measure(s.cfg, s.base_dir);
    const auto report = compute_report(s.cfg, m);
    const auto ens = obtain_ensemble(s, m);

    const double c_z = report.c_z * s.cfg.cz_scale;
    const auto oracle = sigma_oracle(m, s.cfg.problem, s.cfg.z, c_z, sim.grid_t, sim.grid_x);
    const bool sigma_ok = oracle.worst_ratio <= 1.0 + kSigmaOracleTolerance;
    s.out << "sigma oracle worst ratio " << std::setprecision(12) << oracle.worst_ratio << std::setprecision(6)
          << (sigma_ok ? "  ok" : "  FAIL") << '\n';
    if (!sigma_ok) {
        s.out << "  at (t, x) = (" << oracle.t << ", " << oracle.x << "), (t1, x1) = (" << oracle.t1 << ", "
              << oracle.x1 << "), h = " << oracle.h << '\n';
    }

    const auto rows = verify_bound_dominance(ens, report);
    detail::write_text(s.output_path("exceedance.csv"), exceedance_csv(rows));
    s.out << std::setw(10) << "u" << std::setw(12) << "p_hat" << std::setw(12) << "ci_upper" << std::setw(16)
          << "bound" << '\n';
    for (const auto& r : rows) {
        s.out << std::setw(10) << r.u << std::setw(12) << r.p_hat << std::setw(12) << r.ci_upper << std::setw(16)
              << r.bound << (r.bound >= 1.0 ? "  vacuous" : "")
              << (r.ok && r.bound < 1.0 && r.ci_upper > r.bound ? "  unresolved" : "") << (r.ok ? "" : "  FAIL")
              << '\n';
    }
    const bool dominance_ok = all_ok(rows);
    if (!dominance_ok) {
        s.out << "failing rows (u, ci_upper / bound):\n";
        for (const auto& r : rows) {
            if (!r.ok) s.out << "  " << r.u << ", " << r.ci_upper / r.bound << '\n';
        }
    }
    return sigma_ok && dominance_ok ? kExitOk : kExitVerifyFailed;
}

int cmd_all(const Session& s) {
    if (const int rc = cmd_bound(s); rc != kExitOk) return rc;
    if (!s.cfg.sim || !s.cfg.problem.gaussian) {
        s.out << "skipping simulate and verify: "
              << (s.cfg.sim ? "simulation requires Gaussian y" : "config has no 'sim' section") << '\n';
        return kExitOk;
    }
    if (const int rc = cmd_simulate(s); rc != kExitOk) return rc;
    return cmd_verify(s);
}

int run_command(const std::string& name, const std::filesystem::path& config_path, const CommandOptions& opts,
                       std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = load_run_config(config_path);
        apply_overrides(cfg, opts);
        const Session s{cfg, config_path.parent_path(), out, err};
        if (name == "bound") return cmd_bound(s);
        if (name == "simulate") return cmd_simulate(s);
        if (name == "verify") return cmd_verify(s);
        if (name == "all") return cmd_all(s);
        err << "error: unknown command '" << name << "'\n";
        return kExitConfigError;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

}  // namespace supbound
