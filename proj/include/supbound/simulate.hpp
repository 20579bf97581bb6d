// SPDX-License-Identifier: MIT
//
// Monte Carlo for Gaussian initial conditions: U(t,x) = sum_i I(t,x,l_i) xi_i
// with xi ~ N(0, G), plus the deterministic increment-variance oracle for
// sigma(h) and the empirical check of the supremum tail bound.
#pragma once

#include "supbound/bounds.hpp"
#include "supbound/errors.hpp"
#include "supbound/rng.hpp"
#include "supbound/spectral.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

namespace supbound {

struct SimulationConfig {
    int grid_t = 64;
    int grid_x = 64;
    int n_paths = 10000;
    std::uint64_t seed = 42;

    void validate() const {
        if (grid_t < 2 || grid_x < 2) throw ConfigError("simulation grid needs at least 2 points per axis");
        if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
    }

    friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

struct SupEnsemble {
    std::vector<double> sups;  // per-path max |U| over the grid
    SimulationConfig config;
    std::string fingerprint;
    std::string rng = std::string(kRngName);
};

// Uniform grid over the rectangle, t-major.
struct EvalGrid {
    std::vector<double> t, x;

    EvalGrid(const Rect& rect, int n_t, int n_x) : t(n_t), x(n_x) {
        for (int i = 0; i < n_t; ++i) t[i] = rect.a + rect.time_len() * i / (n_t - 1);
        for (int j = 0; j < n_x; ++j) x[j] = rect.c + rect.space_len() * j / (n_x - 1);
    }
    std::size_t size() const noexcept { return t.size() * x.size(); }
};

// nodes x atoms matrix of kernel values I(t, x, l_i).
inline Eigen::MatrixXd kernel_matrix(const SpectralMeasure& m, const ProblemSpec& spec, const EvalGrid& grid) {
    Eigen::MatrixXd k(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(m.size()));
    Eigen::Index row = 0;
    for (double t : grid.t) {
        for (double x : grid.x) {
            for (std::size_t i = 0; i < m.size(); ++i) {
                k(row, static_cast<Eigen::Index>(i)) = kernel_I(spec, t, x, m.lambda(i));
            }
            ++row;
        }
    }
    return k;
}

/// Symmetric square root S with S S = G. Eigenvalues below -1e-10 ||G|| are
/// rejected; smaller negative ones are clipped to zero.
inline Eigen::MatrixXd symmetric_sqrt(const SpectralMeasure& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.cov_matrix());
    Eigen::VectorXd ev = solver.eigenvalues();
    const double norm = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
    if (ev.minCoeff() < -1e-10 * norm) throw ConfigError("covariance is not positive semi-definite");
    ev = ev.cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
}

// Gaussian amplitudes xi for one path; depends only on (seed, path).
inline Eigen::VectorXd draw_amplitudes(const Eigen::MatrixXd& root, std::uint64_t seed, std::uint64_t path) {
    NormalStream normals(SplitMix64::stream(seed, path));
    Eigen::VectorXd z(root.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normals.next();
    return root * z;
}

inline SupEnsemble sample_paths(const SpectralMeasure& m, const ProblemSpec& spec, const SimulationConfig& cfg,
                                unsigned threads = 0) {
    cfg.validate();
    spec.validate();
    if (!spec.gaussian) throw PreconditionError("simulation requires Gaussian y");

    const EvalGrid grid(spec.rect, cfg.grid_t, cfg.grid_x);
    const Eigen::MatrixXd kernel = kernel_matrix(m, spec, grid);
    const Eigen::MatrixXd root = symmetric_sqrt(m);

    SupEnsemble out;
    out.config = cfg;
    out.fingerprint = fingerprint(m, spec);
    out.sups.assign(static_cast<std::size_t>(cfg.n_paths), 0.0);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const Eigen::VectorXd xi = draw_amplitudes(root, cfg.seed, p);
            out.sups[p] = (kernel * xi).cwiseAbs().maxCoeff();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n = out.sups.size();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
    }
    return out;
}

// One-sided upper Clopper-Pearson limit for k successes out of n.
inline double clopper_pearson_upper(std::size_t k, std::size_t n, double confidence = 0.99) {
    if (n == 0) throw DomainError("clopper_pearson_upper: n must be positive");
    if (k >= n) return 1.0;
    return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), confidence);
}

struct Exceedance {
    double p_hat = 0.0;
    double ci_upper = 1.0;
};

inline Exceedance empirical_exceedance(const SupEnsemble& e, double u) {
    if (e.sups.empty()) throw DomainError("empirical_exceedance: empty ensemble");
    if (!(u >= 0.0)) throw DomainError("empirical_exceedance: u must be nonnegative");
    const auto k = static_cast<std::size_t>(std::count_if(e.sups.begin(), e.sups.end(), [u](double s) { return s > u; }));
    const std::size_t n = e.sups.size();
    return {static_cast<double>(k) / static_cast<double>(n), clopper_pearson_upper(k, n, 0.99)};
}

struct SigmaOracleResult {
    double worst_ratio = 0.0;
    // Pair attaining the worst ratio.
    double t = 0.0, x = 0.0, t1 = 0.0, x1 = 0.0;
    double h = 0.0;
};

/// max over grid pairs of C_y * std(U(t,x) - U(t1,x1)) / sigma(max(|t-t1|, |x-x1|)).
/// The Hoelder bound on the field asserts this never exceeds 1.
inline SigmaOracleResult sigma_oracle(const SpectralMeasure& m, const ProblemSpec& spec, const AdmissibleFn& z,
                                      double c_z, int grid_t, int grid_x) {
    spec.validate();
    if (grid_t < 2 || grid_x < 2) throw ConfigError("sigma oracle grid needs at least 2 points per axis");
    const EvalGrid grid(spec.rect, grid_t, grid_x);
    const Eigen::MatrixXd kernel = kernel_matrix(m, spec, grid);
    const double ht = spec.rect.time_len() / (grid_t - 1);
    const double hx = spec.rect.space_len() / (grid_x - 1);

    // sigma depends only on the index offsets.
    std::vector<double> sig(static_cast<std::size_t>(grid_t * grid_x), 0.0);
    for (int di = 0; di < grid_t; ++di) {
        for (int dj = 0; dj < grid_x; ++dj) {
            const double h = std::max(di * ht, dj * hx);
            if (h > 0.0) sig[di * grid_x + dj] = sigma(z, spec.c_y, c_z, h);
        }
    }

    const std::size_t n = m.size();
    const std::size_t n_nodes = grid.size();
    std::vector<double> k(n_nodes * n);
    for (std::size_t p = 0; p < n_nodes; ++p) {
        for (std::size_t i = 0; i < n; ++i) {
            k[p * n + i] = kernel(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i));
        }
    }
    const std::vector<double>& cov = m.cov();

    SigmaOracleResult best;
    std::vector<double> diff(n);
    for (std::size_t p = 0; p < n_nodes; ++p) {
        const int pi = static_cast<int>(p / grid_x);
        const int pj = static_cast<int>(p % grid_x);
        for (std::size_t q = p + 1; q < n_nodes; ++q) {
            const int qi = static_cast<int>(q / grid_x);
            const int qj = static_cast<int>(q % grid_x);
            for (std::size_t i = 0; i < n; ++i) diff[i] = k[p * n + i] - k[q * n + i];
            double var = 0.0;
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double term = diff[i] * diff[j] * cov[i * n + j];
                    var += term;
                    scale += std::abs(term);
                }
            }
            if (var < 0.0) {
                if (var < -1e-12 * std::max(1.0, scale)) {
                    throw InternalError("negative increment variance in sigma oracle");
                }
                var = 0.0;
            }
            if (var == 0.0) continue;
            const double s = sig[std::abs(pi - qi) * grid_x + std::abs(pj - qj)];
            const double ratio = s > 0.0 ? spec.c_y * std::sqrt(var) / s : std::numeric_limits<double>::infinity();
            if (ratio > best.worst_ratio) {
                best.worst_ratio = ratio;
                best.t = grid.t[pi];
                best.x = grid.x[pj];
                best.t1 = grid.t[qi];
                best.x1 = grid.x[qj];
                best.h = std::max(std::abs(best.t - best.t1), std::abs(best.x - best.x1));
            }
        }
    }
    return best;
}

inline double verify_sigma_oracle(const SpectralMeasure& m, const ProblemSpec& spec, const AdmissibleFn& z,
                                  double c_z, int grid_t, int grid_x) {
    return sigma_oracle(m, spec, z, c_z, grid_t, grid_x).worst_ratio;
}

struct DominanceRow {
    double u = 0.0;
    double p_hat = 0.0;
    double ci_upper = 1.0;
    double bound = 0.0;
    bool ok = false;
};

// ok when the 99% upper limit sits below min(bound, 1), the bound is vacuous,
// or no path exceeds u. The last case covers bounds smaller than the sample can
// resolve: with n paths the upper limit never drops below about 4.6 / n.
inline std::vector<DominanceRow> verify_bound_dominance(const SupEnsemble& e, const BoundReport& report) {
    if (e.fingerprint != report.fingerprint) {
        throw PreconditionError("ensemble fingerprint " + e.fingerprint + " does not match report fingerprint " +
                                report.fingerprint);
    }
    std::vector<DominanceRow> rows;
    for (const auto& r : report.rows) {
        const auto ex = empirical_exceedance(e, r.u);
        DominanceRow row{r.u, ex.p_hat, ex.ci_upper, r.bound, false};
        row.ok = r.bound >= 1.0 || ex.ci_upper <= std::min(r.bound, 1.0) || (ex.p_hat == 0.0 && r.bound > 0.0);
        rows.push_back(row);
    }
    return rows;
}

inline bool all_ok(const std::vector<DominanceRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const DominanceRow& r) { return r.ok; });
}

}  // namespace supbound
