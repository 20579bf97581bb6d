// SPDX-License-Identifier: MIT
//
// Discrete spectral bi-measure of the initial condition and the problem data
// of the odd-order dispersive equation. Every double Lebesgue-Stieltjes
// integral against d|Gamma_y| becomes an exact finite sum over atom pairs.
#pragma once

#include "supbound/admissible.hpp"
#include "supbound/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

namespace supbound {

class SpectralMeasure {
public:
    SpectralMeasure() = default;

    // cov is row-major n x n. Rejects asymmetry beyond 1e-12 relative and
    // eigenvalues below -1e-10 * ||G||.
    SpectralMeasure(std::vector<double> lambdas, std::vector<double> cov)
        : lambdas_(std::move(lambdas)), cov_(std::move(cov)) {
        const std::size_t n = lambdas_.size();
        if (n == 0) throw ConfigError("spectral measure needs at least one atom");
        if (cov_.size() != n * n) {
            throw ConfigError("covariance must be " + std::to_string(n) + "x" + std::to_string(n));
        }
        for (double l : lambdas_) {
            if (!std::isfinite(l)) throw ConfigError("atom frequencies must be finite");
        }
        double scale = 0.0;
        for (double g : cov_) {
            if (!std::isfinite(g)) throw ConfigError("covariance entries must be finite");
            scale = std::max(scale, std::abs(g));
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double gij = cov_[i * n + j];
                const double gji = cov_[j * n + i];
                if (std::abs(gij - gji) > 1e-12 * std::max(scale, 1e-300)) {
                    throw ConfigError("covariance is not symmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
                }
            }
        }
        const auto ev = eigenvalues();
        const double norm = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
        if (ev.minCoeff() < -1e-10 * norm) {
            throw ConfigError("covariance is not positive semi-definite (min eigenvalue " +
                              std::to_string(ev.minCoeff()) + ")");
        }
    }

    std::size_t size() const noexcept { return lambdas_.size(); }
    const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    const std::vector<double>& cov() const noexcept { return cov_; }
    double lambda(std::size_t i) const { return lambdas_[i]; }
    double cov(std::size_t i, std::size_t j) const { return cov_[i * size() + j]; }

    Eigen::MatrixXd cov_matrix() const {
        const auto n = static_cast<Eigen::Index>(size());
        return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            cov_.data(), n, n);
    }

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_matrix(), Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }

    bool has_negative_atoms() const {
        return std::any_of(lambdas_.begin(), lambdas_.end(), [](double l) { return l < 0.0; });
    }

private:
    std::vector<double> lambdas_;
    std::vector<double> cov_;
};

enum class Kernel { Cos, Sin };

struct Rect {
    double a = 0.0, b = 1.0;  // time
    double c = 0.0, d = 1.0;  // space

    double time_len() const noexcept { return b - a; }
    double space_len() const noexcept { return d - c; }
    // varkappa = max(b - a, d - c)
    double kappa_len() const noexcept { return std::max(b - a, d - c); }

    friend bool operator==(const Rect&, const Rect&) = default;
};

struct ProblemSpec {
    std::vector<double> coeffs;  // a_1 .. a_N
    Rect rect;
    Kernel kernel = Kernel::Cos;
    double c_y = 1.0;  // determining constant
    bool gaussian = false;

    int order_n() const noexcept { return static_cast<int>(coeffs.size()); }

    void validate() const {
        if (coeffs.empty()) throw ConfigError("problem needs at least one dispersion coefficient");
        for (double a : coeffs) {
            if (!std::isfinite(a)) throw ConfigError("dispersion coefficients must be finite");
        }
        if (!(rect.b > rect.a)) throw ConfigError("rectangle needs b > a");
        if (!(rect.d > rect.c)) throw ConfigError("rectangle needs d > c");
        if (!(c_y > 0.0) || !std::isfinite(c_y)) throw ConfigError("C_y must be positive");
        if (gaussian && c_y != 1.0) throw ConfigError("Gaussian initial condition requires C_y = 1");
    }

    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

// P(lambda) = sum_k a_k lambda^(2k+1) (-1)^k
inline double dispersion_symbol(const ProblemSpec& spec, double lambda) {
    const double l2 = lambda * lambda;
    double power = lambda;  // lambda^(2k+1), starting at k = 0
    double sum = 0.0;
    double sign = 1.0;
    for (double a : spec.coeffs) {
        power *= l2;
        sign = -sign;
        sum += sign * a * power;
    }
    return sum;
}

inline double kernel_value(Kernel k, double arg) { return k == Kernel::Cos ? std::cos(arg) : std::sin(arg); }

inline double kernel_I(const ProblemSpec& spec, double t, double x, double lambda) {
    return kernel_value(spec.kernel, lambda * x + t * dispersion_symbol(spec, lambda));
}

// sum_{i,j} g(l_i, l_j) |G_ij|
template <class G>
double double_integral(const SpectralMeasure& m, G&& g) {
    const std::size_t n = m.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = std::abs(m.cov(i, j));
            if (w != 0.0) sum += g(m.lambda(i), m.lambda(j)) * w;
        }
    }
    return sum;
}

// Product-form integrand w(l) w(m) against d|Gamma_y|.
template <class W>
double separable_integral(const SpectralMeasure& m, W&& weight) {
    std::vector<double> w(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) w[i] = weight(m.lambda(i));
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) sum += w[i] * w[j] * std::abs(m.cov(i, j));
    }
    return sum;
}

inline double total_variation(const SpectralMeasure& m) {
    return double_integral(m, [](double, double) { return 1.0; });
}

inline double compute_CZ(const SpectralMeasure& m, const ProblemSpec& spec, const AdmissibleFn& z) {
    const double u0 = z.u0();
    const double sq = separable_integral(m, [&](double l) {
        return eval_Z(z, std::abs(l) / 2.0 + u0) + eval_Z(z, std::abs(dispersion_symbol(spec, l)) / 2.0 + u0);
    });
    return std::sqrt(sq);
}

inline double check_existence(const SpectralMeasure& m, const ProblemSpec& spec, const AdmissibleFn& z) {
    const double p = 2.0 * spec.order_n() + 1.0;
    return separable_integral(m, [&](double l) {
        const double lp = std::pow(std::abs(l), p);
        return lp * eval_Z(z, z.u0() + lp);
    });
}

/// Existence integral for phi(x) = |x|^p / p at infinity, with log weights
/// (ln(1 + l))^alpha. Only atoms with l >= 0 contribute since ln(1 + l) is
/// undefined for l <= -1; callers report has_negative_atoms() alongside.
inline double check_existence_logpower(const SpectralMeasure& m, const ProblemSpec& spec, double alpha) {
    if (!(alpha > 0.0)) throw DomainError("check_existence_logpower: alpha must be positive");
    const double p = 2.0 * spec.order_n() + 1.0;
    return separable_integral(m, [&](double l) {
        if (l < 0.0) return 0.0;
        return std::pow(l, p) * std::pow(std::log1p(l), alpha);
    });
}

// Gamma = C_y sqrt(total variation), an upper bound for eps0.
inline double gamma_upper(const SpectralMeasure& m, double c_y) {
    if (!(c_y > 0.0)) throw DomainError("gamma_upper: C_y must be positive");
    return c_y * std::sqrt(total_variation(m));
}

// E U(t,x)^2 = sum I_i I_j G_ij
inline double second_moment(const SpectralMeasure& m, const ProblemSpec& spec, double t, double x) {
    const std::size_t n = m.size();
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = kernel_I(spec, t, x, m.lambda(i));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sum += k[i] * k[j] * m.cov(i, j);
    }
    return std::max(sum, 0.0);
}

namespace detail {

// sqrt of the quadratic form diff' G diff, rejecting PSD violations.
inline double quadratic_std(const SpectralMeasure& m, const std::vector<double>& diff) {
    const std::size_t n = m.size();
    double sum = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double term = diff[i] * diff[j] * m.cov(i, j);
            sum += term;
            scale += std::abs(term);
        }
    }
    if (sum < 0.0) {
        if (sum < -1e-12 * std::max(scale, 1.0)) {
            throw InternalError("negative increment variance " + std::to_string(sum));
        }
        sum = 0.0;
    }
    return std::sqrt(sum);
}

}  // namespace detail

// (E (U(t,x) - U(t1,x1))^2)^(1/2) under the signed measure.
inline double increment_std(const SpectralMeasure& m, const ProblemSpec& spec, double t, double x, double t1,
                            double x1) {
    std::vector<double> diff(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        diff[i] = kernel_I(spec, t, x, m.lambda(i)) - kernel_I(spec, t1, x1, m.lambda(i));
    }
    return detail::quadratic_std(m, diff);
}

/// C_y * max standard deviation of U over a uniform n_t x n_x grid, then once
/// more on the grid with every cell halved; returns the larger value.
inline double eps0_grid(const SpectralMeasure& m, const ProblemSpec& spec, int n_t = 64, int n_x = 64) {
    auto sweep = [&](int nt, int nx) {
        double best = 0.0;
        for (int i = 0; i < nt; ++i) {
            const double t = spec.rect.a + spec.rect.time_len() * i / (nt - 1);
            for (int j = 0; j < nx; ++j) {
                const double x = spec.rect.c + spec.rect.space_len() * j / (nx - 1);
                best = std::max(best, second_moment(m, spec, t, x));
            }
        }
        return best;
    };
    const double best = std::max(sweep(n_t, n_x), sweep(2 * n_t - 1, 2 * n_x - 1));
    return spec.c_y * std::sqrt(best);
}

// 64-bit FNV-1a over the raw bytes of measure and problem data.
inline std::string fingerprint(const SpectralMeasure& m, const ProblemSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&](const void* p, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto mix = [&](double v) {
        if (v == 0.0) v = 0.0;  // fold -0.0
        mix_bytes(&v, sizeof v);
    };
    const std::uint64_t n = m.size();
    mix_bytes(&n, sizeof n);
    for (double l : m.lambdas()) mix(l);
    for (double g : m.cov()) mix(g);
    const std::uint64_t order = spec.coeffs.size();
    mix_bytes(&order, sizeof order);
    for (double a : spec.coeffs) mix(a);
    mix(spec.rect.a);
    mix(spec.rect.b);
    mix(spec.rect.c);
    mix(spec.rect.d);
    const unsigned char k = spec.kernel == Kernel::Cos ? 0 : 1;
    mix_bytes(&k, 1);
    mix(spec.c_y);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace supbound
