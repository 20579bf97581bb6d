// SPDX-License-Identifier: MIT
//
// Supremum tail bounds for the solution field on a rectangle: Hoelder modulus
// sigma(h), covering numbers, entropy integrals, the generic bound 2 A(theta, u)
// and its closed forms for the power, Gaussian and exponential families.
#pragma once

#include "supbound/admissible.hpp"
#include "supbound/errors.hpp"
#include "supbound/nfunc.hpp"
#include "supbound/quadrature.hpp"
#include "supbound/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace supbound {

// r(v), v >= 1, with r(1) = 0 and r(e^x) convex.
class RFunction {
public:
    enum class Family {
        PowerMinusOne,  // v^beta - 1
        Log,            // ln v
    };

    static RFunction power_minus_one(double beta) {
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw DomainError("power_minus_one r: beta must be positive, got " + std::to_string(beta));
        }
        return RFunction(Family::PowerMinusOne, beta);
    }
    static RFunction log() { return RFunction(Family::Log, 0.0); }

    Family family() const noexcept { return family_; }
    double beta() const noexcept { return beta_; }
    std::string name() const { return family_ == Family::Log ? "log" : "power_minus_one"; }

    double eval(double v) const { return eval_from_log(std::log(v)); }

    // r(e^log_v)
    double eval_from_log(double log_v) const {
        return family_ == Family::Log ? log_v : std::expm1(beta_ * log_v);
    }

    double inverse(double v) const { return std::exp(log_inverse(v)); }

    // ln r^{-1}(v)
    double log_inverse(double v) const {
        if (!(v >= 0.0)) throw DomainError("r inverse: argument must be nonnegative");
        return family_ == Family::Log ? v : std::log1p(v) / beta_;
    }

    friend bool operator==(const RFunction&, const RFunction&) = default;

private:
    RFunction(Family family, double beta) : family_(family), beta_(beta) {}

    Family family_;
    double beta_;
};

namespace detail {

// ln(1 + e^y)
inline double softplus(double y) {
    if (y > 0.0) return y + std::log1p(std::exp(-y));
    return std::log1p(std::exp(y));
}

}  // namespace detail

/// sigma(h) = 2 C_y C_Z / Z(1/h + u0) on 0 < h <= kappa_len, and its inverse on
/// (0, gamma0) with gamma0 = sigma(kappa_len).
class HolderModulus {
public:
    HolderModulus(AdmissibleFn z, double c_y, double c_z, double kappa_len)
        : z_(z), c_y_(c_y), c_z_(c_z), kappa_len_(kappa_len) {
        if (!(c_y > 0.0)) throw DomainError("HolderModulus: C_y must be positive");
        if (!(c_z >= 0.0)) throw DomainError("HolderModulus: C_Z must be nonnegative");
        if (!(kappa_len > 0.0)) throw DomainError("HolderModulus: kappa_len must be positive");
    }

    const AdmissibleFn& z() const noexcept { return z_; }
    double scale() const noexcept { return 2.0 * c_y_ * c_z_; }
    double kappa_len() const noexcept { return kappa_len_; }

    double operator()(double h) const {
        if (!(h > 0.0)) throw DomainError("sigma: h must be positive");
        return scale() / eval_Z(z_, 1.0 / h + z_.u0());
    }

    double gamma0() const { return (*this)(kappa_len_); }

    double inverse(double v) const {
        const double g0 = gamma0();
        if (!(v > 0.0) || !(v < g0)) {
            throw DomainError("sigma_inv: v must lie in (0, gamma0) = (0, " + std::to_string(g0) + ")");
        }
        return std::exp(-log_Z_inv_excess(z_, scale() / v));
    }

    // ln(1 / sigma^{-1}(v)) for 0 < v <= gamma0; stays finite where the
    // reciprocal would overflow.
    double log_inverse_reciprocal(double v) const {
        if (v >= gamma0()) return -std::log(kappa_len_);
        return log_Z_inv_excess(z_, scale() / v);
    }

private:
    AdmissibleFn z_;
    double c_y_;
    double c_z_;
    double kappa_len_;
};

inline double sigma(const AdmissibleFn& z, double c_y, double c_z, double h) {
    if (!(h > 0.0)) throw DomainError("sigma: h must be positive");
    return 2.0 * c_y * c_z / eval_Z(z, 1.0 / h + z.u0());
}

inline double sigma_inv(const AdmissibleFn& z, double c_y, double c_z, double v, const Rect& rect) {
    return HolderModulus(z, c_y, c_z, rect.kappa_len()).inverse(v);
}

inline double gamma0(const AdmissibleFn& z, double c_y, double c_z, const Rect& rect) {
    return 2.0 * c_y * c_z / eval_Z(z, 1.0 / rect.kappa_len() + z.u0());
}

// ln N(v) for the covering of the rectangle by sigma^{-1}(v)-balls in the sup metric.
inline double log_covering_bound(const Rect& rect, const HolderModulus& sig, double v) {
    if (!(v > 0.0)) throw DomainError("covering_bound: v must be positive");
    const double g0 = sig.gamma0();
    if (v > g0) return 0.0;
    const double l = sig.log_inverse_reciprocal(v);
    return detail::softplus(std::log(rect.time_len() / 2.0) + l) +
           detail::softplus(std::log(rect.space_len() / 2.0) + l);
}

inline double covering_bound(const Rect& rect, const AdmissibleFn& z, double c_y, double c_z, double v) {
    return std::exp(log_covering_bound(rect, HolderModulus(z, c_y, c_z, rect.kappa_len()), v));
}

struct EntropyIntegralResult {
    double value = 0.0;
    int refinements = 0;
};

/// I_r(delta) = int_0^delta r(N(s)) ds with N the covering bound, by dyadic
/// quadrature towards the singular endpoint.
inline EntropyIntegralResult entropy_integral_detail(const Rect& rect, const HolderModulus& sig, const RFunction& r,
                                                     double delta) {
    if (!(delta > 0.0)) throw DomainError("entropy_integral: delta must be positive");
    auto integrand = [&](double s) { return r.eval_from_log(log_covering_bound(rect, sig, s)); };
    const auto res = quad::integrate_from_zero(integrand, delta, 1e-8, 40, 1e-11);
    if (!res.converged) {
        throw PreconditionError(
            "entropy integral condition fails: int_0^delta r(N(v)) dv is not finite "
            "(integrand not integrable at 0 after 40 dyadic refinements)");
    }
    return {res.value, res.refinements};
}

inline double entropy_integral(const Rect& rect, const AdmissibleFn& z, double c_y, double c_z, const RFunction& r,
                               double delta) {
    return entropy_integral_detail(rect, HolderModulus(z, c_y, c_z, rect.kappa_len()), r, delta).value;
}

/// Analytic majorant of I_r(delta) for Z = u^rho and r = v^beta - 1:
/// c^(2b/rho) kappa^(2b) (1 - 2b/rho)^-1 delta^(1 - 2b/rho) - delta, c = 2 C_Z C_y.
/// Valid for 0 < beta < rho/2 and delta < c (kappa/2)^rho.
inline double entropy_majorant_power(double c, double beta, double rho, double kappa_len, double delta) {
    if (!(beta > 0.0 && beta < rho / 2.0)) throw PreconditionError("power majorant needs 0 < beta < rho/2");
    if (!(delta > 0.0 && delta < c * std::pow(kappa_len / 2.0, rho))) {
        throw PreconditionError("power majorant needs delta < 2 C_Z C_y (kappa/2)^rho");
    }
    const double e = 2.0 * beta / rho;
    return std::pow(c, e) * std::pow(kappa_len, 2.0 * beta) / (1.0 - e) * std::pow(delta, 1.0 - e) - delta;
}

/// Analytic majorant of I_r(delta) for Z = ln^alpha(u + 1) and r = ln v:
/// delta ln(kappa^2/4) + 2 c^(1/alpha) delta^(1 - 1/alpha) / (1 - 1/alpha).
inline double entropy_majorant_log(double c, double alpha, double kappa_len, double delta) {
    if (!(alpha > 1.0)) throw PreconditionError("log majorant needs alpha > 1");
    if (!(delta > 0.0)) throw PreconditionError("log majorant needs delta > 0");
    const double q = 1.0 - 1.0 / alpha;
    return delta * std::log(kappa_len * kappa_len / 4.0) + 2.0 * std::pow(c, 1.0 / alpha) * std::pow(delta, q) / q;
}

// ln r^{-1}(I / (theta eps0)), shared by the moment and tail bounds.
inline double log_entropy_factor(const RFunction& r, double integral, double theta_eps0) {
    return r.log_inverse(std::max(integral, 0.0) / theta_eps0);
}

inline double entropy_factor(const RFunction& r, double integral, double theta_eps0) {
    return std::exp(log_entropy_factor(r, integral, theta_eps0));
}

// Q(lambda, theta) = exp{phi(lambda eps0 / (1 - theta))} r^{-1}(I_r(theta eps0) / (theta eps0))
inline double mgf_bound(const NFunction& f, const RFunction& r, double eps0, double integral_at_theta_eps0,
                        double lambda, double theta) {
    if (!(lambda > 0.0)) throw DomainError("mgf_bound: lambda must be positive");
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("mgf_bound: theta must lie in (0, 1)");
    return std::exp(eval_phi(f, lambda * eps0 / (1.0 - theta))) *
           entropy_factor(r, integral_at_theta_eps0, theta * eps0);
}

enum class EntropySource {
    Quadrature,     // adaptive quadrature of the exact integrand
    PowerMajorant,  // closed-form majorant for Z = u^rho, r = v^beta - 1
    LogMajorant,    // closed-form majorant for Z = ln^alpha(u+1), r = ln v
};

struct BoundSetup {
    NFunction phi = NFunction::gaussian();
    AdmissibleFn z = AdmissibleFn::power(1.0);
    RFunction r = RFunction::log();
    Rect rect;
    double c_y = 1.0;
    double c_z = 1.0;
    double eps0 = 1.0;
    EntropySource source = EntropySource::Quadrature;
};

struct ThetaOptimum {
    double theta = 0.5;
    double bound = 0.0;
    double log_bound = -std::numeric_limits<double>::infinity();
};

/// Generic bound pipeline: 2 A(theta, u) with
/// A = exp{-phi*(u (1 - theta) / eps0)} r^{-1}(I_r(min(theta eps0, gamma0)) / (theta eps0)).
class BoundPipeline {
public:
    explicit BoundPipeline(BoundSetup setup)
        : s_(setup), sigma_(setup.z, setup.c_y, std::max(setup.c_z, 0.0), setup.rect.kappa_len()) {
        if (!(s_.eps0 >= 0.0) || !std::isfinite(s_.eps0)) throw DomainError("eps0 must be finite and >= 0");
        if (s_.source == EntropySource::PowerMajorant &&
            (s_.z.family() != AdmissibleFn::Family::Power || s_.r.family() != RFunction::Family::PowerMinusOne)) {
            throw PreconditionError("power majorant requires Z = power and r = power_minus_one");
        }
        if (s_.source == EntropySource::LogMajorant &&
            (s_.z.family() != AdmissibleFn::Family::LogPower || s_.r.family() != RFunction::Family::Log)) {
            throw PreconditionError("log majorant requires Z = log_power and r = log");
        }
    }

    const BoundSetup& setup() const noexcept { return s_; }
    const HolderModulus& modulus() const noexcept { return sigma_; }
    double gamma0() const { return sigma_.gamma0(); }
    bool degenerate() const noexcept { return s_.eps0 == 0.0; }

    double entropy(double delta) const {
        const double c = 2.0 * s_.c_z * s_.c_y;
        switch (s_.source) {
            case EntropySource::PowerMajorant:
                return entropy_majorant_power(c, s_.r.beta(), s_.z.param(), s_.rect.kappa_len(), delta);
            case EntropySource::LogMajorant:
                return entropy_majorant_log(c, s_.z.param(), s_.rect.kappa_len(), delta);
            case EntropySource::Quadrature:
                break;
        }
        if (c == 0.0) return 0.0;
        return entropy_integral_detail(s_.rect, sigma_, s_.r, delta).value;
    }

    // ln r^{-1}(I_r(min(theta eps0, gamma0)) / (theta eps0))
    double log_entropy_factor(double theta) const {
        const double te = theta * s_.eps0;
        const double g0 = gamma0();
        const double delta = std::min(te, g0);
        const double integral = delta > 0.0 ? entropy(delta) : 0.0;
        return supbound::log_entropy_factor(s_.r, integral, te);
    }

    double log_tail_bound(double u, double theta) const {
        if (!(u > 0.0)) throw DomainError("tail_bound: u must be positive");
        if (!(theta > 0.0 && theta < 1.0)) throw DomainError("tail_bound: theta must lie in (0, 1)");
        if (degenerate()) return -std::numeric_limits<double>::infinity();
        return std::log(2.0) - eval_phi_star(s_.phi, u * (1.0 - theta) / s_.eps0) + log_entropy_factor(theta);
    }

    double tail_bound(double u, double theta) const { return std::exp(log_tail_bound(u, theta)); }

    double mgf_bound(double lambda, double theta) const {
        const double te = theta * s_.eps0;
        return supbound::mgf_bound(s_.phi, s_.r, s_.eps0, entropy(std::min(te, gamma0())), lambda, theta);
    }

private:
    BoundSetup s_;
    HolderModulus sigma_;
};

inline double tail_bound(const BoundSetup& setup, double u, double theta) {
    return BoundPipeline(setup).tail_bound(u, theta);
}

/// Minimises a log-bound over theta in [lo, hi]: 64-point scan, then golden
/// section between the neighbours of the best scan point. The objective is not
/// known to be unimodal, so the scan decides the basin.
template <class LogBound>
ThetaOptimum minimize_theta(const LogBound& log_bound, double lo, double hi) {
    constexpr int kScan = 64;
    std::array<double, kScan> grid{};
    std::array<double, kScan> vals{};
    int best = -1;
    for (int k = 0; k < kScan; ++k) {
        grid[k] = lo + (hi - lo) * k / (kScan - 1);
        vals[k] = log_bound(grid[k]);
        if (!std::isnan(vals[k]) && vals[k] < std::numeric_limits<double>::infinity() &&
            (best < 0 || vals[k] < vals[best])) {
            best = k;
        }
    }
    if (best < 0) throw PreconditionError("bound pipeline infeasible: no theta gives a finite bound");

    ThetaOptimum out{grid[best], 0.0, vals[best]};
    double a = grid[std::max(best - 1, 0)];
    double b = grid[std::min(best + 1, kScan - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = log_bound(c);
    double fd = log_bound(d);
    for (int it = 0; it < 60 && (b - a) > 1e-12; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = log_bound(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = log_bound(d);
        }
    }
    for (auto [t, v] : {std::pair{c, fc}, std::pair{d, fd}}) {
        if (v < out.log_bound) out = {t, 0.0, v};
    }
    out.bound = std::exp(out.log_bound);
    return out;
}

inline constexpr double kThetaMin = 1e-4;
inline constexpr double kThetaMax = 1.0 - 1e-4;

inline ThetaOptimum optimize_theta(const BoundPipeline& p, double u) {
    if (!(u > 0.0)) throw DomainError("optimize_theta: u must be positive");
    if (p.degenerate()) return {0.5, 0.0, -std::numeric_limits<double>::infinity()};
    return minimize_theta([&](double th) { return p.log_tail_bound(u, th); }, kThetaMin, kThetaMax);
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

// Upper end of the theta window (0, (2 C_Z C_y / eps0)(kappa/2)^rho) for the power closed form.
inline double power_theta_window(double eps0, double c_y, double c_z, double rho, double kappa_len) {
    return 2.0 * c_z * c_y / eps0 * std::pow(kappa_len / 2.0, rho);
}

inline double log_closed_form_power(double u, double theta, double eps0, double c_y, double c_z, double rho,
                                    double gamma, double kappa_len) {
    if (!(u > 0.0)) throw DomainError("closed_form_power: u must be positive");
    const double window = power_theta_window(eps0, c_y, c_z, rho, kappa_len);
    if (!(theta > 0.0 && theta < 1.0 && theta < window)) {
        throw PreconditionError("closed_form_power: theta must lie in (0, min(1, " + std::to_string(window) +
                                ")) = (0, (2 C_Z C_y / eps0)(kappa/2)^rho) intersected with (0,1)");
    }
    const double w = u * (1.0 - theta) / eps0;
    return std::log(2.0) - std::pow(w, gamma) / gamma + (2.0 / rho) * std::log(2.0 * std::exp(1.0) * c_z * c_y) +
           2.0 * std::log(kappa_len) - (2.0 / rho) * std::log(theta * eps0);
}

inline double closed_form_power(double u, double theta, double eps0, double c_y, double c_z, double rho,
                                double gamma, double kappa_len) {
    return std::exp(log_closed_form_power(u, theta, eps0, c_y, c_z, rho, gamma, kappa_len));
}

inline double closed_form_gauss(double u, double theta, double eps0, double c_z, double rho, double kappa_len) {
    return closed_form_power(u, theta, eps0, 1.0, c_z, rho, 2.0, kappa_len);
}

inline double exp_alpha_lower_limit(const Rect& rect) {
    return std::max({1.0, std::log(2.0 / rect.time_len()), std::log(2.0 / rect.space_len())});
}

inline double log_closed_form_exp(double u, double theta, double eps0, double c_y, double c_z, double alpha,
                                  const Rect& rect) {
    if (!(u > 0.0)) throw DomainError("closed_form_exp: u must be positive");
    const double alpha_min = exp_alpha_lower_limit(rect);
    if (!(alpha > alpha_min)) {
        throw PreconditionError("closed_form_exp: alpha must satisfy alpha > max{1, ln(2/(b-a)), ln(2/(d-c))} = " +
                                std::to_string(alpha_min));
    }
    const double g0 = gamma0(AdmissibleFn::log_power(alpha), c_y, c_z, rect);
    if (!(theta > 0.0 && theta < 1.0 && theta * eps0 < g0)) {
        throw PreconditionError("closed_form_exp: theta must satisfy theta * eps0 < gamma0 = " + std::to_string(g0));
    }
    const double w = u * (1.0 - theta) / eps0;
    const double kl = rect.kappa_len();
    return std::log(2.0) - (w + 1.0) * std::log1p(w) + w + std::log(kl * kl / 4.0) +
           (2.0 * alpha / (alpha - 1.0)) * std::pow(2.0 * c_z * c_y / (theta * eps0), 1.0 / alpha);
}

inline double closed_form_exp(double u, double theta, double eps0, double c_y, double c_z, double alpha,
                              const Rect& rect) {
    return std::exp(log_closed_form_exp(u, theta, eps0, c_y, c_z, alpha, rect));
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

enum class Method { Generic, ClosedPower, ClosedGauss, ClosedExp };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::Generic: return "generic";
        case Method::ClosedPower: return "closed_power";
        case Method::ClosedGauss: return "closed_gauss";
        case Method::ClosedExp: return "closed_exp";
    }
    return "generic";
}

inline Method method_from_name(const std::string& s) {
    if (s == "generic") return Method::Generic;
    if (s == "closed_power") return Method::ClosedPower;
    if (s == "closed_gauss") return Method::ClosedGauss;
    if (s == "closed_exp") return Method::ClosedExp;
    throw ConfigError("unknown method '" + s + "'");
}

enum class MethodRequest { Auto, Generic, Closed };

// Closed form matching the (phi, Z) signature, if any.
inline std::optional<Method> closed_form_for(const NFunction& phi, const AdmissibleFn& z, double c_y) {
    const bool power_z = z.family() == AdmissibleFn::Family::Power;
    if (phi.family() == NFunction::Family::GaussianHalfSquare && power_z) {
        return c_y == 1.0 ? Method::ClosedGauss : Method::ClosedPower;
    }
    if (phi.family() == NFunction::Family::PowerAlpha && power_z) return Method::ClosedPower;
    if (phi.family() == NFunction::Family::ExpAbs && z.family() == AdmissibleFn::Family::LogPower) {
        return Method::ClosedExp;
    }
    return std::nullopt;
}

enum class Eps0Mode { GammaUpper, Grid };

struct BoundRow {
    double u = 0.0;
    double theta_star = 0.5;
    double bound = 0.0;      // raw 2 A, may exceed 1
    double log_bound = 0.0;
    std::optional<double> generic_bound;  // generic pipeline, when a closed form was selected

    bool vacuous() const noexcept { return bound >= 1.0; }
};

struct BoundReport {
    double eps0 = 0.0;
    double eps0_grid = 0.0;
    bool eps0_discrepancy = false;  // grid eps0 and Gamma differ by more than 10%
    double gamma_upper = 0.0;
    double c_z = 0.0;
    double gamma0 = 0.0;
    double theta_star = 0.5;
    Method method = Method::Generic;
    std::vector<BoundRow> rows;
    std::string fingerprint;
    double existence_integral = 0.0;
    double admissibility_integral = 0.0;
    bool negative_atoms = false;
};

struct BoundRequest {
    NFunction phi = NFunction::gaussian();
    AdmissibleFn z = AdmissibleFn::power(1.0);
    RFunction r = RFunction::log();
    std::vector<double> u_grid;
    MethodRequest method = MethodRequest::Auto;
    Eps0Mode eps0_mode = Eps0Mode::GammaUpper;
    double admissibility_eps = 0.1;
};

namespace detail {

class ClosedFormEvaluator {
public:
    ClosedFormEvaluator(Method method, const BoundSetup& s) : method_(method), s_(s) {
        if (method_ == Method::ClosedExp) {
            hi_ = std::min(kThetaMax, gamma0(s.z, s.c_y, s.c_z, s.rect) / s.eps0 * (1.0 - 1e-12));
            // Surface the alpha window before the scan.
            (void)log_closed_form_exp(1.0, std::min(0.5 * hi_, 0.5), s.eps0, s.c_y, s.c_z, s.z.param(), s.rect);
        } else {
            hi_ = std::min(kThetaMax,
                           power_theta_window(s.eps0, s.c_y, s.c_z, s.z.param(), s.rect.kappa_len()) * (1.0 - 1e-12));
        }
        if (!(hi_ > kThetaMin)) {
            throw PreconditionError("closed form theta window is empty for these parameters");
        }
    }

    double hi() const noexcept { return hi_; }

    double operator()(double u, double theta) const {
        switch (method_) {
            case Method::ClosedExp:
                return log_closed_form_exp(u, theta, s_.eps0, s_.c_y, s_.c_z, s_.z.param(), s_.rect);
            case Method::ClosedGauss:
                return log_closed_form_power(u, theta, s_.eps0, 1.0, s_.c_z, s_.z.param(), 2.0, s_.rect.kappa_len());
            default:
                return log_closed_form_power(u, theta, s_.eps0, s_.c_y, s_.c_z, s_.z.param(),
                                             s_.phi.conjugate_exponent(), s_.rect.kappa_len());
        }
    }

private:
    Method method_;
    BoundSetup s_;
    double hi_ = kThetaMax;
};

// Optimises theta per u in increasing u order. The previous row's theta is
// offered as a candidate so the reported bound is non-increasing in u.
template <class LogBound>
std::vector<BoundRow> sweep(const std::vector<double>& u_grid, const LogBound& log_bound, double lo, double hi) {
    std::vector<BoundRow> rows;
    for (double u : u_grid) {
        auto opt = minimize_theta([&](double th) { return log_bound(u, th); }, lo, hi);
        if (!rows.empty()) {
            const double prev = log_bound(u, rows.back().theta_star);
            if (prev < opt.log_bound) opt = {rows.back().theta_star, std::exp(prev), prev};
        }
        BoundRow row;
        row.u = u;
        row.theta_star = opt.theta;
        row.log_bound = opt.log_bound;
        row.bound = std::exp(opt.log_bound);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace detail

inline BoundReport build_report(const SpectralMeasure& m, const ProblemSpec& spec, const BoundRequest& req) {
    spec.validate();
    if (req.u_grid.empty()) throw ConfigError("u_grid must not be empty");
    for (std::size_t i = 0; i < req.u_grid.size(); ++i) {
        if (!(req.u_grid[i] > 0.0)) throw ConfigError("u_grid entries must be positive");
        if (i > 0 && !(req.u_grid[i] > req.u_grid[i - 1])) throw ConfigError("u_grid must be strictly increasing");
    }

    const auto adm = admissibility_integral(req.z, req.phi, req.admissibility_eps);
    if (!adm.admissible) {
        throw PreconditionError("Z is not admissible for phi: " + adm.message);
    }

    BoundReport rep;
    rep.fingerprint = fingerprint(m, spec);
    rep.admissibility_integral = adm.integral;
    rep.existence_integral = check_existence(m, spec, req.z);
    rep.negative_atoms = m.has_negative_atoms();
    rep.c_z = compute_CZ(m, spec, req.z);
    rep.gamma_upper = gamma_upper(m, spec.c_y);
    rep.eps0_grid = eps0_grid(m, spec);
    rep.eps0 = req.eps0_mode == Eps0Mode::Grid ? rep.eps0_grid : rep.gamma_upper;
    rep.eps0_discrepancy = std::abs(rep.eps0_grid - rep.gamma_upper) > 0.1 * rep.gamma_upper;
    rep.gamma0 = gamma0(req.z, spec.c_y, rep.c_z, spec.rect);

    BoundSetup setup;
    setup.phi = req.phi;
    setup.z = req.z;
    setup.r = req.r;
    setup.rect = spec.rect;
    setup.c_y = spec.c_y;
    setup.c_z = rep.c_z;
    setup.eps0 = rep.eps0;

    const auto closed = closed_form_for(req.phi, req.z, spec.c_y);
    if (req.method == MethodRequest::Closed && !closed) {
        throw PreconditionError("no closed form matches phi = " + req.phi.name() + ", Z = " + req.z.name());
    }
    const bool use_closed = closed && req.method != MethodRequest::Generic;
    rep.method = use_closed ? *closed : Method::Generic;

    if (rep.eps0 == 0.0) {
        for (double u : req.u_grid) rep.rows.push_back({u, 0.5, 0.0, -std::numeric_limits<double>::infinity(), {}});
        rep.theta_star = 0.5;
        return rep;
    }

    const BoundPipeline generic(setup);
    auto generic_log = [&](double u, double th) { return generic.log_tail_bound(u, th); };

    if (use_closed) {
        const detail::ClosedFormEvaluator eval(*closed, setup);
        rep.rows = detail::sweep(req.u_grid, eval, kThetaMin, eval.hi());
        const auto generic_rows = detail::sweep(req.u_grid, generic_log, kThetaMin, kThetaMax);
        for (std::size_t i = 0; i < rep.rows.size(); ++i) rep.rows[i].generic_bound = generic_rows[i].bound;
    } else {
        rep.rows = detail::sweep(req.u_grid, generic_log, kThetaMin, kThetaMax);
    }
    rep.theta_star = rep.rows.back().theta_star;
    return rep;
}

}  // namespace supbound
