// SPDX-License-Identifier: MIT
//
// Admissible functions Z for the space Sub_phi(Omega): the Hoelder profile of
// the solution field is 1 / Z(1/h + u0).
#pragma once

#include "supbound/errors.hpp"
#include "supbound/nfunc.hpp"
#include "supbound/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace supbound {

class AdmissibleFn {
public:
    enum class Family {
        Power,     // u^rho, 0 < rho <= 1, u0 = 0
        LogPower,  // ln^alpha(u + 1), alpha > 1, u0 = e^alpha - 1
    };

    static AdmissibleFn power(double rho) {
        if (!(rho > 0.0 && rho <= 1.0)) {
            throw DomainError("power Z: rho must lie in (0, 1], got " + std::to_string(rho));
        }
        return AdmissibleFn(Family::Power, rho, 0.0);
    }

    static AdmissibleFn log_power(double alpha) {
        if (!(alpha > 1.0) || !std::isfinite(alpha)) {
            throw DomainError("log_power Z: alpha must exceed 1, got " + std::to_string(alpha));
        }
        return AdmissibleFn(Family::LogPower, alpha, std::expm1(alpha));
    }

    Family family() const noexcept { return family_; }
    // rho for Power, alpha for LogPower.
    double param() const noexcept { return param_; }
    double u0() const noexcept { return u0_; }

    std::string name() const { return family_ == Family::Power ? "power" : "log_power"; }

    friend bool operator==(const AdmissibleFn&, const AdmissibleFn&) = default;

private:
    AdmissibleFn(Family family, double param, double u0) : family_(family), param_(param), u0_(u0) {}

    Family family_;
    double param_;
    double u0_;
};

inline double eval_Z(const AdmissibleFn& z, double u) {
    if (!(u >= 0.0)) throw DomainError("eval_Z: argument must be nonnegative");
    if (z.family() == AdmissibleFn::Family::Power) return std::pow(u, z.param());
    return std::pow(std::log1p(u), z.param());
}

inline double eval_Z_inv(const AdmissibleFn& z, double v) {
    if (!(v >= 0.0)) throw DomainError("eval_Z_inv: argument must be nonnegative");
    if (z.family() == AdmissibleFn::Family::Power) return std::pow(v, 1.0 / z.param());
    return std::expm1(std::pow(v, 1.0 / z.param()));
}

// ln(Z^{-1}(v) - u0), finite even where Z^{-1}(v) overflows; -inf when the
// excess is not positive.
inline double log_Z_inv_excess(const AdmissibleFn& z, double v) {
    if (!(v >= 0.0)) throw DomainError("log_Z_inv_excess: argument must be nonnegative");
    if (z.family() == AdmissibleFn::Family::Power) return std::log(v) / z.param();
    const double w = std::pow(v, 1.0 / z.param());
    const double alpha = z.param();
    if (!(w > alpha)) return -std::numeric_limits<double>::infinity();
    // e^w - e^alpha = e^w (1 - e^(alpha - w))
    return w + std::log(-std::expm1(alpha - w));
}

struct AdmissibilityCheck {
    bool admissible = false;
    double integral = 0.0;
    int refinements = 0;
    std::string message;
};

/// Evaluates int_0^eps Psi(ln(Z^{-1}(1/s) - u0)) ds with Psi(v) = v / phi^{-1}(v)
/// by the dyadic convergence test. Near s = eps the log argument may be
/// nonpositive; there Psi is taken as its limit 0 since only the behaviour at
/// zero decides convergence.
inline AdmissibilityCheck admissibility_integral(const AdmissibleFn& z, const NFunction& f, double eps) {
    if (!(eps > 0.0)) throw DomainError("check_admissible: eps must be positive");
    auto integrand = [&](double s) {
        const double v = log_Z_inv_excess(z, 1.0 / s);
        if (!(v > 0.0)) return 0.0;
        return v / eval_phi_inv(f, v);
    };
    const auto res = quad::integrate_from_zero(integrand, eps, 1e-8, 40);
    AdmissibilityCheck out;
    out.admissible = res.converged;
    out.integral = res.value;
    out.refinements = res.refinements;
    out.message = res.converged ? "admissible" : "not admissible (numerically divergent)";
    return out;
}

inline bool check_admissible(const AdmissibleFn& z, const NFunction& f, double eps) {
    return admissibility_integral(z, f, eps).admissible;
}

// |sin(u/v)| <= Z(|u| + u0) / Z(|v| + u0), the sine inequality behind the
// increment bound.
inline bool sine_bound_holds(const AdmissibleFn& z, double u, double v) {
    if (u == 0.0 || v == 0.0) throw DomainError("sine_bound_holds: u and v must be nonzero");
    const double lhs = std::abs(std::sin(u / v));
    const double rhs = eval_Z(z, std::abs(u) + z.u0()) / eval_Z(z, std::abs(v) + z.u0());
    return lhs <= rhs + 1e-12;
}

}  // namespace supbound
