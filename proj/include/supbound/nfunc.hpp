// SPDX-License-Identifier: MIT
//
// Orlicz N-functions satisfying Condition Q, their Young-Fenchel conjugates
// and inverses on [0, inf).
#pragma once

#include "supbound/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

namespace supbound {

class NFunction {
public:
    enum class Family {
        PowerAlpha,          // |x|^a / a, 1 < a <= 2
        PiecewisePower,      // x^2 / a on |x| <= 1, |x|^a / a beyond, a > 2
        ExpAbs,              // exp|x| - |x| - 1
        GaussianHalfSquare,  // x^2 / 2
    };

    static NFunction power_alpha(double alpha) {
        if (!(alpha > 1.0 && alpha <= 2.0)) {
            throw DomainError("power_alpha: alpha must lie in (1, 2], got " + std::to_string(alpha));
        }
        return NFunction(Family::PowerAlpha, alpha);
    }

    static NFunction piecewise_power(double alpha) {
        if (!(alpha > 2.0) || !std::isfinite(alpha)) {
            throw DomainError("piecewise_power: alpha must exceed 2, got " + std::to_string(alpha));
        }
        return NFunction(Family::PiecewisePower, alpha);
    }

    static NFunction exp_abs() { return NFunction(Family::ExpAbs, 0.0); }
    static NFunction gaussian() { return NFunction(Family::GaussianHalfSquare, 2.0); }

    Family family() const noexcept { return family_; }
    // Shape exponent; 2 for the Gaussian family, 0 for ExpAbs.
    double alpha() const noexcept { return alpha_; }

    // Conjugate exponent gamma with 1/alpha + 1/gamma = 1 (PowerAlpha and Gaussian only).
    double conjugate_exponent() const {
        if (family_ != Family::PowerAlpha && family_ != Family::GaussianHalfSquare) {
            throw DomainError("conjugate_exponent: defined for power families only");
        }
        return alpha_ / (alpha_ - 1.0);
    }

    std::string name() const {
        switch (family_) {
            case Family::PowerAlpha: return "power_alpha";
            case Family::PiecewisePower: return "piecewise_power";
            case Family::ExpAbs: return "exp_abs";
            case Family::GaussianHalfSquare: return "gaussian";
        }
        return "unknown";
    }

    friend bool operator==(const NFunction&, const NFunction&) = default;

private:
    NFunction(Family family, double alpha) : family_(family), alpha_(alpha) {}

    Family family_;
    double alpha_;
};

namespace detail {

// exp(a) - a - 1 without cancellation for small a >= 0.
inline double exp_minus_linear(double a) {
    if (a < 1e-2) {
        double term = a * a / 2.0;
        double sum = term;
        for (int n = 3; n <= 10; ++n) {
            term *= a / n;
            sum += term;
        }
        return sum;
    }
    return std::expm1(a) - a;
}

// (a + 1) ln(a + 1) - a for a >= 0, series near zero.
inline double entropy_like(double a) {
    if (a < 1e-2) {
        double sum = 0.0;
        double power = a;
        for (int n = 2; n <= 10; ++n) {
            power *= a;
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            sum += sign * power / (n * (n - 1.0));
        }
        return sum;
    }
    return (a + 1.0) * std::log1p(a) - a;
}

}  // namespace detail

inline double eval_phi(const NFunction& f, double x) {
    const double a = std::abs(x);
    switch (f.family()) {
        case NFunction::Family::PowerAlpha:
            return std::pow(a, f.alpha()) / f.alpha();
        case NFunction::Family::PiecewisePower:
            return a <= 1.0 ? a * a / f.alpha() : std::pow(a, f.alpha()) / f.alpha();
        case NFunction::Family::ExpAbs:
            return detail::exp_minus_linear(a);
        case NFunction::Family::GaussianHalfSquare:
            return 0.5 * a * a;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Right derivative phi'(x); odd in x.
inline double eval_phi_prime(const NFunction& f, double x) {
    const double a = std::abs(x);
    const double s = x < 0.0 ? -1.0 : 1.0;
    switch (f.family()) {
        case NFunction::Family::PowerAlpha:
            return s * std::pow(a, f.alpha() - 1.0);
        case NFunction::Family::PiecewisePower:
            return s * (a < 1.0 ? 2.0 * a / f.alpha() : std::pow(a, f.alpha() - 1.0));
        case NFunction::Family::ExpAbs:
            return s * std::expm1(a);
        case NFunction::Family::GaussianHalfSquare:
            return x;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Young-Fenchel conjugate sup_y (x y - phi(y)) computed numerically.
///
/// The objective is concave in y, so a log-spaced scan locates the maximiser
/// to within one grid cell and a golden-section search finishes it.
inline double numeric_conjugate(const NFunction& f, double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    auto gain = [&](double y) { return ax * y - eval_phi(f, y); };

    // Superlinear growth guarantees phi(y) >= 2 |x| y eventually; past that
    // point the objective is negative.
    double y_hi = 1.0;
    for (int i = 0; i < 2100 && eval_phi(f, y_hi) < 2.0 * ax * y_hi; ++i) y_hi *= 2.0;

    constexpr int kGrid = 256;
    const double log_lo = std::log(y_hi) - 12.0 * std::log(10.0);
    const double log_step = (std::log(y_hi) - log_lo) / (kGrid - 1);
    auto node = [&](int k) { return k < 0 ? 0.0 : std::exp(log_lo + log_step * k); };

    int best = -1;
    double best_val = 0.0;  // gain(0)
    for (int k = 0; k < kGrid; ++k) {
        const double v = gain(node(k));
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }

    double lo = node(best - 1);
    double hi = best + 1 < kGrid ? node(best + 1) : y_hi;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double gc = gain(c);
    double gd = gain(d);
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(hi, 1e-300); ++it) {
        if (gc > gd) {
            hi = d;
            d = c;
            gd = gc;
            c = hi - inv_phi * (hi - lo);
            gc = gain(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + inv_phi * (hi - lo);
            gd = gain(d);
        }
    }
    return std::max({best_val, gc, gd, gain(0.5 * (lo + hi))});
}

inline double eval_phi_star(const NFunction& f, double x) {
    const double a = std::abs(x);
    switch (f.family()) {
        case NFunction::Family::PowerAlpha: {
            const double g = f.conjugate_exponent();
            return std::pow(a, g) / g;
        }
        case NFunction::Family::ExpAbs:
            return detail::entropy_like(a);
        case NFunction::Family::GaussianHalfSquare:
            return 0.5 * a * a;
        case NFunction::Family::PiecewisePower:
            return numeric_conjugate(f, a);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Nonnegative x with phi(x) = y.
inline double eval_phi_inv(const NFunction& f, double y) {
    if (!(y >= 0.0)) throw DomainError("eval_phi_inv: argument must be nonnegative");
    if (y == 0.0) return 0.0;
    switch (f.family()) {
        case NFunction::Family::PowerAlpha:
            return std::pow(f.alpha() * y, 1.0 / f.alpha());
        case NFunction::Family::PiecewisePower:
            return y * f.alpha() <= 1.0 ? std::sqrt(f.alpha() * y) : std::pow(f.alpha() * y, 1.0 / f.alpha());
        case NFunction::Family::GaussianHalfSquare:
            return std::sqrt(2.0 * y);
        case NFunction::Family::ExpAbs: {
            if (std::isinf(y)) return y;
            // phi(L) <= y and phi(L + ln(2L + 2)) >= y with L = log1p(y).
            const double lo = std::log1p(y);
            const double hi = lo + std::log(2.0 * lo + 2.0);
            auto g = [&](double x) { return eval_phi(f, x) - y; };
            if (g(lo) >= 0.0) return lo;
            if (g(hi) <= 0.0) return hi;
            std::uintmax_t iters = 200;
            const auto r = boost::math::tools::toms748_solve(
                g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
            return 0.5 * (r.first + r.second);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace supbound
