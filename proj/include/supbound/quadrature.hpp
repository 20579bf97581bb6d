// SPDX-License-Identifier: MIT
//
// Adaptive Gauss-Kronrod quadrature and a dyadic test for integrals that are
// improper at the left endpoint zero.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace supbound::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule.
template <class F>
Estimate gk15(const F& f, double a, double b) {
    static constexpr std::array<double, 8> xk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = wk[7] * fc;
    double gauss = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xk[j];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += wk[j] * pair;
        if (j % 2 == 1) gauss += wg[j / 2] * pair;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

struct Interval {
    double a, b;
    Estimate est;
    bool operator<(const Interval& o) const { return est.error < o.est.error; }
};

}  // namespace detail

// Globally adaptive bisection on the interval with the largest error estimate.
template <class F>
Estimate integrate(const F& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                   int max_intervals = 4000) {
    if (a == b) return {};
    std::priority_queue<detail::Interval> heap;
    Estimate total = detail::gk15(f, a, b);
    heap.push({a, b, total});
    for (int n = 1; n < max_intervals; ++n) {
        if (total.error <= std::max(abs_tol, rel_tol * std::abs(total.value))) break;
        const auto worst = heap.top();
        if (worst.est.error == 0.0) break;
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);
            break;
        }
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push({worst.a, mid, left});
        heap.push({mid, worst.b, right});
    }
    // Re-sum to shed accumulated update round-off.
    Estimate sum;
    while (!heap.empty()) {
        sum.value += heap.top().est.value;
        sum.error += heap.top().est.error;
        heap.pop();
    }
    return sum;
}

struct ImproperResult {
    double value = 0.0;  // extrapolated integral over (0, upper]
    bool converged = false;
    int refinements = 0;
    std::vector<double> partial;  // accelerated partial integrals, one per level
};

/// Integral over (0, upper] of a function that may be singular at zero.
///
/// Level k integrates over [upper 2^-k, upper]. Each level's partial integral
/// is completed with a geometric tail estimate from the ratio of the last two
/// dyadic pieces. Because the piece ratio itself drifts when the integrand
/// carries a logarithmic factor, the accelerated partials are passed through
/// one Aitken delta-squared step; convergence means two consecutive estimates
/// agree to `tol` relative. Divergent integrands have piece ratios tending to
/// one and never settle.
template <class F>
ImproperResult integrate_from_zero(const F& f, double upper, double tol = 1e-8,
                                   int max_refinements = 40, double piece_rel_tol = 1e-12) {
    ImproperResult out;
    if (!(upper > 0.0)) {
        out.converged = true;
        return out;
    }
    double sum = 0.0;
    double prev_piece = 0.0;
    double prev_est = 0.0;
    double right = upper;
    for (int k = 1; k <= max_refinements; ++k) {
        const double left = 0.5 * right;
        const double piece = integrate(f, left, right, piece_rel_tol, 0.0).value;
        sum += piece;

        double accel = sum;
        if (k >= 2 && prev_piece != 0.0) {
            const double q = piece / prev_piece;
            if (q >= 0.0 && q < 1.0) accel = sum + piece * q / (1.0 - q);
        }
        out.partial.push_back(accel);
        out.refinements = k;

        double est = accel;
        if (k >= 3) {
            const double d1 = out.partial[k - 2] - out.partial[k - 3];
            const double d2 = accel - out.partial[k - 2];
            if (d1 != 0.0) {
                const double r = d2 / d1;
                if (r >= 0.0 && r < 1.0) est = accel + d2 * r / (1.0 - r);
            }
        }
        out.value = est;

        if (!std::isfinite(est)) break;
        if (piece == 0.0 && prev_piece == 0.0 && k >= 2) {
            out.converged = true;
            break;
        }
        if (k >= 4 && std::abs(est - prev_est) <= tol * std::max(std::abs(est), 1e-300)) {
            out.converged = true;
            break;
        }
        prev_est = est;
        prev_piece = piece;
        right = left;
    }
    return out;
}

}  // namespace supbound::quad
