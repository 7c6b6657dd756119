#pragma once

#include "fpt/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace fpt::quad {

/// Result of an adaptive integration. `l1` approximates the integral of |f|
/// and is the scale the relative tolerance is measured against, so integrals
/// that cancel to zero (orthogonality checks) still terminate.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    int panels = 0;
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int initial_panels = 1;
    int max_panels = 20000;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    double l1 = std::abs(fc) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        l1 += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    const double value = kronrod * half;
    const double err = std::abs((kronrod - gauss) * half);
    return {a, b, value, err, std::abs(l1 * half)};
}

}  // namespace detail

/// Globally adaptive 7/15 Gauss-Kronrod quadrature on [a, b]. The panel with
/// the largest error estimate is bisected until the summed estimate drops
/// below max(abs_tol, rel_tol * integral of |f|).
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    if (!(b > a)) return {};
    std::priority_queue<detail::Panel> heap;
    const int n0 = std::max(1, opt.initial_panels);
    double value = 0.0, error = 0.0, l1 = 0.0;
    for (int i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * i / n0;
        const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
        auto p = detail::gauss_kronrod15(f, lo, hi);
        value += p.value;
        error += p.error;
        l1 += p.l1;
        heap.push(p);
    }
    int panels = n0;
    while (error > std::max(opt.abs_tol, opt.rel_tol * l1)) {
        if (panels >= opt.max_panels) {
            throw NoConvergence("adaptive quadrature: panel budget exhausted (error " +
                                std::to_string(error) + ")");
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw NoConvergence("adaptive quadrature: panel width underflow");
        }
        const auto left = detail::gauss_kronrod15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
        ++panels;
        if (!std::isfinite(value)) throw NoConvergence("adaptive quadrature: non-finite integrand");
    }
    // Re-sum from the panels; the running totals drift after many updates.
    double v = 0.0, e = 0.0, s = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        s += heap.top().l1;
        heap.pop();
    }
    return {v, e, s, panels};
}

}  // namespace fpt::quad
