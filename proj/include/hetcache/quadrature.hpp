#pragma once

#include <array>
#include <cmath>
#include <utility>

namespace hetcache::quad {

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double kronrod;
    double error;
};

template <class F>
Panel gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * sum;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
double adapt(F& f, double a, double b, Panel whole, double abs_tol, int depth) {
    if (whole.error <= abs_tol || depth == 0) return whole.kronrod;
    const double mid = 0.5 * (a + b);
    const Panel left = gk15(f, a, mid);
    const Panel right = gk15(f, mid, b);
    return adapt(f, a, mid, left, 0.5 * abs_tol, depth - 1) +
           adapt(f, mid, b, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G7/K15) integral of f over the finite interval [a, b].
/// A panel is accepted when its |K15 - G7| estimate falls below its share of
/// max(abs_tol, rel_tol * |coarse estimate|).
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0,
                 int max_depth = 40) {
    if (a == b) return 0.0;
    const detail::Panel whole = detail::gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole.kronrod));
    return detail::adapt(f, a, b, whole, tol, max_depth);
}

}  // namespace hetcache::quad
