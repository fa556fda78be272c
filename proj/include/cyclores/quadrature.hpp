#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace cyclores {

namespace detail {

// 64-point Gauss-Legendre nodes/weights on [-1,1], computed once by Newton
// iteration on the Legendre recurrence (accurate to ~1e-15).
struct GaussLegendre64 {
    std::array<double, 64> node{};
    std::array<double, 64> weight{};

    GaussLegendre64() {
        constexpr int n = 64;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                double dx = p0 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            node[i] = -x;
            node[n - 1 - i] = x;
            weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }
};

inline const GaussLegendre64& gl64() {
    static const GaussLegendre64 table;
    return table;
}

}  // namespace detail

/// Composite 64-node Gauss-Legendre quadrature with segments of length <= max_seg.
/// Spectrally accurate for integrands smooth on the segment scale.
template <typename F>
auto integrate_gl(F&& f, double t0, double t1, double max_seg = 2.0 * M_PI)
    -> decltype(f(0.0) * 1.0) {
    const auto& gl = detail::gl64();
    using R = decltype(f(0.0) * 1.0);
    if (t0 == t1) return f(t0) * 0.0;
    int nseg = std::max(1, (int)std::ceil(std::abs(t1 - t0) / max_seg));
    R total = f(t0) * 0.0;
    for (int s = 0; s < nseg; ++s) {
        const double a = t0 + (t1 - t0) * s / nseg;
        const double b = t0 + (t1 - t0) * (s + 1) / nseg;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < 64; ++i)
            total += f(mid + half * gl.node[i]) * (half * gl.weight[i]);
    }
    return total;
}

/// Adaptive quadrature (bisected GL16-style via GL64 panel vs two halves).
/// Needed for integrands with localized features whose width shrinks with the
/// orbit scale, e.g. time averages of decaying symbols along fast orbits.
template <typename F>
double integrate_adaptive(F&& f, double t0, double t1, double abs_tol = 1e-9,
                          int max_depth = 40) {
    auto panel = [&](double a, double b) {
        const auto& gl = detail::gl64();
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (int i = 0; i < 64; ++i) s += f(mid + half * gl.node[i]) * (half * gl.weight[i]);
        return s;
    };
    std::function<double(double, double, double, double, int)> rec =
        [&](double a, double b, double whole, double tol, int depth) -> double {
        const double m = 0.5 * (a + b);
        const double left = panel(a, m), right = panel(m, b);
        if (depth >= max_depth) return left + right;
        if (std::abs(left + right - whole) <= tol) return left + right;
        return rec(a, m, left, tol * 0.5, depth + 1) +
               rec(m, b, right, tol * 0.5, depth + 1);
    };
    if (t0 == t1) return 0.0;
    return rec(t0, t1, panel(t0, t1), abs_tol, 0);
}

}  // namespace cyclores
