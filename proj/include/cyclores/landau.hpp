#pragma once

#include <cmath>
#include <stdexcept>

#include "cyclores/fft.hpp"
#include "cyclores/grid.hpp"

namespace cyclores {

// e^{-i t H_La} factorizes as (image rotation by t/2) o (isotropic oscillator
// of frequency 1/2 for time t), since H_La = H_ho - L_z/2 with
// H_ho = D^2/2 + q^2/8 and [H_ho, L_z] = 0.  Both factors have exact grid
// realizations, so the only discretization error is torus wrap-around where
// the state has no mass.

namespace detail {

/// Multiply by exp(-i g |q|^2) in position space.
inline void chirp_inplace(WaveFunction& psi, double g) {
    const int n = psi.grid.n;
    for (int ix = 0; ix < n; ++ix) {
        const double x = psi.grid.coord(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double y = psi.grid.coord(iy);
            psi.at(ix, iy) *= std::polar(1.0, -g * (x * x + y * y));
        }
    }
}

/// Multiply by exp(-i s |p|^2) in momentum space.
inline void fourier_multiplier_inplace(WaveFunction& psi, double s) {
    const int n = psi.grid.n;
    fft_forward(psi.amp, n);
    for (int ix = 0; ix < n; ++ix) {
        const double px = psi.grid.momentum(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double py = psi.grid.momentum(iy);
            psi.at(ix, iy) *= std::polar(1.0, -s * (px * px + py * py));
        }
    }
    fft_inverse(psi.amp, n);
}

}  // namespace detail

/// Exact single application of e^{-i t H_ho} for |t| <= pi/2 via the
/// chirp / free-flight / chirp factorization of the Mehler kernel:
///   e^{-i t H_ho} = e^{-i (tan(t/4)/4) q^2} e^{-i sin(t/2) D^2} e^{-i (tan(t/4)/4) q^2}.
inline void oscillator_substep_inplace(WaveFunction& psi, double t) {
    if (t == 0.0) return;
    if (std::abs(t) > 0.5 * M_PI + 1e-12)
        throw std::invalid_argument("oscillator_substep: |t| must be <= pi/2");
    const double g = 0.25 * std::tan(0.25 * t);
    const double s = std::sin(0.5 * t);
    detail::chirp_inplace(psi, g);
    detail::fourier_multiplier_inplace(psi, s);
    detail::chirp_inplace(psi, g);
}

/// e^{-i t H_ho} for any t in [0, 2*pi) by composing capped substeps.
inline void oscillator_inplace(WaveFunction& psi, double t) {
    int m = std::max(1, (int)std::ceil(std::abs(t) / (0.5 * M_PI) - 1e-12));
    for (int k = 0; k < m; ++k) oscillator_substep_inplace(psi, t / m);
}

// --- rotations -------------------------------------------------------------

/// out(q) = in(-q): exact permutation (rotation by pi).
inline void rotate_parity_inplace(WaveFunction& psi) {
    const int n = psi.grid.n;
    WaveFunction tmp = psi;
    for (int ix = 0; ix < n; ++ix) {
        const int jx = (n - ix) % n;
        for (int iy = 0; iy < n; ++iy)
            psi.at(ix, iy) = tmp.at(jx, (n - iy) % n);
    }
}

/// out(q) = in(R(pi/2) q), an exact index permutation.
inline void rotate_quarter_inplace(WaveFunction& psi) {
    const int n = psi.grid.n;
    WaveFunction tmp = psi;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            psi.at(ix, iy) = tmp.at((n - iy) % n, ix);
}

namespace detail {

/// out(x, y) = in(x + a y, y): per-row Fourier translation along x.
inline void shear_x_inplace(WaveFunction& psi, double a) {
    if (a == 0.0) return;
    const int n = psi.grid.n;
    fft_forward(psi.amp, n, FftAxis::Cols);
    for (int ix = 0; ix < n; ++ix) {
        const double kx = psi.grid.momentum(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double y = psi.grid.coord(iy);
            psi.at(ix, iy) *= std::polar(1.0, kx * a * y);
        }
    }
    fft_inverse(psi.amp, n, FftAxis::Cols);
}

/// out(x, y) = in(x, y + b x): per-column Fourier translation along y.
inline void shear_y_inplace(WaveFunction& psi, double b) {
    if (b == 0.0) return;
    const int n = psi.grid.n;
    fft_forward(psi.amp, n, FftAxis::Rows);
    for (int ix = 0; ix < n; ++ix) {
        const double x = psi.grid.coord(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double ky = psi.grid.momentum(iy);
            psi.at(ix, iy) *= std::polar(1.0, ky * b * x);
        }
    }
    fft_inverse(psi.amp, n, FftAxis::Rows);
}

}  // namespace detail

/// out(q) = in(R(angle) q) for any angle: exact permutations for multiples of
/// pi/2, three Fourier shears for the residual (|r| <= pi/4, so the shear
/// coefficients stay small and unitary resampling is well conditioned).
inline void rotate_field_inplace(WaveFunction& psi, double angle) {
    double a = std::remainder(angle, 2.0 * M_PI);
    int quarters = (int)std::lround(a / (0.5 * M_PI));
    double r = a - quarters * 0.5 * M_PI;
    quarters = ((quarters % 4) + 4) % 4;
    if (quarters == 2) {
        rotate_parity_inplace(psi);
    } else {
        for (int k = 0; k < quarters; ++k) rotate_quarter_inplace(psi);
    }
    if (r != 0.0) {
        const double alpha = -std::tan(0.5 * r);
        const double beta = std::sin(r);
        detail::shear_x_inplace(psi, alpha);
        detail::shear_y_inplace(psi, beta);
        detail::shear_x_inplace(psi, alpha);
    }
}

/// e^{-i t H_La}.  Landau periodicity e^{-i 2 pi H_La} = -1 reduces t into
/// [0, 2*pi); rejects |t| > 4*pi per call (compose for longer times).
inline void apply_landau_inplace(WaveFunction& psi, double t) {
    if (std::abs(t) > 4.0 * M_PI + 1e-12)
        throw std::invalid_argument("apply_landau: |t| > 4*pi; compose shorter steps");
    double k = std::floor(t / (2.0 * M_PI));
    double r = t - 2.0 * M_PI * k;
    if (r >= 2.0 * M_PI) {  // guard the K*2pi edge
        r -= 2.0 * M_PI;
        k += 1.0;
    }
    if ((std::int64_t)k % 2 != 0) psi.scale(-1.0);
    if (r == 0.0) return;
    oscillator_inplace(psi, r);
    rotate_field_inplace(psi, 0.5 * r);
}

inline WaveFunction apply_landau(const WaveFunction& psi, double t) {
    WaveFunction out = psi;
    apply_landau_inplace(out, t);
    return out;
}

}  // namespace cyclores
