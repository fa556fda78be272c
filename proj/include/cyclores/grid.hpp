#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "cyclores/fft.hpp"
#include "cyclores/vec2.hpp"

namespace cyclores {

/// Square periodic grid spanning [-L/2, L/2)^2 with n points per axis.
/// Periodic torus discretization: every propagator piece (phases,
/// translations, rotations, Fourier multipliers) is exactly unitary, so norm
/// conservation is a real invariant and leakage shows up in the boundary-mass
/// guard instead of being silently absorbed.
struct Grid2D {
    int n = 0;
    double L = 0.0;

    Grid2D() = default;
    Grid2D(int n_, double L_, double momentum_budget = 0.0, bool allow_tight = false)
        : n(n_), L(L_) {
        if (n <= 0 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Grid2D: n must be a power of two");
        if (!(L > 0.0)) throw std::invalid_argument("Grid2D: L must be > 0");
        if (momentum_budget > 0.0) {
            const double factor = allow_tight ? 1.0 : 1.5;
            if (nyquist() < factor * momentum_budget)
                throw std::invalid_argument(
                    "Grid2D: Nyquist momentum " + std::to_string(nyquist()) +
                    " below " + std::to_string(factor) + " x budget " +
                    std::to_string(momentum_budget));
        }
    }

    double h() const { return L / n; }
    double dual_spacing() const { return 2.0 * M_PI / L; }
    double nyquist() const { return M_PI * n / L; }

    double coord(int i) const { return (i - n / 2) * h(); }
    /// Signed dual-lattice momentum for FFT index i.
    double momentum(int i) const { return dual_spacing() * (i < n / 2 ? i : i - n); }

    std::size_t size() const { return (std::size_t)n * n; }
    bool operator==(const Grid2D& o) const { return n == o.n && L == o.L; }
};

/// Complex amplitude field on a Grid2D, L2-normalized at construction.
struct WaveFunction {
    Grid2D grid;
    cvector amp;

    WaveFunction() = default;
    explicit WaveFunction(const Grid2D& g) : grid(g), amp(g.size()) {}

    cdouble& at(int ix, int iy) { return amp[(std::size_t)ix * grid.n + iy]; }
    const cdouble& at(int ix, int iy) const { return amp[(std::size_t)ix * grid.n + iy]; }

    double norm2() const {
        double s = 0.0;
        for (const auto& a : amp) s += std::norm(a);
        return s * grid.h() * grid.h();
    }
    double norm() const { return std::sqrt(norm2()); }

    void scale(cdouble s) {
        for (auto& a : amp) a *= s;
    }
    void normalize() { scale(1.0 / norm()); }

    /// Mass on the outermost 4-cell frame, times h^2.
    double boundary_mass() const {
        const int n = grid.n;
        double s = 0.0;
        auto add = [&](int ix, int iy) { s += std::norm(at(ix, iy)); };
        for (int ix = 0; ix < n; ++ix)
            for (int iy : {0, 1, 2, 3, n - 4, n - 3, n - 2, n - 1}) add(ix, iy);
        for (int iy = 4; iy < n - 4; ++iy)
            for (int ix : {0, 1, 2, 3, n - 4, n - 3, n - 2, n - 1}) add(ix, iy);
        return s * grid.h() * grid.h();
    }
};

/// h^2 sum conj(psi) * phi.
inline cdouble inner(const WaveFunction& psi, const WaveFunction& phi) {
    if (!(psi.grid == phi.grid)) throw std::invalid_argument("inner: grid mismatch");
    cdouble s = 0.0;
    for (std::size_t i = 0; i < psi.amp.size(); ++i)
        s += std::conj(psi.amp[i]) * phi.amp[i];
    return s * (psi.grid.h() * psi.grid.h());
}

/// Normalized Gaussian packet exp(-|q-q0|^2/4 sigma^2) exp(i<p0,q>), so that
/// <q> = q0 and <D> = p0.  Rejects placements closer than 6 sigma to the
/// boundary (periodic wrap-around would corrupt the tails).
inline WaveFunction make_gaussian(const Grid2D& grid, Vec2 q0, Vec2 p0, double sigma,
                                  double boundary_guard = 1e-9) {
    if (!(sigma > 0.0)) throw std::invalid_argument("make_gaussian: sigma must be > 0");
    const double margin = 6.0 * sigma;
    if (std::abs(q0.x) > grid.L / 2 - margin || std::abs(q0.y) > grid.L / 2 - margin)
        throw std::invalid_argument("make_gaussian: q0 violates the 6-sigma margin");
    WaveFunction psi(grid);
    const double inv4s2 = 1.0 / (4.0 * sigma * sigma);
    for (int ix = 0; ix < grid.n; ++ix) {
        const double x = grid.coord(ix);
        for (int iy = 0; iy < grid.n; ++iy) {
            const double y = grid.coord(iy);
            const double dx = x - q0.x, dy = y - q0.y;
            const double r2 = dx * dx + dy * dy;
            psi.at(ix, iy) = std::polar(std::exp(-r2 * inv4s2), p0.x * x + p0.y * y);
        }
    }
    psi.normalize();
    if (psi.boundary_mass() > boundary_guard)
        throw std::invalid_argument("make_gaussian: boundary mass above guard threshold");
    return psi;
}

/// e^{i theta} e^{i<a,q>} e^{i<b,D>}: translation (psi(q) -> psi(q+b)) via
/// Fourier phases, then plane-wave multiplication, then the global phase.
/// Exactly unitary on the torus for any real a, b.
inline WaveFunction apply_phase_translation(const WaveFunction& psi, Vec2 a, Vec2 b,
                                            double theta) {
    WaveFunction out = psi;
    const int n = psi.grid.n;
    if (b.x != 0.0 || b.y != 0.0) {
        fft_forward(out.amp, n);
        for (int ix = 0; ix < n; ++ix) {
            const double px = psi.grid.momentum(ix);
            for (int iy = 0; iy < n; ++iy) {
                const double py = psi.grid.momentum(iy);
                out.at(ix, iy) *= std::polar(1.0, b.x * px + b.y * py);
            }
        }
        fft_inverse(out.amp, n);
    }
    for (int ix = 0; ix < n; ++ix) {
        const double x = psi.grid.coord(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double y = psi.grid.coord(iy);
            out.at(ix, iy) *= std::polar(1.0, a.x * x + a.y * y + theta);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// State dump: 32-byte header (magic "CYRS", u32 n, f64 L, zero padding), then
// interleaved re/im doubles, row-major, little-endian.
// ---------------------------------------------------------------------------

inline void dump_state(const WaveFunction& psi, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dump_state: cannot open " + path);
    char header[32] = {};
    std::memcpy(header, "CYRS", 4);
    std::uint32_t n = (std::uint32_t)psi.grid.n;
    std::memcpy(header + 4, &n, 4);
    std::memcpy(header + 8, &psi.grid.L, 8);
    os.write(header, 32);
    os.write(reinterpret_cast<const char*>(psi.amp.data()),
             (std::streamsize)(psi.amp.size() * sizeof(cdouble)));
}

inline WaveFunction load_state(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_state: cannot open " + path);
    char header[32] = {};
    is.read(header, 32);
    if (std::memcmp(header, "CYRS", 4) != 0)
        throw std::runtime_error("load_state: bad magic in " + path);
    std::uint32_t n = 0;
    double L = 0.0;
    std::memcpy(&n, header + 4, 4);
    std::memcpy(&L, header + 8, 8);
    WaveFunction psi(Grid2D((int)n, L));
    is.read(reinterpret_cast<char*>(psi.amp.data()),
            (std::streamsize)(psi.amp.size() * sizeof(cdouble)));
    if (!is) throw std::runtime_error("load_state: truncated file " + path);
    return psi;
}

}  // namespace cyclores
