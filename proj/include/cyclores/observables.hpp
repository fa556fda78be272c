#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclores/fft.hpp"
#include "cyclores/grid.hpp"
#include "cyclores/vec2.hpp"

namespace cyclores {

struct ObservableRecord {
    double t = 0.0;
    Vec2 mean_q, mean_v, mean_c;
    double kinetic = 0.0;        // <H_La> = <v^2>/2
    double norm = 0.0;
    double boundary_mass = 0.0;
    cdouble autocorr = 0.0;      // <psi_0, psi(t)>
};

struct Trajectory {
    std::string scenario_id;
    double period = 0.0;
    std::vector<ObservableRecord> records;
};

struct Expectations {
    Vec2 mean_q, mean_D, mean_v, mean_c;
    double kinetic = 0.0;
    double norm = 0.0;
};

/// Position moments in position space, D-moments and the kinetic energy via
/// Fourier application of D.  The operator identity q = c + v^perp holds at
/// the expectation level by construction of v and c.
inline Expectations expectations(const WaveFunction& psi) {
    const int n = psi.grid.n;
    const double cell = psi.grid.h() * psi.grid.h();
    Expectations e;
    double w = 0.0;
    for (int ix = 0; ix < n; ++ix) {
        const double x = psi.grid.coord(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double m = std::norm(psi.at(ix, iy));
            w += m;
            e.mean_q += Vec2{x, psi.grid.coord(iy)} * m;
        }
    }
    e.norm = std::sqrt(w * cell);
    e.mean_q = e.mean_q / w;

    // v_j psi = D_j psi - (q^perp)_j psi / 2; kinetic = (|v1 psi|^2+|v2 psi|^2)/2
    WaveFunction dx = psi, dy = psi;
    fft_forward(dx.amp, n);
    dy.amp = dx.amp;
    for (int ix = 0; ix < n; ++ix) {
        const double px = psi.grid.momentum(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double py = psi.grid.momentum(iy);
            dx.at(ix, iy) *= px;
            dy.at(ix, iy) *= py;
        }
    }
    fft_inverse(dx.amp, n);
    fft_inverse(dy.amp, n);

    cdouble mdx = 0.0, mdy = 0.0;
    double v2sum = 0.0;
    Vec2 mv{};
    for (int ix = 0; ix < n; ++ix) {
        const double x = psi.grid.coord(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double y = psi.grid.coord(iy);
            const cdouble a = psi.at(ix, iy);
            const cdouble v1 = dx.at(ix, iy) + 0.5 * y * a;   // D1 + q2/2
            const cdouble v2 = dy.at(ix, iy) - 0.5 * x * a;   // D2 - q1/2
            mdx += std::conj(a) * dx.at(ix, iy);
            mdy += std::conj(a) * dy.at(ix, iy);
            mv += Vec2{(std::conj(a) * v1).real(), (std::conj(a) * v2).real()};
            v2sum += std::norm(v1) + std::norm(v2);
        }
    }
    e.mean_D = Vec2{mdx.real(), mdy.real()} / w;
    e.mean_v = mv / w;
    e.kinetic = 0.5 * v2sum / w;
    e.mean_c = e.mean_q * 0.5 - perp(e.mean_D);
    return e;
}

inline ObservableRecord make_record(double t, const WaveFunction& psi,
                                    const WaveFunction& psi0) {
    Expectations e = expectations(psi);
    ObservableRecord r;
    r.t = t;
    r.mean_q = e.mean_q;
    r.mean_v = e.mean_v;
    r.mean_c = e.mean_c;
    r.kinetic = e.kinetic;
    r.norm = e.norm;
    r.boundary_mass = psi.boundary_mass();
    r.autocorr = inner(psi0, psi);
    return r;
}

// ---------------------------------------------------------------------------
// Series analysis
// ---------------------------------------------------------------------------

inline std::vector<cdouble> autocorrelation_series(const Trajectory& traj) {
    std::vector<cdouble> s;
    s.reserve(traj.records.size());
    for (const auto& r : traj.records) s.push_back(r.autocorr);
    return s;
}

enum class SpectralLabel { AcLike, PpLike, Mixed };

inline const char* to_string(SpectralLabel s) {
    switch (s) {
        case SpectralLabel::AcLike: return "ac_like";
        case SpectralLabel::PpLike: return "pp_like";
        default: return "mixed";
    }
}

/// Cesaro mean M_N = (1/N) sum_{n=1..N} |a_n|^2 of the return probabilities.
inline double cesaro_mean(const std::vector<cdouble>& series, std::size_t N) {
    if (N + 1 > series.size())
        throw std::invalid_argument("cesaro_mean: series too short");
    double s = 0.0;
    for (std::size_t k = 1; k <= N; ++k) s += std::norm(series[k]);
    return s / (double)N;
}

/// RAGE-style heuristic: decaying Cesaro mean means transport (a.c.-like),
/// a persistent one means recurrences (pp-like).  Thresholds are artifact
/// conventions, not sharp constants.
inline SpectralLabel spectral_classify(const std::vector<cdouble>& series,
                                       double threshold_low = 0.01,
                                       double threshold_high = 0.2) {
    if (series.size() < 17)
        throw std::invalid_argument("spectral_classify: need series length >= 16");
    const std::size_t N = series.size() - 1;
    const double mN = cesaro_mean(series, N);
    const double mHalf = cesaro_mean(series, N / 2);
    // Trend comparisons carry a 5% relative slack: quasi-periodic return
    // probabilities make the Cesaro mean converge with small oscillations.
    if (mN < threshold_low && mN <= mHalf * 1.05 + 1e-12) return SpectralLabel::AcLike;
    if (mN > threshold_high && mN >= mHalf * 0.95) return SpectralLabel::PpLike;
    return SpectralLabel::Mixed;
}

struct VelocityEstimate {
    Vec2 v;
    Vec2 stderr;  // residual-based slope uncertainty per component
};

/// Least-squares slope of mean_q(nT) against nT over the second half of the
/// trajectory (the predictions are long-time limits; the early transient is
/// dropped).
inline VelocityEstimate asymptotic_velocity_estimate(const Trajectory& traj) {
    const auto& rec = traj.records;
    if (rec.size() < 9)
        throw std::invalid_argument("asymptotic_velocity_estimate: need >= 8 periods");
    const std::size_t start = (rec.size() - 1) / 2;
    const std::size_t m = rec.size() - start;
    double tbar = 0.0;
    for (std::size_t i = start; i < rec.size(); ++i) tbar += rec[i].t;
    tbar /= (double)m;
    double sxx = 0.0;
    Vec2 sxy{}, ybar{};
    for (std::size_t i = start; i < rec.size(); ++i) {
        const double dt = rec[i].t - tbar;
        sxx += dt * dt;
        sxy += rec[i].mean_q * dt;
        ybar += rec[i].mean_q;
    }
    ybar = ybar / (double)m;
    VelocityEstimate est;
    est.v = sxy / sxx;
    Vec2 ss{};
    for (std::size_t i = start; i < rec.size(); ++i) {
        const double dt = rec[i].t - tbar;
        Vec2 resid = rec[i].mean_q - ybar - est.v * dt;
        ss += Vec2{resid.x * resid.x, resid.y * resid.y};
    }
    const double dof = std::max(1.0, (double)m - 2.0);
    est.stderr = {std::sqrt(ss.x / dof / sxx), std::sqrt(ss.y / dof / sxx)};
    return est;
}

struct GrowthFit {
    double rho_hat = 0.0;
    bool resonant_scenario = true;
};

/// Quadratic-coefficient fit of kinetic(nT) against t = nT:
/// kinetic ~ rho * t^2 + b t + c.  For a non-resonant trajectory the fit is
/// still returned, flagged, and expected to be ~0.
inline GrowthFit energy_growth_fit(const Trajectory& traj, bool resonant = true) {
    const auto& rec = traj.records;
    if (rec.size() < 9) throw std::invalid_argument("energy_growth_fit: need >= 8 periods");
    // normal equations for [t^2, t, 1]
    double s4 = 0, s3 = 0, s2 = 0, s1 = 0, s0 = 0;
    double b2 = 0, b1 = 0, b0 = 0;
    for (const auto& r : rec) {
        const double t = r.t, t2 = t * t;
        s4 += t2 * t2; s3 += t2 * t; s2 += t2; s1 += t; s0 += 1.0;
        b2 += t2 * r.kinetic; b1 += t * r.kinetic; b0 += r.kinetic;
    }
    // solve 3x3 by Cramer
    auto det3 = [](double a, double b, double c, double d, double e, double f,
                   double g, double h, double i) {
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    };
    const double D = det3(s4, s3, s2, s3, s2, s1, s2, s1, s0);
    if (D == 0.0) throw std::runtime_error("energy_growth_fit: singular fit");
    const double Da = det3(b2, s3, s2, b1, s2, s1, b0, s1, s0);
    return {Da / D, resonant};
}

/// For a pp-like state the asymptotic velocity must vanish; returns the
/// magnitude of the fitted drift.
inline double virial_check(const Trajectory& traj) {
    return norm(asymptotic_velocity_estimate(traj).v);
}

}  // namespace cyclores
