#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "cyclores/fields.hpp"
#include "cyclores/quadrature.hpp"
#include "cyclores/vec2.hpp"

namespace cyclores {

struct PhasePoint {
    Vec2 q;
    Vec2 p;
};

inline double phase_bracket(const PhasePoint& z) {
    return std::sqrt(1.0 + norm2(z.q) + norm2(z.p));  // <z>
}

/// Guiding-center decomposition q = c + v^perp.
struct CyclotronDecomposition {
    Vec2 c;  // center: q/2 - p^perp
    Vec2 v;  // velocity: p - q^perp/2; |v| is the cyclotron radius
};

inline CyclotronDecomposition decompose(const PhasePoint& z) {
    return {z.q * 0.5 - perp(z.p), z.p - perp(z.q) * 0.5};
}

inline PhasePoint recompose(const CyclotronDecomposition& d) {
    Vec2 q = d.c + perp(d.v);
    return {q, d.v + perp(q) * 0.5};
}

/// Exact configuration-space flow of the quadratic Hamiltonian:
/// x(t, z) = (c + a_c(t)) + R(-t) (v^perp + a_v(t)).  Affine in z.
inline Vec2 flow_x(const FieldProfile& profile, double t, const PhasePoint& z) {
    DriftIntegrals d = drift_integrals(profile, t);
    CyclotronDecomposition cd = decompose(z);
    return cd.c + d.a_c + rot(-t, perp(cd.v) + d.a_v);
}

/// Same flow with precomputed drift integrals (hot loops).
inline Vec2 flow_x(const DriftIntegrals& d, double t, const PhasePoint& z) {
    CyclotronDecomposition cd = decompose(z);
    return cd.c + d.a_c + rot(-t, perp(cd.v) + d.a_v);
}

/// Strang-split symplectic oracle: half kick by -grad(-<E,q> + V) sampled at
/// the interval midpoint, exact cyclotron rotation of the velocity mode, half
/// kick.  The free part is solved exactly, so the only splitting error is the
/// potential/drive kick; positions converge to flow_x at order dt^2 for V = 0.
inline PhasePoint integrate_flow_oracle(const FieldProfile& profile,
                                        const PotentialSpec& pot, double t,
                                        PhasePoint z0, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("integrate_flow_oracle: dt must be > 0");
    double steps_f = t / dt;
    auto nsteps = (std::int64_t)std::llround(steps_f);
    if (nsteps < 0 || std::abs(steps_f - (double)nsteps) > 1e-9)
        throw std::invalid_argument("integrate_flow_oracle: dt must divide t");
    if (nsteps > (std::int64_t)1e9)
        throw std::invalid_argument("integrate_flow_oracle: step count overflow");

    Vec2 q = z0.q, p = z0.p;
    const double cr = std::cos(dt), sr = std::sin(dt);
    for (std::int64_t k = 0; k < nsteps; ++k) {
        const double tm = k * dt + 0.5 * dt;
        Vec2 kick = profile.E(tm) - pot.gradV(tm, q);
        p += kick * (0.5 * dt);
        // exact Landau drift: c fixed, v -> R(-dt) v
        Vec2 v = p - perp(q) * 0.5;
        Vec2 c = q * 0.5 - perp(p);
        v = {cr * v.x + sr * v.y, -sr * v.x + cr * v.y};
        q = c + perp(v);
        p = v + perp(q) * 0.5;
        kick = profile.E(tm) - pot.gradV(tm, q);
        p += kick * (0.5 * dt);
    }
    return {q, p};
}

/// Classical energy h(t, z) = |v|^2/2 - <E(t), q> + V(t, q).
inline double classical_energy(const FieldProfile& profile, const PotentialSpec& pot,
                               double t, const PhasePoint& z) {
    CyclotronDecomposition d = decompose(z);
    return 0.5 * norm2(d.v) - dot(profile.E(t), z.q) + pot.V(t, z.q);
}

/// Time average of f along the free flow, int_{T1}^{T2} f(t, x(t,z)) dt.
/// Adaptive: the passage of a fast orbit through the support of a decaying f
/// is a spike of width ~1/|v| that fixed-order panels miss.
inline double averaged_symbol(const std::function<double(double, Vec2)>& f,
                              const FieldProfile& profile, double T1, double T2,
                              const PhasePoint& z, double abs_tol = 1e-9) {
    if (!(T1 < T2)) throw std::invalid_argument("averaged_symbol: requires T1 < T2");
    return integrate_adaptive(
        [&](double t) {
            DriftIntegrals d = drift_integrals(profile, t);
            return f(t, flow_x(d, t, z));
        },
        T1, T2, abs_tol);
}

struct SojournScanRow {
    double radius;
    int direction_index;
    double product;  // <z> * f_av(z)
};

/// Fixed direction sample on the unit sphere of phase space.  The first six
/// are structured: pure-center (v = 0), pure-velocity (c = 0) and
/// origin-crossing (p = 0, where |c| = |v| and the orbit passes through the
/// origin region, which is where the supremum of <z> f_av lives).  The rest
/// are seeded uniform directions.
inline std::vector<PhasePoint> scan_directions(std::uint64_t seed = 0x5eed,
                                               int count = 16) {
    std::vector<PhasePoint> dirs;
    auto push_unit = [&](Vec2 q, Vec2 p) {
        double n = std::sqrt(norm2(q) + norm2(p));
        dirs.push_back({q / n, p / n});
    };
    for (Vec2 qhat : {Vec2{1, 0}, Vec2{0, 1}}) {
        push_unit(qhat, perp(qhat) * 0.5);    // pure center
        push_unit(qhat, perp(qhat) * -0.5);   // pure velocity
        push_unit(qhat, {0, 0});              // origin-crossing
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    while ((int)dirs.size() < count) {
        Vec2 q{g(rng), g(rng)}, p{g(rng), g(rng)};
        if (norm2(q) + norm2(p) < 1e-12) continue;
        push_unit(q, p);
    }
    return dirs;
}

/// Per-radius supremum of <z> * f_av over the fixed direction sample.
/// Bounded uniformly in the radius for decaying f.
inline std::vector<SojournScanRow> sojourn_bound_scan(
    const std::function<double(double, Vec2)>& f, const FieldProfile& profile,
    const std::vector<double>& radii, double T1 = 0.0, double T2 = 2.0 * M_PI,
    std::uint64_t seed = 0x5eed) {
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw std::invalid_argument("sojourn_bound_scan: radii must increase");
    auto dirs = scan_directions(seed);
    std::vector<SojournScanRow> rows;
    for (double r : radii) {
        for (int di = 0; di < (int)dirs.size(); ++di) {
            PhasePoint z{dirs[di].q * r, dirs[di].p * r};
            double tol = 1e-9 / std::max(1.0, r);  // spike area shrinks like 1/r
            double fav = averaged_symbol(f, profile, T1, T2, z, tol);
            rows.push_back({r, di, phase_bracket(z) * fav});
        }
    }
    return rows;
}

inline double scan_sup_at_radius(const std::vector<SojournScanRow>& rows, double radius) {
    double m = 0.0;
    for (const auto& r : rows)
        if (r.radius == radius) m = std::max(m, r.product);
    return m;
}

inline void write_sojourn_csv(const std::vector<SojournScanRow>& rows,
                              std::ostream& os) {
    os << "radius,direction_index,product\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", r.radius, r.direction_index,
                      r.product);
        os << buf;
    }
}

}  // namespace cyclores
