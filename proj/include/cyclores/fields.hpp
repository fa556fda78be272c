#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cyclores/quadrature.hpp"
#include "cyclores/vec2.hpp"

namespace cyclores {

// ---------------------------------------------------------------------------
// Drive profile E(t)
// ---------------------------------------------------------------------------

/// T-periodic homogeneous electric drive.  Times are in units of the inverse
/// cyclotron frequency, so the cyclotron period is 2*pi.
struct FieldProfile {
    double period = 2.0 * M_PI;
    std::function<Vec2(double)> E_eval;
    std::string tag = "custom";

    Vec2 E(double t) const {
        Vec2 e = E_eval ? E_eval(t) : Vec2{0.0, 0.0};
        if (!finite(e)) throw std::invalid_argument("FieldProfile: non-finite E sample");
        return e;
    }

    /// Sampled periodicity check: |E(t+T) - E(t)| <= tol on a uniform scan.
    bool is_periodic(double tol = 1e-10, int samples = 257) const {
        for (int i = 0; i < samples; ++i) {
            double t = period * i / samples;
            if (norm(E(t + period) - E(t)) > tol) return false;
        }
        return true;
    }

    /// Finite-difference continuity scan on [0, T].
    bool is_continuous(double tol = 1e-3, int samples = 4096) const {
        double dt = period / samples;
        for (int i = 0; i < samples; ++i) {
            if (norm(E((i + 1) * dt) - E(i * dt)) > tol) return false;
        }
        return true;
    }
};

// Field presets ----------------------------------------------------------

inline FieldProfile field_zero(double T = 2.0 * M_PI) {
    return {T, [](double) { return Vec2{0.0, 0.0}; }, "zero"};
}

inline FieldProfile field_constant(Vec2 e0, double T = 2.0 * M_PI) {
    return {T, [e0](double) { return e0; }, "constant"};
}

/// E(t) = (A cos(k w t), 0) with w = 2*pi/T; k = 1 at T = 2*pi is the
/// cyclotron-resonant drive.
inline FieldProfile field_cosine(double amplitude, int harmonic = 1,
                                 double T = 2.0 * M_PI) {
    const double w = 2.0 * M_PI / T;
    return {T,
            [amplitude, harmonic, w](double t) {
                return Vec2{amplitude * std::cos(harmonic * w * t), 0.0};
            },
            "cosine"};
}

/// E(t) = E0 + R(-t) E0; resonant at T = 2*pi yet with vanishing asymptotic
/// velocity (the two drift integrals cancel).
inline FieldProfile field_static_plus_rotating(Vec2 e0, double T = 2.0 * M_PI) {
    return {T, [e0](double t) { return e0 + rot(-t, e0); }, "static_plus_rotating"};
}

// ---------------------------------------------------------------------------
// Impurity potential V(t, q)
// ---------------------------------------------------------------------------

enum class DecayClass { VDecays, GradVDecays, Neither };

/// Bounded smooth impurity with analytic gradient.  hessian_bound is a
/// sup-norm bound on the second derivatives (enters the boundedness chain of
/// the stepped propagator contracts; verified by sampling in tests).
struct PotentialSpec {
    std::function<double(double, Vec2)> V_eval;
    std::function<Vec2(double, Vec2)> grad_eval;
    double hessian_bound = 0.0;
    DecayClass decay = DecayClass::Neither;
    std::string tag = "none";
    /// Potential profile center; presets are radial around this point.
    Vec2 center{0.0, 0.0};
    /// True when V(t, R q) = V(t, q) for all rotations about the origin.
    bool rotation_invariant = false;
    /// True when V does not depend on t (all presets).
    bool time_independent = false;
    /// Radii used by the gradient-decay scan (preset-specific, placed on the
    /// envelope of the gradient profile where applicable).
    std::vector<double> decay_test_radii;

    double V(double t, Vec2 q) const { return V_eval ? V_eval(t, q) : 0.0; }
    Vec2 gradV(double t, Vec2 q) const { return grad_eval ? grad_eval(t, q) : Vec2{}; }
    bool empty() const { return !V_eval; }
};

inline PotentialSpec potential_none() { return {}; }

/// V(q) = lambda * sin(ln(1 + |q - c|^2)): bounded, non-decaying, with a
/// gradient that decays like 1/|q|.  The decay-scan radii sit on the peaks of
/// the gradient envelope |cos(ln(1+r^2))| = 1, i.e. r_k = sqrt(e^{k pi} - 1).
inline PotentialSpec potential_radial_log_sin(double lambda, Vec2 center = {0, 0}) {
    PotentialSpec p;
    p.V_eval = [lambda, center](double, Vec2 q) {
        return lambda * std::sin(std::log1p(norm2(q - center)));
    };
    p.grad_eval = [lambda, center](double, Vec2 q) {
        Vec2 d = q - center;
        double r2 = norm2(d);
        return (2.0 * lambda * std::cos(std::log1p(r2)) / (1.0 + r2)) * d;
    };
    p.hessian_bound = 3.0 * std::abs(lambda);
    p.decay = DecayClass::GradVDecays;
    p.tag = "radial_log_sin";
    p.time_independent = true;
    p.center = center;
    p.rotation_invariant = (center.x == 0.0 && center.y == 0.0);
    for (int k = 1; k <= 5; ++k)
        p.decay_test_radii.push_back(std::sqrt(std::exp(k * M_PI) - 1.0));
    return p;
}

/// V(q) = lambda * exp(-|q - c|^2 / 2 w^2): decays together with all its
/// derivatives (the localized-impurity regime).
inline PotentialSpec potential_gaussian_bump(double lambda, double width,
                                             Vec2 center = {0, 0}) {
    if (width <= 0.0) throw std::invalid_argument("gaussian_bump: width must be > 0");
    PotentialSpec p;
    const double w2 = width * width;
    p.V_eval = [lambda, w2, center](double, Vec2 q) {
        return lambda * std::exp(-0.5 * norm2(q - center) / w2);
    };
    p.grad_eval = [lambda, w2, center](double, Vec2 q) {
        Vec2 d = q - center;
        return (-lambda * std::exp(-0.5 * norm2(d) / w2) / w2) * d;
    };
    p.hessian_bound = 2.0 * std::abs(lambda) / w2;
    p.decay = DecayClass::VDecays;
    p.tag = "gaussian_bump";
    p.time_independent = true;
    p.center = center;
    p.rotation_invariant = (center.x == 0.0 && center.y == 0.0);
    p.decay_test_radii = {2.0 * width, 4.0 * width, 6.0 * width, 8.0 * width};
    return p;
}

/// V(q) = lambda * cos(<k, q>): neither V nor grad V decays.  Excluded from
/// the stability regime; kept for negative tests.
inline PotentialSpec potential_plane_wave(double lambda, Vec2 k) {
    PotentialSpec p;
    p.V_eval = [lambda, k](double, Vec2 q) { return lambda * std::cos(dot(k, q)); };
    p.grad_eval = [lambda, k](double, Vec2 q) {
        return (-lambda * std::sin(dot(k, q))) * k;
    };
    p.hessian_bound = std::abs(lambda) * norm2(k);
    p.decay = DecayClass::Neither;
    p.tag = "plane_wave";
    p.time_independent = true;
    p.rotation_invariant = false;
    p.decay_test_radii = {10.0, 100.0};
    return p;
}

// ---------------------------------------------------------------------------
// Derived drive quantities
// ---------------------------------------------------------------------------

struct DriftIntegrals {
    Vec2 a_c;  // -int_0^t E^perp
    Vec2 a_v;  // int_0^t R(s) E^perp(s) ds
};

/// Both drift integrals by composite Gauss-Legendre quadrature.
inline DriftIntegrals drift_integrals(const FieldProfile& profile, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("drift_integrals: non-finite time");
    struct Pair {
        Vec2 a, b;
        Pair operator+(const Pair& o) const { return {a + o.a, b + o.b}; }
        Pair& operator+=(const Pair& o) { a += o.a; b += o.b; return *this; }
        Pair operator*(double s) const { return {a * s, b * s}; }
    };
    Pair r = integrate_gl(
        [&](double s) {
            Vec2 ep = perp(profile.E(s));
            return Pair{-ep, rot(s, ep)};
        },
        0.0, t, profile.period);
    return {r.a, r.b};
}

/// Propagator phase phi(t, t0).  The inner displacement integrals are
/// anchored at t0: that is the choice for which S(t, t0) solves the drive
/// ODE with S(t0, t0) = 1 for every t0 (so the two-time cocycle holds); at
/// t0 = 0 it reduces to the anchored-at-zero double integral.  The outer
/// integral is oriented, so phi(t0, t) = -phi(t, t0).
inline double phase_phi(const FieldProfile& profile, double t, double t0) {
    DriftIntegrals base = drift_integrals(profile, t0);
    auto inner = [&](double s) {
        DriftIntegrals d = drift_integrals(profile, s);
        // int_{t0}^s E^perp = -(a_c(s) - a_c(t0)); int_{t0}^s R E^perp = a_v(s) - a_v(t0)
        return 0.5 * dot(profile.E(s), base.a_c - d.a_c) -
               0.5 * dot(rot(s, profile.E(s)), d.a_v - base.a_v);
    };
    return integrate_gl(inner, t0, t, profile.period);
}

// ---------------------------------------------------------------------------
// Resonance classification
// ---------------------------------------------------------------------------

enum class ResonanceClass { Resonant, RationalResonant, NonResonant };

/// T in 2*pi*N within 1e-12 (on T/2pi) -> Resonant; else p/q with q <= 64
/// within 1e-12 -> RationalResonant; else NonResonant.  The denominator cap
/// makes the classifier deterministic for floating-point periods.
inline ResonanceClass classify_resonance(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("classify_resonance: T must be > 0");
    constexpr double tol = 1e-12;
    const double x = T / (2.0 * M_PI);
    double nearest = std::round(x);
    if (nearest >= 1.0 && std::abs(x - nearest) <= tol) return ResonanceClass::Resonant;
    for (int q = 1; q <= 64; ++q) {
        double p = std::round(x * q);
        if (p >= 1.0 && std::abs(x - p / q) <= tol) return ResonanceClass::RationalResonant;
    }
    return ResonanceClass::NonResonant;
}

inline const char* to_string(ResonanceClass c) {
    switch (c) {
        case ResonanceClass::Resonant: return "resonant";
        case ResonanceClass::RationalResonant: return "rational_resonant";
        default: return "non_resonant";
    }
}

// ---------------------------------------------------------------------------
// Predictions for the long-time observables
// ---------------------------------------------------------------------------

enum class SpectralExpectation {
    AcExceptFiniteEigen,  // transport regime: a.c. spectrum up to finitely many eigenvalues
    PurePoint,            // recurrent regime (zero-mean drive at rational period, decaying V)
    PurelyAc,             // drive dominates the impurity force everywhere
    Unclassified
};

inline const char* to_string(SpectralExpectation s) {
    switch (s) {
        case SpectralExpectation::AcExceptFiniteEigen: return "ac_except_finitely_many";
        case SpectralExpectation::PurePoint: return "pure_point";
        case SpectralExpectation::PurelyAc: return "purely_ac";
        default: return "unclassified";
    }
}

struct PredictionRecord {
    Vec2 v_asy_pred;
    double rho_pred = 0.0;
    ResonanceClass resonance = ResonanceClass::NonResonant;
    SpectralExpectation spectral_expectation = SpectralExpectation::Unclassified;
    Vec2 int_E;   // int_0^T E
    Vec2 int_RE;  // int_0^T R(s) E(s) ds
};

/// Case table for the over-period velocity, the kinetic growth rate and the
/// expected spectral type.  `gradV_sup` (when supplied and finite) enables the
/// small-gradient purely-a.c. refinement; the spectral labels otherwise assume
/// the decaying-force hypothesis on the impurity.
inline PredictionRecord theorem_predictions(const FieldProfile& profile,
                                            double gradV_sup = -1.0) {
    const double T = profile.period;
    PredictionRecord r;
    r.resonance = classify_resonance(T);
    DriftIntegrals d = drift_integrals(profile, T);
    // int E = (a_c)^perp, int RE = -(a_v)^perp
    r.int_E = perp(d.a_c);
    r.int_RE = -perp(d.a_v);
    const double eps = 1e-10;
    const bool intE_zero = norm(r.int_E) <= eps;
    const bool intRE_zero = norm(r.int_RE) <= eps;

    if (r.resonance == ResonanceClass::Resonant) {
        r.v_asy_pred = (d.a_v + d.a_c) / T;  // (1/T) int (R(t) - I) E^perp
        r.rho_pred = 0.5 * norm2(r.int_RE / T);
    } else {
        r.v_asy_pred = intE_zero ? Vec2{0.0, 0.0} : d.a_c / T;  // -(1/T) int E^perp
        r.rho_pred = 0.0;
    }

    const bool drive_nonzero =
        (r.resonance == ResonanceClass::Resonant) ? !(intE_zero && intRE_zero) : !intE_zero;
    if (gradV_sup >= 0.0 &&
        ((!intE_zero && gradV_sup < norm(r.int_E) / T) ||
         (!intRE_zero && gradV_sup < norm(r.int_RE) / T))) {
        r.spectral_expectation = SpectralExpectation::PurelyAc;
    } else if (drive_nonzero) {
        r.spectral_expectation = SpectralExpectation::AcExceptFiniteEigen;
    } else if (r.resonance != ResonanceClass::NonResonant && intE_zero && intRE_zero) {
        r.spectral_expectation = SpectralExpectation::PurePoint;
    }
    return r;
}

/// Pointwise field/potential evaluation.
inline std::tuple<Vec2, double, Vec2> eval_fields(const FieldProfile& profile,
                                                  const PotentialSpec& pot, double t,
                                                  Vec2 q) {
    if (!std::isfinite(t) || !finite(q))
        throw std::invalid_argument("eval_fields: non-finite input");
    return {profile.E(t), pot.V(t, q), pot.gradV(t, q)};
}

}  // namespace cyclores
