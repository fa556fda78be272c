#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclores/classical.hpp"
#include "cyclores/fields.hpp"
#include "cyclores/landau.hpp"
#include "cyclores/observables.hpp"

namespace cyclores {

namespace detail {

/// Drift integrals over [t0, t] from the cumulative ones.
struct WindowIntegrals {
    Vec2 int_E;   // int_{t0}^{t} E
    Vec2 int_RE;  // int_{t0}^{t} R E
};

inline WindowIntegrals window_integrals(const FieldProfile& profile, double t, double t0) {
    DriftIntegrals d1 = drift_integrals(profile, t);
    DriftIntegrals d0 = drift_integrals(profile, t0);
    return {perp(d1.a_c) - perp(d0.a_c), -perp(d1.a_v) + perp(d0.a_v)};
}

inline void apply_landau_any(WaveFunction& psi, double t) {
    double k = std::floor(t / (2.0 * M_PI));
    double r = t - 2.0 * M_PI * k;
    if (r >= 2.0 * M_PI) { r -= 2.0 * M_PI; k += 1.0; }
    if ((std::int64_t)k % 2 != 0) psi.scale(-1.0);
    if (r == 0.0) return;
    oscillator_inplace(psi, r);
    rotate_field_inplace(psi, 0.5 * r);
}

}  // namespace detail

/// S(t, t0) = e^{i<int E, c>} e^{i<int RE, v^perp>} e^{-i phi(t,t0)}.  The two
/// commuting displacement exponentials collapse into one plane-wave +
/// translation via  <a,c> + <b,v^perp> = <(a+b)/2, q> + <(a-b)^perp, D>,
/// picking up the e^{i<alpha,beta>/2} reordering phase.
inline WaveFunction apply_S(const WaveFunction& psi, const FieldProfile& profile,
                            double t, double t0) {
    detail::WindowIntegrals w = detail::window_integrals(profile, t, t0);
    const Vec2 alpha = (w.int_E + w.int_RE) * 0.5;
    const Vec2 beta = perp(w.int_E - w.int_RE);
    const double theta = -phase_phi(profile, t, t0) + 0.5 * dot(alpha, beta);
    return apply_phase_translation(psi, alpha, beta, theta);
}

/// Exact free propagator U_0(t, t0) = e^{-i t H_La} S(t, t0) e^{i t0 H_La}.
inline WaveFunction apply_free(const WaveFunction& psi, const FieldProfile& profile,
                               double t, double t0) {
    WaveFunction out = psi;
    detail::apply_landau_any(out, -t0);
    out = apply_S(out, profile, t, t0);
    detail::apply_landau_any(out, t);
    return out;
}

/// One Strang step: e^{-i(dt/2)W(tm)} e^{-i dt H_La} e^{-i(dt/2)W(tm)} with
/// W(t,q) = -<E(t),q> + V(t,q) sampled at the interval midpoint tm = t + dt/2.
inline WaveFunction strang_step(const WaveFunction& psi, const FieldProfile& profile,
                                const PotentialSpec& pot, double t, double dt) {
    WaveFunction out = psi;
    const double tm = t + 0.5 * dt;
    auto kick = [&](WaveFunction& w) {
        const Vec2 E = profile.E(tm);
        for (int ix = 0; ix < w.grid.n; ++ix) {
            const double x = w.grid.coord(ix);
            for (int iy = 0; iy < w.grid.n; ++iy) {
                const double y = w.grid.coord(iy);
                const double W = -(E.x * x + E.y * y) + pot.V(tm, {x, y});
                w.at(ix, iy) *= std::polar(1.0, -0.5 * dt * W);
            }
        }
    };
    kick(out);
    apply_landau_inplace(out, dt);
    kick(out);
    return out;
}

// ---------------------------------------------------------------------------
// Plans and the stroboscopic evolver
// ---------------------------------------------------------------------------

enum class Frame { Lab, Comoving };

struct PropagatorPlan {
    FieldProfile profile;
    PotentialSpec potential;
    Grid2D grid;
    int steps_per_period = 256;
    Frame frame = Frame::Lab;
    PhasePoint comoving_z0{};       // classical anchor for the comoving frame
    double boundary_abort = 1e-6;   // per-period guard on the frame mass
    bool fused = true;              // rotating-frame composition of the Strang steps

    double dt() const { return profile.period / steps_per_period; }

    void validate() const {
        if (steps_per_period < 64 || steps_per_period % 2 != 0)
            throw std::invalid_argument("PropagatorPlan: steps_per_period must be even and >= 64");
        if (std::abs(dt() * steps_per_period - profile.period) > 1e-14 * profile.period)
            throw std::invalid_argument("PropagatorPlan: dt * steps != T");
        if (grid.n == 0) throw std::invalid_argument("PropagatorPlan: grid not set");
    }
};

/// Stroboscopic evolution engine.  The default path composes the plan's
/// Strang steps in a rotating frame: the per-step Landau rotation by dt/2
/// commutes with the oscillator factor and conjugates position multipliers
/// into rotated-argument multipliers, so the whole period needs a single
/// materialized rotation (exact parity for T = 2*pi).  Algebraically
/// identical to the plain step composition; unit tests pin the agreement.
class Evolver {
  public:
    Evolver(const PropagatorPlan& plan, const WaveFunction& psi0)
        : plan_(plan), psi_(psi0) {
        plan_.validate();
        if (!(psi0.grid == plan.grid)) throw std::invalid_argument("Evolver: grid mismatch");
        if (plan_.frame == Frame::Comoving) {
            // chi = W^{-1} psi with W = e^{i<alpha,q>} e^{i<beta,D>},
            // alpha = canonical momentum, beta = -position of the classical anchor.
            const Vec2 alpha = plan_.comoving_z0.p;
            const Vec2 beta = -1.0 * plan_.comoving_z0.q;
            psi_ = apply_phase_translation(psi_, -1.0 * alpha, -1.0 * beta, dot(alpha, beta));
        }
        prepare_static_tables();
    }

    int periods_done() const { return periods_; }
    double elapsed() const { return periods_ * plan_.profile.period; }
    bool aborted() const { return aborted_; }
    int abort_period() const { return abort_period_; }

    /// Advance one full period (no-op once aborted).
    void advance_period() {
        if (aborted_) return;
        const double t0 = elapsed();
        if (plan_.fused)
            fused_period(t0);
        else
            plain_period(t0);
        ++periods_;
        if (psi_.boundary_mass() > plan_.boundary_abort) {
            aborted_ = true;
            abort_period_ = periods_;
        }
    }

    /// Current state in the lab frame (materializes any pending rotation and,
    /// in the comoving frame, undoes the moving-frame transformation).
    WaveFunction state_lab() {
        materialize();
        if (plan_.frame == Frame::Lab) return psi_;
        const double t = elapsed();
        auto [alpha, beta, theta] = comoving_frame_data(t);
        return apply_phase_translation(psi_, alpha, beta, theta);
    }

    /// Lab-frame observable record at the current stroboscopic time.
    ObservableRecord record(const WaveFunction& psi0_lab) {
        materialize();
        if (plan_.frame == Frame::Lab) return make_record(elapsed(), psi_, psi0_lab);
        const double t = elapsed();
        auto [alpha, beta, theta] = comoving_frame_data(t);
        // reconstruct lab moments from the comoving ones
        Expectations e = expectations(psi_);
        PhasePoint zc = classical_point(t);
        CyclotronDecomposition cd = decompose(zc);
        ObservableRecord r;
        r.t = t;
        r.mean_q = e.mean_q + zc.q;
        r.mean_v = e.mean_v + cd.v;
        r.mean_c = e.mean_c + cd.c;
        r.kinetic = e.kinetic + dot(e.mean_v, cd.v) + 0.5 * norm2(cd.v);
        r.norm = e.norm;
        r.boundary_mass = psi_.boundary_mass();
        WaveFunction lab = apply_phase_translation(psi_, alpha, beta, theta);
        r.autocorr = inner(psi0_lab, lab);
        return r;
    }

  private:
    PropagatorPlan plan_;
    WaveFunction psi_;
    int periods_ = 0;
    bool aborted_ = false;
    int abort_period_ = -1;
    double pending_rotation_ = 0.0;
    double comoving_phase_ = 0.0;  // theta(t) accumulated by quadrature

    // static per-plan tables
    std::vector<double> v_static_;   // V(q) when time-independent and rotation invariant
    cvector fourier_mult_;           // e^{-i sin(dt/2) |p|^2}
    std::vector<double> chirp_x_;    // g * x^2 with g = tan(dt/4)/4

    bool v_is_static() const {
        return plan_.frame == Frame::Lab && !plan_.potential.empty() &&
               plan_.potential.rotation_invariant && plan_.potential.time_independent;
    }

    void prepare_static_tables() {
        const int n = plan_.grid.n;
        const double dt = plan_.dt();
        fourier_mult_.resize(plan_.grid.size());
        const double s = std::sin(0.5 * dt);
        for (int ix = 0; ix < n; ++ix) {
            const double px = plan_.grid.momentum(ix);
            for (int iy = 0; iy < n; ++iy) {
                const double py = plan_.grid.momentum(iy);
                fourier_mult_[(std::size_t)ix * n + iy] =
                    std::polar(1.0, -s * (px * px + py * py));
            }
        }
        chirp_x_.resize(n);
        const double g = 0.25 * std::tan(0.25 * dt);
        for (int i = 0; i < n; ++i) chirp_x_[i] = g * plan_.grid.coord(i) * plan_.grid.coord(i);
        if (v_is_static()) {
            v_static_.resize(plan_.grid.size());
            for (int ix = 0; ix < n; ++ix)
                for (int iy = 0; iy < n; ++iy)
                    v_static_[(std::size_t)ix * n + iy] =
                        plan_.potential.V(0.0, {plan_.grid.coord(ix), plan_.grid.coord(iy)});
        }
    }

    PhasePoint classical_point(double t) const {
        DriftIntegrals d = drift_integrals(plan_.profile, t);
        CyclotronDecomposition cd0 = decompose(plan_.comoving_z0);
        Vec2 vperp = rot(-t, perp(cd0.v) + d.a_v);
        Vec2 c = cd0.c + d.a_c;
        Vec2 q = c + vperp;
        Vec2 v = -1.0 * perp(vperp);
        return {q, v + perp(q) * 0.5};
    }

    std::tuple<Vec2, Vec2, double> comoving_frame_data(double t) const {
        PhasePoint zc = classical_point(t);
        return {zc.p, -1.0 * zc.q, comoving_phase_};
    }

    void advance_comoving_phase(double t0, double t1) {
        // theta_dot = -|v_cl|^2/2 + <v_cl^perp, xi>/2
        comoving_phase_ += integrate_gl(
            [&](double s) {
                PhasePoint zc = classical_point(s);
                Vec2 v = decompose(zc).v;
                return -0.5 * norm2(v) + 0.5 * dot(perp(v), zc.q);
            },
            t0, t1, plan_.profile.period);
    }

    void materialize() {
        if (pending_rotation_ != 0.0) {
            rotate_field_inplace(psi_, pending_rotation_);
            pending_rotation_ = 0.0;
        }
    }

    Vec2 kick_field(double tm) const {
        return plan_.frame == Frame::Lab ? plan_.profile.E(tm) : Vec2{0.0, 0.0};
    }

    struct VKick {
        double tm;
        double weight;  // dt/2 per half-kick
        Vec2 offset;    // comoving frame sees V(t, q + xi(t))
    };

    /// Position-space pass between oscillator applications: both adjacent
    /// chirps, the fused half-kicks of the two neighboring steps, all
    /// separable pieces as 1D phase tables.
    void position_pass(double theta, double chirp_scale, const Vec2& e_sum_dt2,
                       const std::vector<VKick>& v_kicks) {
        const int n = plan_.grid.n;
        const double ct = std::cos(theta), st = std::sin(theta);
        const Vec2 e_rot{ct * e_sum_dt2.x - st * e_sum_dt2.y,
                         st * e_sum_dt2.x + ct * e_sum_dt2.y};
        static thread_local std::vector<cdouble> mx, my;
        mx.resize(n);
        my.resize(n);
        for (int i = 0; i < n; ++i) {
            const double xi = plan_.grid.coord(i);
            mx[i] = std::polar(1.0, e_rot.x * xi - chirp_scale * chirp_x_[i]);
            my[i] = std::polar(1.0, e_rot.y * xi - chirp_scale * chirp_x_[i]);
        }
        const bool have_v = !plan_.potential.empty() && !v_kicks.empty();
        if (!have_v) {
            for (int ix = 0; ix < n; ++ix) {
                const cdouble fx = mx[ix];
                cdouble* row = &psi_.amp[(std::size_t)ix * n];
                for (int iy = 0; iy < n; ++iy) row[iy] *= fx * my[iy];
            }
        } else if (!v_static_.empty()) {
            double vcoef = 0.0;
            for (const auto& vk : v_kicks) vcoef += vk.weight;
            for (int ix = 0; ix < n; ++ix) {
                const cdouble fx = mx[ix];
                const double* vrow = &v_static_[(std::size_t)ix * n];
                cdouble* row = &psi_.amp[(std::size_t)ix * n];
                for (int iy = 0; iy < n; ++iy)
                    row[iy] *= fx * my[iy] * std::polar(1.0, -vcoef * vrow[iy]);
            }
        } else {
            // general path: evaluate V at the rotated (and frame-shifted) coordinates
            for (int ix = 0; ix < n; ++ix) {
                const double x = plan_.grid.coord(ix);
                const cdouble fx = mx[ix];
                cdouble* row = &psi_.amp[(std::size_t)ix * n];
                for (int iy = 0; iy < n; ++iy) {
                    const double y = plan_.grid.coord(iy);
                    const Vec2 qrot{ct * x + st * y, -st * x + ct * y};  // R(-theta) q
                    double w = 0.0;
                    for (const auto& vk : v_kicks)
                        w += vk.weight * plan_.potential.V(vk.tm, qrot + vk.offset);
                    row[iy] *= fx * my[iy] * std::polar(1.0, -w);
                }
            }
        }
    }

    void oscillator_kernel_pass() {
        const int n = plan_.grid.n;
        fft_forward(psi_.amp, n);
        for (std::size_t i = 0; i < psi_.amp.size(); ++i) psi_.amp[i] *= fourier_mult_[i];
        fft_inverse(psi_.amp, n);
    }

    void fused_period(double t0) {
        materialize();
        const int N = plan_.steps_per_period;
        const double dt = plan_.dt();
        const double phi = 0.5 * dt;
        const bool comoving = plan_.frame == Frame::Comoving;
        for (int k = 0; k <= N; ++k) {
            const double theta = k * phi;
            Vec2 e_sum{};
            std::vector<VKick> v_kicks;
            auto add_kick = [&](double tm) {
                e_sum += kick_field(tm) * (0.5 * dt);
                if (!plan_.potential.empty()) {
                    Vec2 off = comoving ? classical_point(tm).q : Vec2{0.0, 0.0};
                    v_kicks.push_back({tm, 0.5 * dt, off});
                }
            };
            if (k > 0) add_kick(t0 + (k - 1) * dt + 0.5 * dt);
            if (k < N) add_kick(t0 + k * dt + 0.5 * dt);
            const double chirp_scale = (k == 0 || k == N) ? 1.0 : 2.0;
            position_pass(theta, chirp_scale, e_sum, v_kicks);
            if (k < N) oscillator_kernel_pass();
        }
        pending_rotation_ += N * phi;
        if (plan_.frame == Frame::Comoving) advance_comoving_phase(t0, t0 + plan_.profile.period);
    }

    void plain_period(double t0) {
        materialize();
        const int N = plan_.steps_per_period;
        const double dt = plan_.dt();
        for (int k = 0; k < N; ++k) {
            if (plan_.frame == Frame::Lab) {
                psi_ = strang_step(psi_, plan_.profile, plan_.potential, t0 + k * dt, dt);
            } else {
                const double tm = t0 + k * dt + 0.5 * dt;
                const Vec2 off = classical_point(tm).q;
                auto kick = [&](WaveFunction& w) {
                    if (plan_.potential.empty()) return;
                    for (int ix = 0; ix < w.grid.n; ++ix) {
                        const double x = w.grid.coord(ix);
                        for (int iy = 0; iy < w.grid.n; ++iy) {
                            const double y = w.grid.coord(iy);
                            const double V = plan_.potential.V(tm, Vec2{x, y} + off);
                            w.at(ix, iy) *= std::polar(1.0, -0.5 * dt * V);
                        }
                    }
                };
                kick(psi_);
                apply_landau_inplace(psi_, dt);
                kick(psi_);
            }
        }
        if (plan_.frame == Frame::Comoving) advance_comoving_phase(t0, t0 + plan_.profile.period);
    }
};

/// The Floquet map U(T, 0) applied once.
inline WaveFunction floquet_map(const PropagatorPlan& plan, const WaveFunction& psi) {
    Evolver ev(plan, psi);
    ev.advance_period();
    return ev.state_lab();
}

struct EvolveResult {
    Trajectory trajectory;
    bool aborted = false;
    int abort_period = -1;
    WaveFunction final_state;  // lab frame, at the last completed period
};

/// Stroboscopic run: n_periods Floquet maps with a per-period observable
/// snapshot (record 0 is the initial state).
inline EvolveResult evolve_stroboscopic(const PropagatorPlan& plan,
                                        const WaveFunction& psi0, int n_periods,
                                        const std::string& scenario_id = "") {
    Evolver ev(plan, psi0);
    EvolveResult res;
    res.trajectory.scenario_id = scenario_id;
    res.trajectory.period = plan.profile.period;
    res.trajectory.records.push_back(ev.record(psi0));
    for (int n = 0; n < n_periods; ++n) {
        ev.advance_period();
        if (ev.aborted()) {
            res.aborted = true;
            res.abort_period = ev.abort_period();
            break;
        }
        res.trajectory.records.push_back(ev.record(psi0));
    }
    res.final_state = ev.state_lab();
    return res;
}

// ---------------------------------------------------------------------------
// Resonant Floquet closed form
// ---------------------------------------------------------------------------

struct FloquetClosedForm {
    double alpha_n = 0.0;  // -pi n - phi(T)
    Vec2 a_c, a_v;
    int n = 0;
};

/// U_0(T) = e^{i alpha_n} e^{i<int E, c>} e^{i<int RE, v^perp>} for T = 2 pi n.
inline FloquetClosedForm floquet_closed_form(const FieldProfile& profile) {
    const double T = profile.period;
    const double ratio = T / (2.0 * M_PI);
    const double n = std::round(ratio);
    if (!(n >= 1.0) || std::abs(ratio - n) > 1e-12)
        throw std::invalid_argument("floquet_closed_form: requires T in 2*pi*N");
    DriftIntegrals d = drift_integrals(profile, T);
    return {-M_PI * n - phase_phi(profile, T, 0.0), d.a_c, d.a_v, (int)n};
}

/// Assemble the closed-form Floquet operator from its data (phase included).
inline WaveFunction apply_floquet_closed_form(const WaveFunction& psi,
                                              const FloquetClosedForm& f) {
    const Vec2 int_E = perp(f.a_c);
    const Vec2 int_RE = -1.0 * perp(f.a_v);
    const Vec2 alpha = (int_E + int_RE) * 0.5;
    const Vec2 beta = perp(int_E - int_RE);
    const double theta = f.alpha_n + 0.5 * dot(alpha, beta);
    return apply_phase_translation(psi, alpha, beta, theta);
}

// ---------------------------------------------------------------------------
// Mourre diagnostics
// ---------------------------------------------------------------------------

enum class MourreTag { A_c, A_v };

struct MourreReport {
    MourreTag tag;
    double predicted;       // |a(T)|^2
    double measured;        // <U psi, A U psi> - <psi, A psi>
    double center_radius;   // distance of the packet center from the impurity
};

/// <U(T) psi, A U(T) psi> - <psi, A psi> for A in {<a_c(T), c>, <a_v(T), v^perp>}.
/// A is linear in (q, D), so its expectation reduces to the first moments.
/// V = 0 plans use the exact closed-form propagator.
inline MourreReport mourre_expectation(const PropagatorPlan& plan, const WaveFunction& psi,
                                       MourreTag tag) {
    const double T = plan.profile.period;
    DriftIntegrals d = drift_integrals(plan.profile, T);
    const Vec2 a = (tag == MourreTag::A_c) ? d.a_c : d.a_v;
    if (norm(a) < 1e-12)
        throw std::invalid_argument("mourre_expectation: a(T) = 0, operator trivial");

    auto expect_A = [&](const WaveFunction& w) {
        Expectations e = expectations(w);
        return (tag == MourreTag::A_c) ? dot(a, e.mean_c) : dot(a, perp(e.mean_v));
    };

    const double before = expect_A(psi);
    WaveFunction evolved = plan.potential.empty()
                               ? apply_free(psi, plan.profile, T, 0.0)
                               : floquet_map(plan, psi);
    const double after = expect_A(evolved);

    Expectations e0 = expectations(psi);
    MourreReport rep;
    rep.tag = tag;
    rep.predicted = norm2(a);
    rep.measured = after - before;
    rep.center_radius = norm(e0.mean_q - plan.potential.center);
    return rep;
}

}  // namespace cyclores
