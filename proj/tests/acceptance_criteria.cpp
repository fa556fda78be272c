// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured numbers.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "cyclores/cyclores.hpp"

using namespace cyclores;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const double TAU = 2.0 * M_PI;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void verdict(int criterion, bool pass, const std::string& detail) {
    std::printf("[criterion %2d] %s  %s\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

double l2_diff(const WaveFunction& a, const WaveFunction& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.amp.size(); ++i) d += std::norm(a.amp[i] - b.amp[i]);
    return std::sqrt(d) * a.grid.h();
}

std::string acceptance_root() {
    auto p = fs::temp_directory_path() / "cyclores_acceptance";
    fs::create_directories(p);
    return p.string();
}

char buf[512];

}  // namespace

TEST_CASE("criterion 1: Landau periodicity", "[acceptance]") {
    Timer timer;
    Grid2D g(512, 80.0);
    PropagatorPlan plan{field_zero(), potential_none(), g, 256, Frame::Lab};
    WaveFunction psi = make_gaussian(g, {0, 0}, {0, 0}, 1.0);
    WaveFunction out = floquet_map(plan, psi);
    cdouble ov = inner(out, psi);  // <psi(2pi), psi(0)>
    double err = std::abs(ov - cdouble(-1.0));
    double wall = timer.secs();
    bool pass = err < 1e-6 && wall < 10.0;
    std::snprintf(buf, sizeof buf, "inner = (%.10f, %.2e), |inner+1| = %.2e, wall = %.1fs",
                  ov.real(), ov.imag(), err, wall);
    verdict(1, pass, buf);
    REQUIRE(err < 1e-6);
    REQUIRE(wall < 10.0);
}

TEST_CASE("criterion 2: closed-form propagator equivalence", "[acceptance]") {
    Timer timer;
    Grid2D g(256, 40.0);
    struct Case { const char* name; FieldProfile f; };
    const Case cases[] = {
        {"zero", field_zero()},
        {"constant", field_constant({0.5, 0})},
        {"cosine", field_cosine(0.2, 1)},
        {"cosine_2nd", field_cosine(0.5, 2)},
        {"static_plus_rotating", field_static_plus_rotating({0.1, 0.0})},
    };
    const WaveFunction battery[5] = {
        make_gaussian(g, {0, 0}, {0, 0}, 1.0),
        make_gaussian(g, {2, 1}, {-0.2, 0.2}, 1.0),
        make_gaussian(g, {-1, 2}, {0.3, 0.1}, 0.9),
        make_gaussian(g, {1, -2}, {0.0, -0.3}, 1.1),
        make_gaussian(g, {-2, -1}, {0.2, 0.3}, 1.0),
    };
    double worst = 0.0, worst_order = 10.0;
    for (const auto& c : cases) {
        double e256 = 0.0;
        for (const auto& psi : battery) {
            WaveFunction cf = apply_free(psi, c.f, c.f.period, 0.0);
            PropagatorPlan plan{c.f, potential_none(), g, 256, Frame::Lab};
            e256 = std::max(e256, l2_diff(floquet_map(plan, psi), cf));
        }
        worst = std::max(worst, e256);
        if (std::string(c.name) != "zero") {
            // self-convergence order on the most energetic battery state
            const WaveFunction& psi = battery[1];
            WaveFunction cf = apply_free(psi, c.f, c.f.period, 0.0);
            PropagatorPlan p128{c.f, potential_none(), g, 128, Frame::Lab};
            PropagatorPlan p512{c.f, potential_none(), g, 512, Frame::Lab};
            double a = l2_diff(floquet_map(p128, psi), cf);
            double b = l2_diff(floquet_map(p512, psi), cf);
            worst_order = std::min(worst_order, 0.5 * std::log2(a / b));
        }
    }
    double wall = timer.secs();
    bool pass = worst <= 1e-4 && worst_order >= 1.9 && wall < 60.0;
    std::snprintf(buf, sizeof buf,
                  "max |stepped - closed| = %.2e (<= 1e-4), min order = %.2f (>= 1.9), "
                  "wall = %.0fs",
                  worst, worst_order, wall);
    verdict(2, pass, buf);
    REQUIRE(worst <= 1e-4);
    REQUIRE(worst_order >= 1.9);
    REQUIRE(wall < 60.0);
}

TEST_CASE("criterion 3: Ehrenfest flow oracle", "[acceptance]") {
    Grid2D g(512, 80.0);
    FieldProfile f = field_cosine(1.0, 1);
    PhasePoint z0{{2, 1}, {-0.5, 0.3}};
    WaveFunction psi = make_gaussian(g, z0.q, z0.p, 1.0);
    double worst = 0.0;
    for (int j = 1; j <= 16; ++j) {
        double t = j * TAU / 16;
        Expectations e = expectations(apply_free(psi, f, t, 0.0));
        worst = std::max(worst, norm(e.mean_q - flow_x(f, t, z0)));
    }
    bool pass = worst < 1e-6;
    std::snprintf(buf, sizeof buf, "max |<q>(t) - x(t)| over 16 sample times = %.2e (< 1e-6)",
                  worst);
    verdict(3, pass, buf);
    REQUIRE(worst < 1e-6);
}

TEST_CASE("criterion 4: resonant energy growth, V-independence", "[acceptance]") {
    Timer timer;
    auto run = [&](const char* preset) {
        const PresetEntry* p = find_preset(preset);
        REQUIRE(p != nullptr);
        return run_scenario(p->config, acceptance_root());
    };
    auto free_run = run("resonant_growth");
    double rho_free = free_run.summary["measured"]["rho_hat"].get<double>();
    auto imp_run = run("impurity_growth");
    double rho_imp = imp_run.summary["measured"]["rho_hat"].get<double>();
    double dev_free = std::abs(rho_free - 0.125) / 0.125;
    double dev_imp = std::abs(rho_imp - 0.125) / 0.125;
    double wall = timer.secs();
    bool pass = dev_free <= 0.01 && dev_imp <= 0.10 && wall < 600.0 &&
                free_run.status == RunStatus::Ok && imp_run.status == RunStatus::Ok;
    std::snprintf(buf, sizeof buf,
                  "rho_hat(free) = %.6f (dev %.2e <= 1e-2), rho_hat(radial_log_sin 0.3) = "
                  "%.6f (dev %.2e <= 1e-1), wall = %.0fs (< 600)",
                  rho_free, dev_free, rho_imp, dev_imp, wall);
    verdict(4, pass, buf);
    REQUIRE(free_run.status == RunStatus::Ok);
    REQUIRE(imp_run.status == RunStatus::Ok);
    REQUIRE(dev_free <= 0.01);
    REQUIRE(dev_imp <= 0.10);
    REQUIRE(wall < 600.0);
}

TEST_CASE("criterion 5: Hall drift", "[acceptance]") {
    const PresetEntry* p = find_preset("hall_drift");
    REQUIRE(p != nullptr);
    auto free_run = run_scenario(p->config, acceptance_root());
    auto v = free_run.summary["measured"]["v_asy_est"];
    Vec2 v_free{v[0].get<double>(), v[1].get<double>()};
    double dev_free = norm(v_free - Vec2{0, -0.2}) / 0.2;

    ScenarioConfig imp = p->config;
    imp.name = "hall_drift_impurity";
    imp.output_dir = "out/hall_drift_impurity";
    imp.potential_preset = "radial_log_sin";
    imp.lambda = 0.2;
    imp.potential_center = {0.0, 40.0};  // packet starts 40 units from the impurity
    auto imp_run = run_scenario(imp, acceptance_root());
    auto v2 = imp_run.summary["measured"]["v_asy_est"];
    Vec2 v_imp{v2[0].get<double>(), v2[1].get<double>()};
    double dev_imp = norm(v_imp - Vec2{0, -0.2}) / 0.2;

    bool pass = dev_free <= 0.05 && dev_imp <= 0.10;
    std::snprintf(buf, sizeof buf,
                  "v(free) = (%.5f, %.5f) dev %.2e (<= 5e-2); v(lambda=0.2) = (%.5f, %.5f) "
                  "dev %.2e (<= 1e-1)",
                  v_free.x, v_free.y, dev_free, v_imp.x, v_imp.y, dev_imp);
    verdict(5, pass, buf);
    REQUIRE(dev_free <= 0.05);
    REQUIRE(dev_imp <= 0.10);
}

TEST_CASE("criterion 6: drift suppression", "[acceptance]") {
    const PresetEntry* p = find_preset("suppressed_drift");
    REQUIRE(p != nullptr);
    auto run = run_scenario(p->config, acceptance_root());
    auto v = run.summary["measured"]["v_asy_est"];
    Vec2 vest{v[0].get<double>(), v[1].get<double>()};
    const double e0 = norm(p->config.e0);
    bool pass = norm(vest) <= 0.02 * e0 && run.status == RunStatus::Ok;
    std::snprintf(buf, sizeof buf, "|v_est| = %.2e (<= 0.02 |E0| = %.2e)", norm(vest),
                  0.02 * e0);
    verdict(6, pass, buf);
    REQUIRE(run.status == RunStatus::Ok);
    REQUIRE(norm(vest) <= 0.02 * e0);
}

TEST_CASE("criterion 7: pure-point trap", "[acceptance]") {
    const PresetEntry* p = find_preset("pure_point_trap");
    REQUIRE(p != nullptr);
    FieldProfile f = make_field(p->config);
    PotentialSpec pot = make_potential(p->config);
    Grid2D g(p->config.grid_n, p->config.grid_L, p->config.momentum_budget,
             p->config.allow_tight_budget);
    PropagatorPlan plan{f, pot, g, p->config.steps_per_period, Frame::Lab};
    WaveFunction psi = make_gaussian(g, p->config.q0, p->config.p0, p->config.sigma);
    auto res = evolve_stroboscopic(plan, psi, p->config.n_periods, p->config.name);
    REQUIRE_FALSE(res.aborted);
    auto series = autocorrelation_series(res.trajectory);
    double m64 = cesaro_mean(series, 64);
    double kmin = 1e300, kmax = 0.0;
    for (const auto& r : res.trajectory.records) {
        kmin = std::min(kmin, r.kinetic);
        kmax = std::max(kmax, r.kinetic);
    }
    double band = (kmax - kmin) / (0.5 * (kmax + kmin));
    double vir = virial_check(res.trajectory);
    bool pass = m64 >= 0.2 && band <= 0.05 && vir <= 1e-3;
    std::snprintf(buf, sizeof buf,
                  "M_64 = %.3f (>= 0.2), kinetic band = %.2f%% (<= 5%%), virial = %.2e "
                  "(<= 1e-3), label = %s",
                  m64, 100 * band, vir, to_string(spectral_classify(series)));
    verdict(7, pass, buf);
    REQUIRE(m64 >= 0.2);
    REQUIRE(band <= 0.05);
    REQUIRE(vir <= 1e-3);
}

TEST_CASE("criterion 8: free Mourre constants", "[acceptance]") {
    Grid2D g(256, 40.0);
    PropagatorPlan pc{field_constant({1, 0}), potential_none(), g, 256, Frame::Lab};
    PropagatorPlan pv{field_cosine(1.0, 1), potential_none(), g, 256, Frame::Lab};
    double worst_c = 0.0, worst_v = 0.0;
    for (int k = 0; k < 10; ++k) {
        WaveFunction psi = make_gaussian(g, {0.5 * k - 2.0, 1.0 - 0.4 * k},
                                         {0.3 * k - 1.0, 0.2 * k - 0.8}, 0.8 + 0.05 * k);
        auto rc = mourre_expectation(pc, psi, MourreTag::A_c);
        auto rv = mourre_expectation(pv, psi, MourreTag::A_v);
        worst_c = std::max(worst_c, std::abs(rc.measured - rc.predicted));
        worst_v = std::max(worst_v, std::abs(rv.measured - rv.predicted));
    }
    bool pass = worst_c <= 1e-5 && worst_v <= 1e-5;
    std::snprintf(buf, sizeof buf,
                  "max |<A_c drop> - |a_c|^2| = %.2e, max |<A_v drop> - |a_v|^2| = %.2e "
                  "(both <= 1e-5, 10-state battery)",
                  worst_c, worst_v);
    verdict(8, pass, buf);
    REQUIRE(worst_c <= 1e-5);
    REQUIRE(worst_v <= 1e-5);
}

TEST_CASE("criterion 9: Mourre compact-correction decay", "[acceptance]") {
    // Packets ride the drift axis with zero cyclotron velocity at distances
    // 0, 20, 60 from the impurity.  The measurement is invariant under a
    // magnetic translation of packet and potential together, so each case
    // runs with the packet at the origin and the impurity center shifted.
    Timer timer;
    Grid2D g(256, 48.0);
    FieldProfile f = field_constant({0.5, 0});
    WaveFunction psi = make_gaussian(g, {0, 0}, {0, 0}, 1.0);
    double devs[3] = {0, 0, 0};
    const double radii[3] = {0.0, 20.0, 60.0};
    for (int i = 0; i < 3; ++i) {
        PotentialSpec pot = potential_radial_log_sin(0.3, {0.0, -radii[i]});
        PropagatorPlan plan{f, pot, g, 2048, Frame::Lab};
        auto rep = mourre_expectation(plan, psi, MourreTag::A_c);
        devs[i] = std::abs(rep.measured - rep.predicted);
    }
    bool decreasing = devs[0] > devs[1] && devs[1] > devs[2];
    bool pass = decreasing && devs[2] <= 1e-3;
    std::snprintf(buf, sizeof buf,
                  "|dev| at r = 0, 20, 60: %.3e > %.3e > %.3e, final <= 1e-3; wall = %.0fs",
                  devs[0], devs[1], devs[2], timer.secs());
    verdict(9, pass, buf);
    REQUIRE(decreasing);
    REQUIRE(devs[2] <= 1e-3);
}

TEST_CASE("criterion 10: classical sojourn bound", "[acceptance]") {
    Timer timer;
    auto f = [](double, Vec2 q) { return 1.0 / (1.0 + norm2(q)); };
    auto rows = sojourn_bound_scan(f, field_zero(), {10.0, 100.0, 1000.0});
    double lo = 1e300, hi = 0.0;
    for (double r : {10.0, 100.0, 1000.0}) {
        double s = scan_sup_at_radius(rows, r);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    double wall = timer.secs();
    bool pass = hi / lo <= 3.0 && wall < 30.0;
    std::snprintf(buf, sizeof buf, "scan sup ratio max/min = %.4f (<= 3), wall = %.1fs (< 30)",
                  hi / lo, wall);
    verdict(10, pass, buf);
    REQUIRE(hi / lo <= 3.0);
    REQUIRE(wall < 30.0);
}
