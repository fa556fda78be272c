#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclores/propagators.hpp"

namespace cyclores {

// ---------------------------------------------------------------------------
// Scenario configuration: flat key/value text with [section] headers.
// ---------------------------------------------------------------------------

struct ScenarioConfig {
    std::string name;

    std::string field_preset;  // zero | constant | cosine | static_plus_rotating
    double T = 2.0 * M_PI;
    double amplitude = 1.0;    // cosine
    int harmonic = 1;          // cosine
    Vec2 e0{0.0, 0.0};         // constant / static_plus_rotating

    std::string potential_preset = "none";  // none|radial_log_sin|gaussian_bump|plane_wave
    double lambda = 0.0;
    double width = 1.0;
    Vec2 wavevec{1.0, 0.0};
    Vec2 potential_center{0.0, 0.0};

    int grid_n = 0;
    double grid_L = 0.0;
    double momentum_budget = 0.0;  // 0 disables the Nyquist check
    bool allow_tight_budget = false;

    Vec2 q0{0.0, 0.0};
    Vec2 p0{0.0, 0.0};
    double sigma = 1.0;

    int steps_per_period = 256;
    int n_periods = 8;
    std::string frame = "lab";
    double boundary_abort = 1e-6;

    bool growth_fit = true;
    bool velocity_fit = true;
    bool classifier = true;
    std::string mourre = "none";  // none | A_c | A_v | both
    unsigned long seed = 7;

    std::string output_dir = "out";
    bool write_state = false;
};

struct ConfigError {
    int line;  // 0 when not tied to a line
    std::string message;
};

namespace detail {

inline bool parse_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "yes") { out = true; return true; }
    if (v == "false" || v == "0" || v == "no") { out = false; return true; }
    return false;
}

}  // namespace detail

/// Parse a scenario file.  All problems (unknown keys, bad values, missing
/// required keys) are collected into `errors` with line-level diagnostics.
inline std::optional<ScenarioConfig> parse_scenario(std::istream& in,
                                                    std::vector<ConfigError>& errors) {
    ScenarioConfig cfg;
    std::map<std::string, bool> seen;
    std::string section, line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            const char* ws = " \t\r\n";
            auto a = s.find_first_not_of(ws);
            if (a == std::string::npos) return std::string();
            auto b = s.find_last_not_of(ws);
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back({lineno, "unterminated section header"});
                continue;
            }
            section = line.substr(1, line.size() - 2);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back({lineno, "expected key = value"});
            continue;
        }
        std::string key = section + "." + strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        seen[key] = true;

        auto num = [&](double& slot) {
            try {
                std::size_t used = 0;
                slot = std::stod(val, &used);
                if (used != val.size()) throw std::invalid_argument("");
            } catch (...) {
                errors.push_back({lineno, key + ": expected a number, got '" + val + "'"});
            }
        };
        auto integer = [&](int& slot) {
            double d = 0;
            num(d);
            slot = (int)std::llround(d);
        };
        auto boolean = [&](bool& slot) {
            if (!detail::parse_bool(val, slot))
                errors.push_back({lineno, key + ": expected true/false"});
        };

        if (key == "scenario.name") cfg.name = val;
        else if (key == "field.preset") cfg.field_preset = val;
        else if (key == "field.T") num(cfg.T);
        else if (key == "field.amplitude") num(cfg.amplitude);
        else if (key == "field.harmonic") integer(cfg.harmonic);
        else if (key == "field.ex") num(cfg.e0.x);
        else if (key == "field.ey") num(cfg.e0.y);
        else if (key == "potential.preset") cfg.potential_preset = val;
        else if (key == "potential.lambda") num(cfg.lambda);
        else if (key == "potential.width") num(cfg.width);
        else if (key == "potential.kx") num(cfg.wavevec.x);
        else if (key == "potential.ky") num(cfg.wavevec.y);
        else if (key == "potential.center_x") num(cfg.potential_center.x);
        else if (key == "potential.center_y") num(cfg.potential_center.y);
        else if (key == "grid.n") integer(cfg.grid_n);
        else if (key == "grid.L") num(cfg.grid_L);
        else if (key == "grid.momentum_budget") num(cfg.momentum_budget);
        else if (key == "grid.allow_tight_budget") boolean(cfg.allow_tight_budget);
        else if (key == "initial.q0x") num(cfg.q0.x);
        else if (key == "initial.q0y") num(cfg.q0.y);
        else if (key == "initial.p0x") num(cfg.p0.x);
        else if (key == "initial.p0y") num(cfg.p0.y);
        else if (key == "initial.sigma") num(cfg.sigma);
        else if (key == "evolve.steps_per_period") integer(cfg.steps_per_period);
        else if (key == "evolve.n_periods") integer(cfg.n_periods);
        else if (key == "evolve.frame") cfg.frame = val;
        else if (key == "evolve.boundary_abort") num(cfg.boundary_abort);
        else if (key == "analysis.growth_fit") boolean(cfg.growth_fit);
        else if (key == "analysis.velocity_fit") boolean(cfg.velocity_fit);
        else if (key == "analysis.classifier") boolean(cfg.classifier);
        else if (key == "analysis.mourre") cfg.mourre = val;
        else if (key == "analysis.seed") { int s = 0; integer(s); cfg.seed = (unsigned long)s; }
        else if (key == "output.dir") cfg.output_dir = val;
        else if (key == "output.write_state") boolean(cfg.write_state);
        else errors.push_back({lineno, "unknown key '" + key + "'"});
    }

    static const char* required[] = {
        "scenario.name", "field.preset", "field.T", "potential.preset",
        "grid.n", "grid.L", "initial.q0x", "initial.q0y", "initial.p0x",
        "initial.p0y", "initial.sigma", "evolve.steps_per_period",
        "evolve.n_periods", "output.dir"};
    for (const char* key : required)
        if (!seen.count(key)) errors.push_back({0, std::string("missing required key '") + key + "'"});

    if (cfg.T <= 0.0) errors.push_back({0, "field.T must be > 0"});
    if (seen.count("evolve.frame") && cfg.frame != "lab" && cfg.frame != "comoving")
        errors.push_back({0, "evolve.frame must be lab or comoving"});
    if (cfg.mourre != "none" && cfg.mourre != "A_c" && cfg.mourre != "A_v" &&
        cfg.mourre != "both")
        errors.push_back({0, "analysis.mourre must be none, A_c, A_v or both"});

    if (!errors.empty()) return std::nullopt;
    return cfg;
}

inline std::optional<ScenarioConfig> parse_scenario_file(const std::string& path,
                                                         std::vector<ConfigError>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back({0, "cannot open config file '" + path + "'"});
        return std::nullopt;
    }
    return parse_scenario(in, errors);
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

inline FieldProfile make_field(const ScenarioConfig& cfg) {
    if (cfg.field_preset == "zero") return field_zero(cfg.T);
    if (cfg.field_preset == "constant") return field_constant(cfg.e0, cfg.T);
    if (cfg.field_preset == "cosine") return field_cosine(cfg.amplitude, cfg.harmonic, cfg.T);
    if (cfg.field_preset == "static_plus_rotating")
        return field_static_plus_rotating(cfg.e0, cfg.T);
    throw std::invalid_argument("unknown field preset '" + cfg.field_preset + "'");
}

inline PotentialSpec make_potential(const ScenarioConfig& cfg) {
    if (cfg.potential_preset == "none") return potential_none();
    if (cfg.potential_preset == "radial_log_sin")
        return potential_radial_log_sin(cfg.lambda, cfg.potential_center);
    if (cfg.potential_preset == "gaussian_bump")
        return potential_gaussian_bump(cfg.lambda, cfg.width, cfg.potential_center);
    if (cfg.potential_preset == "plane_wave")
        return potential_plane_wave(cfg.lambda, cfg.wavevec);
    throw std::invalid_argument("unknown potential preset '" + cfg.potential_preset + "'");
}

/// Numerical sup of |grad V| (radial scan from the profile center), used by
/// the small-gradient spectral refinement in the summary.
inline double gradV_sup_estimate(const PotentialSpec& pot) {
    if (pot.empty()) return 0.0;
    double sup = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        double r = 50.0 * i / 4000.0;
        sup = std::max(sup, norm(pot.gradV(0.0, pot.center + Vec2{r, 0.0})));
    }
    return sup;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

enum class RunStatus { Ok = 0, ValidationError = 1, RuntimeAbort = 2 };

struct RunOutcome {
    RunStatus status = RunStatus::Ok;
    std::string message;
    nlohmann::json summary;
};

namespace detail {

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path);
    os << "t,qx,qy,vx,vy,cx,cy,kinetic,norm,boundary_mass,autocorr_re,autocorr_im\n";
    char buf[512];
    for (const auto& r : traj.records) {
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.t, r.mean_q.x, r.mean_q.y, r.mean_v.x, r.mean_v.y, r.mean_c.x,
                      r.mean_c.y, r.kinetic, r.norm, r.boundary_mass, r.autocorr.real(),
                      r.autocorr.imag());
        os << buf;
    }
}

inline void write_report(const nlohmann::json& j, const std::string& path) {
    std::ofstream os(path);
    std::function<void(const nlohmann::json&, const std::string&)> walk =
        [&](const nlohmann::json& node, const std::string& prefix) {
            if (node.is_object()) {
                for (auto it = node.begin(); it != node.end(); ++it)
                    walk(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
            } else {
                os << prefix << ": " << node.dump() << "\n";
            }
        };
    walk(j, "");
}

inline nlohmann::json vec_json(const Vec2& v) { return nlohmann::json::array({v.x, v.y}); }

inline double rel_dev(double measured, double predicted) {
    double scale = std::max(std::abs(predicted), 1e-300);
    return std::abs(measured - predicted) / scale;
}

}  // namespace detail

/// Run one scenario: evolve, analyze, and write trajectory.csv, report.txt
/// and summary.json into the output directory.  Deterministic for a fixed
/// config, seed and thread setting.
inline RunOutcome run_scenario(const ScenarioConfig& cfg,
                               const std::string& output_root = "") {
    using nlohmann::json;
    const auto t_start = std::chrono::steady_clock::now();
    RunOutcome out;

    FieldProfile profile = make_field(cfg);
    PotentialSpec pot = make_potential(cfg);
    Grid2D grid(cfg.grid_n, cfg.grid_L, cfg.momentum_budget, cfg.allow_tight_budget);

    PropagatorPlan plan{profile, pot, grid, cfg.steps_per_period,
                        cfg.frame == "comoving" ? Frame::Comoving : Frame::Lab};
    plan.boundary_abort = cfg.boundary_abort;
    plan.comoving_z0 = {cfg.q0, cfg.p0};
    plan.validate();

    WaveFunction psi0 = make_gaussian(grid, cfg.q0, cfg.p0, cfg.sigma);

    std::filesystem::path dir = cfg.output_dir;
    if (!output_root.empty()) dir = std::filesystem::path(output_root) / cfg.output_dir;
    std::filesystem::create_directories(dir);

    EvolveResult res = evolve_stroboscopic(plan, psi0, cfg.n_periods, cfg.name);
    detail::write_trajectory_csv(res.trajectory, (dir / "trajectory.csv").string());

    const double gradsup = gradV_sup_estimate(pot);
    PredictionRecord pred = theorem_predictions(profile, pot.empty() ? -1.0 : gradsup);

    json j;
    j["scenario"] = cfg.name;
    j["field"] = {{"preset", cfg.field_preset}, {"T", cfg.T}};
    j["potential"] = {{"preset", cfg.potential_preset},
                      {"lambda", cfg.lambda},
                      {"grad_sup", gradsup},
                      {"center", detail::vec_json(cfg.potential_center)}};
    j["grid"] = {{"n", grid.n}, {"L", grid.L}, {"nyquist", grid.nyquist()}};
    j["run"] = {{"n_periods_requested", cfg.n_periods},
                {"n_periods_done", (int)res.trajectory.records.size() - 1},
                {"steps_per_period", cfg.steps_per_period},
                {"frame", cfg.frame},
                {"aborted", res.aborted},
                {"abort_period", res.abort_period},
                {"seed", cfg.seed}};
    j["predictions"] = {{"v_asy", detail::vec_json(pred.v_asy_pred)},
                        {"rho", pred.rho_pred},
                        {"resonance", to_string(pred.resonance)},
                        {"spectral_expectation", to_string(pred.spectral_expectation)},
                        {"int_E", detail::vec_json(pred.int_E)},
                        {"int_RE", detail::vec_json(pred.int_RE)}};

    double norm_drift = 0.0, max_bm = 0.0;
    for (const auto& r : res.trajectory.records) {
        norm_drift = std::max(norm_drift, std::abs(r.norm - 1.0));
        max_bm = std::max(max_bm, r.boundary_mass);
    }
    j["run"]["norm_drift"] = norm_drift;
    j["run"]["max_boundary_mass"] = max_bm;

    const bool enough = res.trajectory.records.size() >= 9;
    json meas;
    if (cfg.growth_fit && enough) {
        auto fit = energy_growth_fit(res.trajectory,
                                     pred.resonance == ResonanceClass::Resonant);
        meas["rho_hat"] = fit.rho_hat;
        meas["rho_resonant_scenario"] = fit.resonant_scenario;
        meas["rho_rel_dev"] =
            pred.rho_pred > 0 ? detail::rel_dev(fit.rho_hat, pred.rho_pred)
                              : std::abs(fit.rho_hat);
    }
    if (cfg.velocity_fit && enough) {
        auto vel = asymptotic_velocity_estimate(res.trajectory);
        meas["v_asy_est"] = detail::vec_json(vel.v);
        meas["v_asy_stderr"] = detail::vec_json(vel.stderr);
        meas["virial"] = norm(vel.v);
        meas["v_rel_dev"] = norm(pred.v_asy_pred) > 0
                                ? norm(vel.v - pred.v_asy_pred) / norm(pred.v_asy_pred)
                                : norm(vel.v);
    }
    if (cfg.classifier && res.trajectory.records.size() >= 17) {
        auto series = autocorrelation_series(res.trajectory);
        meas["cesaro_mean"] = cesaro_mean(series, series.size() - 1);
        meas["classifier"] = to_string(spectral_classify(series));
    }
    if (cfg.mourre != "none" && !res.aborted) {
        json arr = json::array();
        auto run_tag = [&](MourreTag tag, const char* name) {
            MourreReport rep = mourre_expectation(plan, psi0, tag);
            arr.push_back({{"tag", name},
                           {"predicted", rep.predicted},
                           {"measured", rep.measured},
                           {"deviation", rep.measured - rep.predicted},
                           {"center_radius", rep.center_radius}});
        };
        DriftIntegrals d = drift_integrals(profile, cfg.T);
        if ((cfg.mourre == "A_c" || cfg.mourre == "both") && norm(d.a_c) > 1e-12)
            run_tag(MourreTag::A_c, "A_c");
        if ((cfg.mourre == "A_v" || cfg.mourre == "both") && norm(d.a_v) > 1e-12)
            run_tag(MourreTag::A_v, "A_v");
        meas["mourre"] = arr;
    }
    j["measured"] = meas;

    if (cfg.write_state && !res.aborted)
        dump_state(res.final_state, (dir / "final_state.cyrs").string());

    j["run"]["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    std::ofstream(dir / "summary.json") << j.dump(2) << "\n";
    detail::write_report(j, (dir / "report.txt").string());

    if (res.aborted) {
        out.status = RunStatus::RuntimeAbort;
        out.message = cfg.name + ": boundary mass exceeded " +
                      std::to_string(cfg.boundary_abort) + " at period " +
                      std::to_string(res.abort_period);
    }
    out.summary = std::move(j);
    return out;
}

// ---------------------------------------------------------------------------
// Preset catalog
// ---------------------------------------------------------------------------

struct PresetEntry {
    std::string name;
    std::string targets;  // which prediction the scenario exercises
    ScenarioConfig config;
};

inline std::vector<PresetEntry> preset_catalog() {
    std::vector<PresetEntry> cat;
    {
        ScenarioConfig c;
        c.name = "resonant_growth";
        c.field_preset = "cosine";
        c.T = 2.0 * M_PI;
        c.amplitude = 1.0;
        c.harmonic = 1;
        c.grid_n = 1024;
        c.grid_L = 80.0;
        c.momentum_budget = 16.3;
        c.steps_per_period = 256;
        c.n_periods = 8;
        c.mourre = "A_v";
        c.output_dir = "out/resonant_growth";
        cat.push_back({c.name,
                       "resonant kinetic-energy growth <H_La>(nT) ~ rho (nT)^2 with "
                       "rho = |int R E|^2 / 2T^2 (free drive)",
                       c});
    }
    {
        ScenarioConfig c;
        c.name = "impurity_growth";
        c.field_preset = "cosine";
        c.T = 2.0 * M_PI;
        c.amplitude = 1.0;
        c.harmonic = 1;
        c.potential_preset = "radial_log_sin";
        c.lambda = 0.3;
        c.grid_n = 1024;
        c.grid_L = 160.0;
        c.momentum_budget = 19.3;
        c.allow_tight_budget = true;
        c.steps_per_period = 256;
        c.n_periods = 10;
        c.output_dir = "out/impurity_growth";
        cat.push_back({c.name,
                       "growth-rate stability: the same rho despite a bounded impurity "
                       "whose force decays at infinity",
                       c});
    }
    {
        ScenarioConfig c;
        c.name = "hall_drift";
        c.field_preset = "constant";
        c.T = 1.0;
        c.e0 = {0.2, 0.0};
        c.grid_n = 256;
        c.grid_L = 64.0;
        c.momentum_budget = 6.4;
        c.p0 = {0.0, -0.2};  // start at the predicted drift velocity
        c.steps_per_period = 256;
        c.n_periods = 32;
        c.output_dir = "out/hall_drift";
        cat.push_back({c.name,
                       "Hall drift law v_asy = -E^perp for a constant non-resonant drive",
                       c});
    }
    {
        ScenarioConfig c;
        c.name = "suppressed_drift";
        c.field_preset = "static_plus_rotating";
        c.T = 2.0 * M_PI;
        c.e0 = {0.1, 0.0};
        c.grid_n = 512;
        c.grid_L = 64.0;
        c.momentum_budget = 13.0;
        c.steps_per_period = 128;
        c.n_periods = 16;
        c.output_dir = "out/suppressed_drift";
        cat.push_back({c.name,
                       "vanishing asymptotic velocity for E0 + R(-t)E0 despite nonzero "
                       "mean drive (energy still grows)",
                       c});
    }
    {
        ScenarioConfig c;
        c.name = "pure_point_trap";
        c.field_preset = "cosine";
        c.T = 2.0 * M_PI;
        c.amplitude = 1.0;
        c.harmonic = 2;  // int E = int RE = 0
        c.potential_preset = "gaussian_bump";
        c.lambda = 0.05;
        c.width = 6.0;
        c.grid_n = 256;
        c.grid_L = 40.0;
        c.momentum_budget = 4.5;
        c.steps_per_period = 128;
        c.n_periods = 64;
        c.output_dir = "out/pure_point_trap";
        cat.push_back({c.name,
                       "recurrent trapped regime: zero-mean resonant-period drive plus a "
                       "decaying impurity gives persistent returns, bounded energy and "
                       "zero drift",
                       c});
    }
    {
        ScenarioConfig c;
        c.name = "small_gradient_ac";
        c.field_preset = "constant";
        c.T = 2.0 * M_PI;
        c.e0 = {0.4, 0.0};
        c.potential_preset = "radial_log_sin";
        c.lambda = 0.2;  // sup |grad V| < |int E| / T
        c.grid_n = 1024;
        c.grid_L = 80.0;
        c.momentum_budget = 15.4;
        c.q0 = {0.0, 20.0};   // path centered across the impurity
        c.p0 = {-10.0, -0.4};
        c.steps_per_period = 128;
        c.n_periods = 16;
        c.output_dir = "out/small_gradient_ac";
        cat.push_back({c.name,
                       "fully transporting regime when the drive dominates the impurity "
                       "force everywhere: decaying returns even across the impurity core",
                       c});
    }
    return cat;
}

inline const PresetEntry* find_preset(const std::string& name) {
    static const std::vector<PresetEntry> cat = preset_catalog();
    for (const auto& e : cat)
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace cyclores
