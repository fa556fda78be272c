#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cyclores/scenario.hpp"

using namespace cyclores;
namespace fs = std::filesystem;

namespace {

const char* kSmokeConfig = R"(# smoke scenario
[scenario]
name = smoke

[field]
preset = cosine
T = 6.283185307179586
amplitude = 0.2
harmonic = 1

[potential]
preset = none

[grid]
n = 64
L = 20

[initial]
q0x = 0.0
q0y = 0.0
p0x = 0.0
p0y = 0.0
sigma = 1.0

[evolve]
steps_per_period = 64
n_periods = 16

[analysis]
mourre = A_v
seed = 11

[output]
dir = smoke
)";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config parser", "[scenario]") {
    SECTION("valid config parses") {
        std::istringstream in(kSmokeConfig);
        std::vector<ConfigError> errors;
        auto cfg = parse_scenario(in, errors);
        REQUIRE(errors.empty());
        REQUIRE(cfg.has_value());
        REQUIRE(cfg->name == "smoke");
        REQUIRE(cfg->amplitude == 0.2);
        REQUIRE(cfg->grid_n == 64);
        REQUIRE(cfg->mourre == "A_v");
    }
    SECTION("empty config lists every missing key") {
        std::istringstream in("");
        std::vector<ConfigError> errors;
        auto cfg = parse_scenario(in, errors);
        REQUIRE_FALSE(cfg.has_value());
        REQUIRE(errors.size() >= 14);
        for (const auto& e : errors)
            REQUIRE(e.message.find("missing required key") != std::string::npos);
    }
    SECTION("unknown keys diagnosed with line numbers") {
        std::istringstream in("[field]\npreset = zero\nwibble = 3\n");
        std::vector<ConfigError> errors;
        auto cfg = parse_scenario(in, errors);
        REQUIRE_FALSE(cfg.has_value());
        bool found = false;
        for (const auto& e : errors)
            if (e.line == 3 && e.message.find("field.wibble") != std::string::npos) found = true;
        REQUIRE(found);
    }
    SECTION("malformed numbers diagnosed") {
        std::istringstream in("[grid]\nn = twelve\n");
        std::vector<ConfigError> errors;
        parse_scenario(in, errors);
        bool found = false;
        for (const auto& e : errors)
            if (e.line == 2 && e.message.find("expected a number") != std::string::npos)
                found = true;
        REQUIRE(found);
    }
}

TEST_CASE("preset catalog", "[scenario]") {
    auto cat = preset_catalog();
    REQUIRE(cat.size() == 6);
    const char* expected[] = {"resonant_growth", "impurity_growth",  "hall_drift",
                              "suppressed_drift", "pure_point_trap", "small_gradient_ac"};
    for (std::size_t i = 0; i < cat.size(); ++i) {
        REQUIRE(cat[i].name == expected[i]);
        REQUIRE_FALSE(cat[i].targets.empty());  // each names the law it exercises
        REQUIRE(cat[i].config.grid_n > 0);
    }
    // catalog is stable across calls
    auto again = preset_catalog();
    for (std::size_t i = 0; i < cat.size(); ++i) {
        REQUIRE(again[i].name == cat[i].name);
        REQUIRE(again[i].targets == cat[i].targets);
    }
    REQUIRE(find_preset("hall_drift") != nullptr);
    REQUIRE(find_preset("nope") == nullptr);
}

TEST_CASE("run_scenario produces deterministic artifacts", "[scenario]") {
    std::istringstream in(kSmokeConfig);
    std::vector<ConfigError> errors;
    auto cfg = parse_scenario(in, errors);
    REQUIRE(cfg.has_value());

    fs::path root = fs::temp_directory_path() / "cyclores_scenario_test";
    fs::remove_all(root);
    auto out1 = run_scenario(*cfg, (root / "a").string());
    auto out2 = run_scenario(*cfg, (root / "b").string());
    REQUIRE(out1.status == RunStatus::Ok);

    auto csv1 = slurp(root / "a" / "smoke" / "trajectory.csv");
    auto csv2 = slurp(root / "b" / "smoke" / "trajectory.csv");
    REQUIRE(csv1 == csv2);  // bit-identical
    REQUIRE(csv1.rfind("t,qx,qy,vx,vy,cx,cy,kinetic,norm,boundary_mass,autocorr_re,autocorr_im\n",
                       0) == 0);
    REQUIRE(std::count(csv1.begin(), csv1.end(), '\n') == 18);  // header + 17 records

    SECTION("summary juxtaposes measured and predicted quantities") {
        const auto& j = out1.summary;
        REQUIRE(j.contains("predictions"));
        REQUIRE(j.contains("measured"));
        REQUIRE(j["predictions"].contains("rho"));
        REQUIRE(j["measured"].contains("rho_hat"));
        REQUIRE(j["measured"].contains("rho_rel_dev"));
        REQUIRE(j["measured"].contains("v_rel_dev"));
        REQUIRE(j["measured"].contains("classifier"));
        REQUIRE(j["measured"]["mourre"].size() == 1);
        double rel = j["measured"]["mourre"][0]["deviation"].get<double>();
        REQUIRE(std::abs(rel) < 1e-6);  // V = 0: the free Mourre identity
        // resonant amp-0.2 drive: rho = 0.125 * 0.04
        REQUIRE(j["measured"]["rho_hat"].get<double>() ==
                Catch::Approx(0.005).epsilon(0.01));
        REQUIRE(fs::exists(root / "a" / "smoke" / "report.txt"));
        REQUIRE(fs::exists(root / "a" / "smoke" / "summary.json"));
        std::string report = slurp(root / "a" / "smoke" / "report.txt");
        REQUIRE(report.find("predictions.rho:") != std::string::npos);
        REQUIRE(report.find("measured.rho_hat:") != std::string::npos);
    }
    fs::remove_all(root);
}

TEST_CASE("run_scenario reports a boundary abort with the period index", "[scenario]") {
    ScenarioConfig cfg;
    cfg.name = "runaway";
    cfg.field_preset = "constant";
    cfg.T = 2.0 * M_PI;
    cfg.e0 = {1.5, 0.0};
    cfg.grid_n = 64;
    cfg.grid_L = 16.0;
    cfg.steps_per_period = 64;
    cfg.n_periods = 8;
    cfg.boundary_abort = 1e-8;
    cfg.classifier = false;
    cfg.output_dir = "runaway";
    fs::path root = fs::temp_directory_path() / "cyclores_abort_test";
    fs::remove_all(root);
    auto out = run_scenario(cfg, root.string());
    REQUIRE(out.status == RunStatus::RuntimeAbort);
    REQUIRE(out.summary["run"]["aborted"].get<bool>());
    REQUIRE(out.summary["run"]["abort_period"].get<int>() >= 1);
    REQUIRE(out.message.find("period") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("state dump toggle writes a loadable file", "[scenario]") {
    std::istringstream in(kSmokeConfig);
    std::vector<ConfigError> errors;
    auto cfg = parse_scenario(in, errors);
    REQUIRE(cfg.has_value());
    cfg->write_state = true;
    cfg->n_periods = 8;
    cfg->mourre = "none";
    fs::path root = fs::temp_directory_path() / "cyclores_dump_test";
    fs::remove_all(root);
    auto out = run_scenario(*cfg, root.string());
    REQUIRE(out.status == RunStatus::Ok);
    WaveFunction psi = load_state((root / "smoke" / "final_state.cyrs").string());
    REQUIRE(psi.grid.n == 64);
    REQUIRE(std::abs(psi.norm() - 1.0) < 1e-9);
    fs::remove_all(root);
}
