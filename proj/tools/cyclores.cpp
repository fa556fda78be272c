// Scenario-driven batch runner for the planar cyclotron-resonance simulator.
//
//   cyclores run <config> [--output-root DIR]
//   cyclores presets
//   cyclores sweep <config-dir> [--output-root DIR] [--jobs N]
//
// Exit codes: 0 ok, 1 validation error, 2 runtime abort.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <vector>

#include "cyclores/cyclores.hpp"

namespace fs = std::filesystem;
using namespace cyclores;

static std::string output_root_from_env(const std::string& cli_value) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("CYCLO_OUTPUT_ROOT")) return env;
    return "";
}

static int run_one(const std::string& path, const std::string& root, bool quiet = false) {
    std::vector<ConfigError> errors;
    std::optional<ScenarioConfig> cfg;
    if (const PresetEntry* p = find_preset(path))
        cfg = p->config;  // allow `run <preset-name>` directly
    else
        cfg = parse_scenario_file(path, errors);
    if (!cfg) {
        for (const auto& e : errors) {
            if (e.line > 0)
                std::cerr << path << ":" << e.line << ": " << e.message << "\n";
            else
                std::cerr << path << ": " << e.message << "\n";
        }
        return 1;
    }
    try {
        RunOutcome out = run_scenario(*cfg, root);
        if (!quiet) {
            std::cout << out.summary.dump(2) << "\n";
        }
        if (out.status == RunStatus::RuntimeAbort) {
            std::cerr << out.message << "\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& ex) {
        std::cerr << path << ": " << ex.what() << "\n";
        return 1;
    }
}

int main(int argc, char** argv) {
    CLI::App app{"cyclores: planar magnetic dynamics under a periodic drive"};
    app.require_subcommand(1);

    std::string config_path, output_root, sweep_dir;
    int jobs = 2;

    auto* run = app.add_subcommand("run", "run one scenario config (or preset name)");
    run->add_option("config", config_path, "scenario file or preset name")->required();
    run->add_option("--output-root", output_root, "prefix for output directories");

    auto* presets = app.add_subcommand("presets", "list the built-in scenario presets");

    auto* sweep = app.add_subcommand("sweep", "run every *.cfg in a directory");
    sweep->add_option("dir", sweep_dir, "directory of scenario configs")->required();
    sweep->add_option("--output-root", output_root, "prefix for output directories");
    sweep->add_option("--jobs", jobs, "worker count (one grid per worker)")
        ->check(CLI::Range(1, 64));

    CLI11_PARSE(app, argc, argv);
    const std::string root = output_root_from_env(output_root);

    if (presets->parsed()) {
        for (const auto& e : preset_catalog()) {
            std::printf("%-18s %s\n", e.name.c_str(), e.targets.c_str());
            std::printf("%-18s grid %dx%d L=%g, T=%g, %d periods\n", "",
                        e.config.grid_n, e.config.grid_n, e.config.grid_L, e.config.T,
                        e.config.n_periods);
        }
        return 0;
    }

    if (run->parsed()) return run_one(config_path, root);

    // sweep: fan scenarios out to a small pool, one grid per worker
    std::vector<fs::path> files;
    if (!fs::is_directory(sweep_dir)) {
        std::cerr << "sweep: '" << sweep_dir << "' is not a directory\n";
        return 1;
    }
    for (const auto& entry : fs::directory_iterator(sweep_dir))
        if (entry.path().extension() == ".cfg") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "sweep: no .cfg files in " << sweep_dir << "\n";
        return 1;
    }

    std::atomic<size_t> next{0};
    std::atomic<int> worst{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            int rc = run_one(files[i].string(), root, /*quiet=*/true);
            std::printf("[%s] exit %d\n", files[i].filename().string().c_str(), rc);
            int cur = worst.load();
            while (rc > cur && !worst.compare_exchange_weak(cur, rc)) {}
        }
    };
    std::vector<std::future<void>> pool;
    int nworkers = std::min<int>(jobs, (int)files.size());
    for (int w = 0; w < nworkers; ++w)
        pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
    return worst.load();
}
