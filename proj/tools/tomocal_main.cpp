#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "tomocal/harness.hpp"

namespace {

using namespace tomocal::harness;

int threads_from_env() {
    if (const char* env = std::getenv("TOMOCAL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

struct CommonFlags {
    std::string out;
    std::int64_t seed = -1;
    int threads = 0;
    bool noFigures = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", out, "Output directory override");
        cmd->add_option("--seed", seed, "Seed override");
        cmd->add_option("--threads", threads, "Worker threads (default TOMOCAL_THREADS or 1)");
        cmd->add_flag("--no-figures", noFigures, "Skip SVG emission");
    }

    RunOptions options() const {
        RunOptions o;
        if (!out.empty()) o.outDir = out;
        if (seed >= 0) o.seed = static_cast<std::uint64_t>(seed);
        o.threads = threads > 0 ? threads : threads_from_env();
        o.figures = !noFigures;
        return o;
    }
};

int run_from(const ExperimentConfig& cfg, const CommonFlags& flags) {
    const RunResult res = run_scenario(cfg, flags.options());
    return res.exitCode;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tomography simulator, reconstructor and measurement calibrator"};
    app.require_subcommand(1);

    std::string configPath;
    CommonFlags flags[5];
    const char* names[4] = {"run", "landscape", "polarimeter", "chip"};
    const char* descs[4] = {"Run a study scenario from a JSON config",
                            "Evaluate a cost-function landscape",
                            "Rotating-waveplate polarimeter scenario",
                            "Photonic-chip calibration scenario"};
    CLI::App* subs[4];
    for (int i = 0; i < 4; ++i) {
        subs[i] = app.add_subcommand(names[i], descs[i]);
        subs[i]->add_option("config", configPath, "JSON configuration file")->required();
        flags[i].attach(subs[i]);
    }
    CLI::App* demo = app.add_subcommand("demo-additive", "Built-in small additive study");
    flags[4].attach(demo);

    CLI11_PARSE(app, argc, argv);

    try {
        if (demo->parsed()) return run_from(parse_config(demo_additive_config()), flags[4]);
        for (int i = 0; i < 4; ++i) {
            if (!subs[i]->parsed()) continue;
            const ExperimentConfig cfg = load_config(configPath);
            const Scenario expected[4] = {cfg.scenario, Scenario::landscape,
                                          Scenario::polarimeter, Scenario::chip};
            if (cfg.scenario != expected[i])
                throw ConfigError("config scenario does not match the subcommand");
            return run_from(cfg, flags[i]);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
