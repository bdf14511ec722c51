#pragma once
// Experiment runner: JSON configuration, scenario pipelines, summary/CSV/SVG
// emission. All config angles are degrees; everything internal is radians.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tomocal/calibration.hpp"
#include "tomocal/probes.hpp"

namespace tomocal::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario {
    additiveStudy,
    multiplicative,
    waveplate,
    reversedWaveplate,
    polarimeter,
    chip,
    landscape
};

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

struct ProbeSpec {
    ProbeKind kind = ProbeKind::fibonacci;
    std::optional<int> n = 30;
    double purity = 1.0;  // probe Bloch vectors scaled to this purity
};

struct AxisSpec {
    std::string param;  // model parameter name, e.g. "delta", "dTheta3", "c2"
    double minValue = 0, maxValue = 0;  // degrees for angle parameters
    int count = 0;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::additiveStudy;
    ProbeSpec probe;
    ProbeSpec testStates{ProbeKind::fibonacci, 108, 1.0};
    int trials = 1;
    std::optional<long> shots;
    std::uint64_t seed = 0;
    std::filesystem::path outputDir = "out";

    // truth: fixed parameters (degrees for angles) or a normal distribution
    std::vector<double> truthParams;
    std::optional<double> truthSigmaDeg;

    OptimizerConfig optimizer;  // bounds in radians
    bool optimizerBoundsSet = false;

    // landscape scenario
    std::string landscapeModel = "multiplicative";
    std::vector<AxisSpec> axes;
    LandscapeMetric landscapeMetric = LandscapeMetric::purityModulation;

    // polarimeter scenario
    double trueDeviationDeg = 5.0;
    double assumedDeviationDeg = 0.0;
    double scanMinDeg = 0.0, scanMaxDeg = 10.0, scanStepDeg = 0.25;
    int traceSamples = 360;

    // chip scenario
    std::array<double, 6> chipTruth{};
    std::array<double, 6> chipAssumed{};
    double chipMaxVolt = 22.0;
};

// Strict parse: unknown keys and schema mismatches throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json demo_additive_config();  // small built-in study

struct RunOptions {
    std::optional<std::filesystem::path> outDir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool figures = true;
};

struct EnsembleStats {
    double minFidelity = 0, meanFidelity = 0, minPurity = 0, meanPurity = 0;
};

struct TrialRecord {
    int trialIndex = 0;
    bool failed = false;
    std::string error;
    std::vector<double> truth;      // radians / native units
    std::vector<double> recovered;
    double deltaPBefore = 0, deltaPAfter = 0;
    EnsembleStats testBefore, testAfter;  // testAfter is gauge-corrected
    std::optional<double> resolvedMinFidelity;  // waveplate: re-solved settings
    std::optional<double> probeMinPurityBefore;
    std::vector<double> probePuritiesBefore, probePuritiesAfter;
    long evaluations = 0;
    bool converged = false;
};

void to_json(nlohmann::json& j, const EnsembleStats& s);
void from_json(const nlohmann::json& j, EnsembleStats& s);
void to_json(nlohmann::json& j, const TrialRecord& r);
void from_json(const nlohmann::json& j, TrialRecord& r);

struct RunResult {
    int exitCode = 0;
    nlohmann::json summary;
    std::vector<TrialRecord> trials;
};

// Executes the scenario, writes summary.json / trials.csv / figures.
RunResult run_scenario(const ExperimentConfig& cfg, const RunOptions& opts);

// --- small utilities (tested directly) -----------------------------------

// Equal-area Hammer projection of a Bloch point; |u| <= 2 sqrt(2), |v| <= sqrt(2).
std::pair<double, double> hammer_project(double colatitude, double longitude);

// Nearest-rank quantile: rank = ceil(q n) of the sorted sample, q in (0, 1].
double quantile_nearest_rank(std::vector<double> values, double q);

// trialSeed = splitmix64 hash of (rootSeed, trialIndex)
std::uint64_t trial_seed(std::uint64_t rootSeed, int trialIndex);

// Indices of the two probes closest to lying 60 deg apart on the equator.
std::pair<int, int> gauge_reference_pair(const std::vector<PureState>& probes);

// --- figures (static SVG) ------------------------------------------------

struct SpherePoint {
    double theta = 0, phi = 0, value = 0;
};

void write_purity_map_svg(const std::filesystem::path& file,
                          const std::vector<SpherePoint>& points, double lo, double hi,
                          const std::string& title);
void write_heatmap_svg(const std::filesystem::path& file, const LandscapeGrid& grid,
                       bool logScale, const std::string& title);
void write_curve_svg(const std::filesystem::path& file, const std::vector<double>& x,
                     const std::vector<double>& y, const std::string& xLabel,
                     const std::string& yLabel, const std::string& title);

}  // namespace tomocal::harness
