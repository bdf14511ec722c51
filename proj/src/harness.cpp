#include "tomocal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tomocal::harness {

namespace {

constexpr double kPi = std::numbers::pi;

using nlohmann::json;

void expect_keys(const json& obj, const char* ctx, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(ctx) + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw ConfigError(std::string(ctx) + ": unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) throw ConfigError(std::string(key) + ": expected a number");
    return obj.at(key).get<double>();
}

std::vector<double> get_array(const json& obj, const char* key) {
    std::vector<double> out;
    for (const auto& v : obj.at(key)) {
        if (!v.is_number()) throw ConfigError(std::string(key) + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

ProbeSpec parse_probe(const json& j, const char* ctx) {
    expect_keys(j, ctx, {"kind", "n", "purity"});
    ProbeSpec p;
    try {
        p.kind = probe_kind_from_name(j.at("kind").get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(ctx) + ": " + e.what());
    }
    if (j.contains("n")) p.n = j.at("n").get<int>();
    p.purity = get_number(j, "purity", 1.0);
    if (p.purity < 0.5 || p.purity > 1.0)
        throw ConfigError(std::string(ctx) + ": purity outside [0.5, 1]");
    return p;
}

void parse_optimizer(const json& j, ExperimentConfig& cfg) {
    expect_keys(j, "optimizer",
                {"lhSamples", "maxEvaluations", "localStarts", "meshInitial", "meshMin",
                 "lowerBound", "upperBound"});
    auto& o = cfg.optimizer;
    o.lhSamples = static_cast<int>(get_number(j, "lhSamples", o.lhSamples));
    o.maxEvaluations = static_cast<long>(get_number(j, "maxEvaluations", o.maxEvaluations));
    o.localStarts = static_cast<int>(get_number(j, "localStarts", o.localStarts));
    o.meshInitial = get_number(j, "meshInitial", o.meshInitial);
    o.meshMin = get_number(j, "meshMin", o.meshMin);
    if (j.contains("lowerBound") || j.contains("upperBound")) {
        o.lowerBound = get_array(j, "lowerBound");
        o.upperBound = get_array(j, "upperBound");
        if (o.lowerBound.size() != o.upperBound.size())
            throw ConfigError("optimizer: bound arrays differ in length");
        cfg.optimizerBoundsSet = true;
    }
    if (o.lhSamples < 1 || o.maxEvaluations < 1 || o.localStarts < 1)
        throw ConfigError("optimizer: counts must be positive");
}

}  // namespace

Scenario scenario_from_name(const std::string& name) {
    if (name == "additive_study") return Scenario::additiveStudy;
    if (name == "multiplicative") return Scenario::multiplicative;
    if (name == "waveplate") return Scenario::waveplate;
    if (name == "reversed_waveplate") return Scenario::reversedWaveplate;
    if (name == "polarimeter") return Scenario::polarimeter;
    if (name == "chip") return Scenario::chip;
    if (name == "landscape") return Scenario::landscape;
    throw ConfigError("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::additiveStudy: return "additive_study";
        case Scenario::multiplicative: return "multiplicative";
        case Scenario::waveplate: return "waveplate";
        case Scenario::reversedWaveplate: return "reversed_waveplate";
        case Scenario::polarimeter: return "polarimeter";
        case Scenario::chip: return "chip";
        case Scenario::landscape: return "landscape";
    }
    throw ConfigError("unknown scenario");
}

ExperimentConfig parse_config(const json& j) {
    expect_keys(j, "config",
                {"schemaVersion", "scenario", "seed", "trials", "shots", "outputDir", "probe",
                 "testStates", "truth", "optimizer", "landscape", "polarimeter", "chip"});
    if (!j.contains("schemaVersion") || j.at("schemaVersion") != "1")
        throw ConfigError("schemaVersion missing or not \"1\"");
    if (!j.contains("scenario")) throw ConfigError("scenario missing");

    ExperimentConfig cfg;
    cfg.scenario = scenario_from_name(j.at("scenario").get<std::string>());
    cfg.seed = static_cast<std::uint64_t>(get_number(j, "seed", 0));
    cfg.trials = static_cast<int>(get_number(j, "trials", 1));
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (j.contains("shots") && !j.at("shots").is_null()) {
        cfg.shots = j.at("shots").get<long>();
        if (*cfg.shots < 1) throw ConfigError("shots must be >= 1");
    }
    if (j.contains("outputDir")) cfg.outputDir = j.at("outputDir").get<std::string>();
    if (j.contains("probe")) cfg.probe = parse_probe(j.at("probe"), "probe");
    // chip probes default slightly mixed: with exactly pure probes the
    // modulation cost is blind to coefficient corners that clip every
    // reconstruction to the pure boundary (uniform purity 1, zero modulation)
    if (cfg.scenario == Scenario::chip &&
        !(j.contains("probe") && j.at("probe").contains("purity")))
        cfg.probe.purity = 0.995;
    if (j.contains("testStates")) cfg.testStates = parse_probe(j.at("testStates"), "testStates");

    if (j.contains("truth")) {
        const auto& t = j.at("truth");
        expect_keys(t, "truth", {"params", "sigmaDeg"});
        if (t.contains("params")) cfg.truthParams = get_array(t, "params");
        if (t.contains("sigmaDeg")) cfg.truthSigmaDeg = t.at("sigmaDeg").get<double>();
        if (t.contains("params") == t.contains("sigmaDeg"))
            throw ConfigError("truth: give exactly one of params / sigmaDeg");
    }
    if (j.contains("optimizer")) parse_optimizer(j.at("optimizer"), cfg);

    if (j.contains("landscape")) {
        const auto& l = j.at("landscape");
        expect_keys(l, "landscape", {"model", "axes", "metric"});
        if (l.contains("model")) cfg.landscapeModel = l.at("model").get<std::string>();
        if (l.contains("metric")) {
            const std::string m = l.at("metric").get<std::string>();
            if (m == "deltaP") cfg.landscapeMetric = LandscapeMetric::purityModulation;
            else if (m == "minPurity") cfg.landscapeMetric = LandscapeMetric::minPurity;
            else throw ConfigError("landscape.metric: deltaP or minPurity");
        }
        for (const auto& a : l.at("axes")) {
            expect_keys(a, "axis", {"param", "min", "max", "count"});
            AxisSpec ax;
            ax.param = a.at("param").get<std::string>();
            ax.minValue = a.at("min").get<double>();
            ax.maxValue = a.at("max").get<double>();
            ax.count = a.at("count").get<int>();
            if (ax.count < 2 || ax.maxValue <= ax.minValue)
                throw ConfigError("landscape axis: need count >= 2 and max > min");
            cfg.axes.push_back(std::move(ax));
        }
        if (cfg.axes.empty() || cfg.axes.size() > 2)
            throw ConfigError("landscape: need 1 or 2 axes");
    } else if (cfg.scenario == Scenario::landscape) {
        throw ConfigError("landscape scenario requires a landscape section");
    }

    if (j.contains("polarimeter")) {
        const auto& p = j.at("polarimeter");
        expect_keys(p, "polarimeter",
                    {"trueDeviationDeg", "assumedDeviationDeg", "scanMinDeg", "scanMaxDeg",
                     "scanStepDeg", "traceSamples"});
        cfg.trueDeviationDeg = get_number(p, "trueDeviationDeg", cfg.trueDeviationDeg);
        cfg.assumedDeviationDeg = get_number(p, "assumedDeviationDeg", cfg.assumedDeviationDeg);
        cfg.scanMinDeg = get_number(p, "scanMinDeg", cfg.scanMinDeg);
        cfg.scanMaxDeg = get_number(p, "scanMaxDeg", cfg.scanMaxDeg);
        cfg.scanStepDeg = get_number(p, "scanStepDeg", cfg.scanStepDeg);
        cfg.traceSamples = static_cast<int>(get_number(p, "traceSamples", cfg.traceSamples));
        if (cfg.scanStepDeg <= 0 || cfg.scanMaxDeg <= cfg.scanMinDeg)
            throw ConfigError("polarimeter: bad scan range");
    }

    if (j.contains("chip")) {
        const auto& c = j.at("chip");
        expect_keys(c, "chip", {"truth", "assumed", "maxVolt"});
        const auto truth = get_array(c, "truth");
        const auto assumed = get_array(c, "assumed");
        if (truth.size() != 6 || assumed.size() != 6)
            throw ConfigError("chip: truth and assumed need 6 coefficients");
        std::copy(truth.begin(), truth.end(), cfg.chipTruth.begin());
        std::copy(assumed.begin(), assumed.end(), cfg.chipAssumed.begin());
        cfg.chipMaxVolt = get_number(c, "maxVolt", cfg.chipMaxVolt);
    } else if (cfg.scenario == Scenario::chip) {
        throw ConfigError("chip scenario requires a chip section");
    }

    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return parse_config(j);
}

json demo_additive_config() {
    return json{{"schemaVersion", "1"},
                {"scenario", "additive_study"},
                {"seed", 7},
                {"trials", 3},
                {"outputDir", "demo-out"},
                {"probe", {{"kind", "fibonacci"}, {"n", 30}}},
                {"testStates", {{"kind", "fibonacci"}, {"n", 108}}},
                {"truth", {{"sigmaDeg", 10.0}}},
                {"optimizer",
                 {{"lhSamples", 120}, {"maxEvaluations", 4000}, {"localStarts", 2}}}};
}

std::pair<double, double> hammer_project(double colatitude, double longitude) {
    const double lat = kPi / 2 - colatitude;
    double lon = std::fmod(longitude + kPi, 2 * kPi);
    if (lon < 0) lon += 2 * kPi;
    lon -= kPi;  // (-pi, pi]
    const double denom = std::sqrt(1.0 + std::cos(lat) * std::cos(lon / 2));
    return {2.0 * std::numbers::sqrt2 * std::cos(lat) * std::sin(lon / 2) / denom,
            std::numbers::sqrt2 * std::sin(lat) / denom};
}

double quantile_nearest_rank(std::vector<double> values, double q) {
    if (values.empty() || q <= 0.0 || q > 1.0)
        throw std::invalid_argument("quantile_nearest_rank: bad input");
    std::sort(values.begin(), values.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

std::uint64_t trial_seed(std::uint64_t rootSeed, int trialIndex) {
    std::uint64_t z = rootSeed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(trialIndex) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::pair<int, int> gauge_reference_pair(const std::vector<PureState>& probes) {
    if (probes.size() < 2) throw std::invalid_argument("gauge_reference_pair: need >= 2 probes");
    std::pair<int, int> best{0, 1};
    double bestScore = 1e300;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const BlochVector a = probes[i].bloch();
        for (std::size_t k = i + 1; k < probes.size(); ++k) {
            const BlochVector b = probes[k].bloch();
            const double ang =
                std::acos(std::clamp(a.x * b.x + a.y * b.y + a.z * b.z, -1.0, 1.0));
            // prefer 60 deg separation and equatorial placement
            const double score = std::abs(ang - kPi / 3) + std::abs(a.z) + std::abs(b.z);
            if (score < bestScore) {
                bestScore = score;
                best = {static_cast<int>(i), static_cast<int>(k)};
            }
        }
    }
    return best;
}

}  // namespace tomocal::harness
