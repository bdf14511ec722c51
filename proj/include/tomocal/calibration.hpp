#pragma once
// Measurement-device-agnostic calibration: purity-modulation cost,
// global (Latin hypercube + pattern search) and local (Nelder-Mead)
// parameter estimation, gauge fixing and landscape scans.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tomocal/models.hpp"
#include "tomocal/optim.hpp"
#include "tomocal/reconstruction.hpp"

namespace tomocal {

struct OptimizerConfig {
    std::vector<double> lowerBound;  // per parameter, radians
    std::vector<double> upperBound;
    int lhSamples = 1100;
    long maxEvaluations = 100000;
    std::uint64_t seed = 0;
    int localStarts = 4;
    double meshInitial = 0.1;
    double meshMin = 1e-5;
    // Optional linear reparametrization (row-major dim x dim): the search
    // runs over y inside [lowerBound, upperBound] and the model receives
    // x = searchBasis * y. Empty means x = y. Lets a family expose
    // well-conditioned search coordinates (e.g. phase values instead of
    // polynomial coefficients) without touching the model itself.
    std::vector<double> searchBasis;

    // uniform +-0.5 rad box sized for the model
    static OptimizerConfig defaults_for(const ErrorModel& prototype);
};

struct CalibrationReport {
    ErrorModel optimalParams;
    double costBefore = 0.0;  // at the prototype's (initial assumption) parameters
    double costAfter = 0.0;
    long evaluations = 0;
    std::vector<std::pair<long, double>> costTrace;  // (evaluation index, best cost)
    std::optional<Mat2> gauge;
    bool converged = false;
};

struct LandscapeAxis {
    std::string name;
    int paramIndex = 0;
    std::vector<double> values;
};

enum class LandscapeMetric { purityModulation, minPurity };

struct LandscapeGrid {
    std::vector<LandscapeAxis> axes;  // 1 or 2
    std::vector<double> values;       // row-major, axes[0] the slow index
    LandscapeMetric metric = LandscapeMetric::purityModulation;
};

double purity_modulation(const std::vector<DensityMatrix>& states);

struct CostEval {
    double deltaP = 0.0;
    double minPurity = 0.0;
    bool allConverged = true;
};

// Reconstructs every tomogram with effects_from_model(params, layout).
CostEval evaluate_cost(const ErrorModel& params, const std::vector<Tomogram>& tomograms,
                       const MeasurementLayout& layout, const MaxLikOptions& ml = {});

// deltaP, or the 1.0 sentinel when any reconstruction failed to converge.
double calibration_cost(const ErrorModel& params, const std::vector<Tomogram>& tomograms,
                        const MeasurementLayout& layout, const MaxLikOptions& ml = {},
                        bool* diagnosticFlag = nullptr);

// Latin-hypercube scan, then pattern search from the best localStarts seeds.
CalibrationReport calibrate_global(const std::vector<Tomogram>& tomograms,
                                   const ErrorModel& prototype, const MeasurementLayout& layout,
                                   const OptimizerConfig& cfg);

// Nelder-Mead descent from start (prototype parameters when start empty).
CalibrationReport calibrate_local(const std::vector<Tomogram>& tomograms,
                                  const ErrorModel& prototype, const MeasurementLayout& layout,
                                  const OptimizerConfig& cfg, std::vector<double> start = {});

// Identical machinery on role-swapped data: local for the two-parameter
// families, global otherwise.
CalibrationReport reversed_calibration(const std::vector<Tomogram>& prepTomograms,
                                       const ErrorModel& prototype,
                                       const MeasurementLayout& layout,
                                       const OptimizerConfig& cfg);

// Unitary whose Bloch rotation best aligns (Wahba / Davenport q-method) the
// reconstructed pair to the ideal pair. Ideal Bloch angle must lie in
// [10 deg, 170 deg].
Mat2 gauge_unitary(const std::pair<DensityMatrix, DensityMatrix>& reconPair,
                   const std::pair<PureState, PureState>& idealPair);

LandscapeGrid landscape(const std::vector<Tomogram>& tomograms, const ErrorModel& prototype,
                        const MeasurementLayout& layout, std::vector<LandscapeAxis> axes,
                        LandscapeMetric metric = LandscapeMetric::purityModulation);

}  // namespace tomocal
