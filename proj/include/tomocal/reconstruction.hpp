#pragma once
// Tomogram simulation, iterative maximum-likelihood reconstruction and the
// rotating-waveplate Fourier polarimeter.

#include <cstdint>
#include <optional>
#include <vector>

#include "tomocal/qubit.hpp"

namespace tomocal {

struct SettingRecord {
    int effectIndex = 0;
    double fPlus = 0.0;   // relative frequency of the effect outcome
    double fMinus = 1.0;  // relative frequency of the complement I - effect
};

struct Tomogram {
    std::vector<SettingRecord> perSetting;
    std::optional<long> shots;  // per setting; empty means exact probabilities
};

struct MaxLikOptions {
    int maxIterations = 10000;
    double traceDistanceTol = 1e-10;
    double dilution = 1.0;  // falls back to half on likelihood decrease
};

struct MaxLikResult {
    DensityMatrix rho;
    int iterations = 0;
    bool converged = false;
    double logLikelihood = 0.0;
};

// fPlus_j = Tr(rho pi_j) exactly, or a binomial frequency when shots given.
Tomogram simulate_tomogram(const DensityMatrix& rho, const std::vector<Effect>& trueEffects,
                           std::optional<long> shots = std::nullopt,
                           std::optional<std::uint64_t> rngSeed = std::nullopt);

// Diluted R rho R iteration for the two-outcome-per-setting model.
MaxLikResult maxlik(const Tomogram& t, const std::vector<Effect>& assumedEffects,
                    const MaxLikOptions& opts = {});

double log_likelihood(const DensityMatrix& rho, const Tomogram& t,
                      const std::vector<Effect>& effects);

// --- rotating quarter-wave plate polarimetry -----------------------------

// Convention: s1 is the |0>/|1> (H/V) balance, i.e. the sigma_z component;
// s2 the sigma_x and s3 the sigma_y component.
struct StokesVector {
    double s0 = 1.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    double degree_of_polarization() const {
        return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3) / s0;
    }
};

StokesVector stokes_from_density(const DensityMatrix& rho, double s0 = 1.0);
Mat2 density_carrier_from_stokes(const StokesVector& s);  // trace = s0, may be unphysical

struct PolarimeterTrace {
    std::vector<double> angles;       // QWP orientations over one turn, increasing
    std::vector<double> intensities;  // detector signal, >= 0
};

// I(a) = s0 * Tr[rho W(a, pi/2 + trueRetardanceDev)^dag |0><0| W(...)]
PolarimeterTrace polarimeter_trace(const DensityMatrix& rho, double trueRetardanceDev,
                                   int nSamples, double s0 = 1.0);

// Fourier analysis at the assumed retardance; the result may be unphysical
// (degree of polarization above 1) when the assumption is wrong.
StokesVector polarimeter_reconstruct(const PolarimeterTrace& trace,
                                     double assumedRetardanceDev);

}  // namespace tomocal
