#pragma once
// Measurement-operator families: nominal Pauli settings, the four error
// parameterizations, waveplate preparation/projection chains and the
// path-qubit chip circuit.

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tomocal/qubit.hpp"

namespace tomocal {

struct PauliSetting {
    int index = 1;      // 1..6
    double thetaY = 0;  // rotation about y, radians
    double phiZ = 0;    // rotation about z, radians
};

// The six standard settings: projections onto |0>, |1>, |->, |+>, |R>, |L>.
std::vector<PauliSetting> pauli_settings();

enum class WaveplateRole { preparation, projection };

struct WaveplateSetting {
    double hwpAngle = 0;  // x, radians
    double qwpAngle = 0;  // y, radians
    WaveplateRole role = WaveplateRole::projection;
};

// Waveplate angles realizing the six Pauli settings for the given stage.
// Projection chain (propagation order): HWP(x) then QWP(y), then |0> port.
// Preparation chain: QWP(y) then HWP(x) applied to |0>.
std::vector<WaveplateSetting> waveplate_settings(WaveplateRole role);

struct ChipDrive {
    double v1 = 0;  // volts, heater of phase phi1
    double v2 = 0;
};

// --- error families ------------------------------------------------------

struct AdditiveAngles {
    std::array<double, 6> deltaTheta{};  // delta_j, radians
    std::array<double, 6> deltaPhi{};    // epsilon_j, radians
};

struct Multiplicative {
    double delta = 0;    // theta scale error, dimensionless
    double epsilon = 0;  // phi scale error
};

struct WaveplateRetardance {
    double delta = 0;    // HWP retardance deviation from pi, radians
    double epsilon = 0;  // QWP retardance deviation from pi/2, radians
    WaveplateRole role = WaveplateRole::projection;
};

struct ChipPolynomial {
    // phi1(V) = c[0] + c[1] V + c[2] V^2,  phi2(V) = c[3] + c[4] V + c[5] V^2
    std::array<double, 6> c{};
};

using ErrorModel = std::variant<AdditiveAngles, Multiplicative, WaveplateRetardance, ChipPolynomial>;

int parameter_count(const ErrorModel& model);
std::vector<double> parameters_of(const ErrorModel& model);
// Rebuilds a model of the same variant (and role, for waveplates) from a
// flat parameter vector. Throws on arity mismatch.
ErrorModel with_parameters(const ErrorModel& prototype, std::span<const double> params);

// Everything a family needs to turn parameters into an effect list.
struct MeasurementLayout {
    std::vector<PauliSetting> pauli;           // additive / multiplicative
    std::vector<WaveplateSetting> waveplates;  // retardance family
    std::vector<ChipDrive> drives;             // chip family

    static MeasurementLayout standard_pauli();
    static MeasurementLayout standard_waveplate(WaveplateRole role);
    static MeasurementLayout chip(const ChipPolynomial& assumed, double maxVolt);
};

// Rank-1 projective effects for the model's parameters, in setting order.
std::vector<Effect> effects_from_model(const ErrorModel& model, const MeasurementLayout& layout);

// --- waveplate chains ----------------------------------------------------

// HWP at x with retardance pi+dev.delta after a QWP at y with pi/2+dev.epsilon.
Mat2 preparation_unitary(const WaveplateSetting& setting, double retardanceDevHwp,
                         double retardanceDevQwp);

// Closed-form waveplate angles preparing (theta, phi) with ideal retardances.
std::pair<double, double> ideal_prep_angles(double theta, double phi);

struct SolverFailure : std::runtime_error {
    double bestOverlap;
    explicit SolverFailure(double overlap)
        : std::runtime_error("solve_waveplate_angles: overlap below 1-1e-6"),
          bestOverlap(overlap) {}
};

// Numerically maximizes the chain overlap with the target for deviated
// retardances; multistart Nelder-Mead seeded from the ideal angles.
std::pair<double, double> solve_waveplate_angles(const PureState& target, WaveplateRole role,
                                                 double retardanceDevHwp, double retardanceDevQwp);

// --- chip circuit --------------------------------------------------------

// U = C diag(1, e^{i phi2}) C diag(1, e^{i phi1}), C the symmetric coupler.
Mat2 chip_unitary(double phi1, double phi2);

std::pair<double, double> chip_phases(const ChipPolynomial& c, const ChipDrive& d);

// Target phases projecting onto the Pauli setting: phi2 = pi - theta,
// phi1 = pi - phi.
std::pair<double, double> chip_target_phases(const PauliSetting& s);

// Largest admissible voltage in [0, maxVolt] whose polynomial phase equals
// the target modulo 2 pi. Throws if unreachable.
double chip_drive_voltage(double c0, double c1, double c2, double targetPhase, double maxVolt);

}  // namespace tomocal
