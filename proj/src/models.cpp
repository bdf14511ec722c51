#include "tomocal/models.hpp"

#include <cmath>

#include "tomocal/optim.hpp"

namespace tomocal {

namespace {

constexpr double kPi = std::numbers::pi;

const std::array<cplx, 2> kKet0{cplx(1.0), cplx(0.0)};

Effect projector_from_rotations(double theta, double phi) {
    const Mat2 u = pauli_rotation(Axis::z, phi).adjoint() * pauli_rotation(Axis::y, theta).adjoint();
    const std::array<cplx, 2> ket{u.e[0], u.e[2]};  // u |0>
    return Effect(outer(ket, ket));
}

Mat2 projection_chain(const WaveplateSetting& s, double devH, double devQ) {
    return waveplate_unitary(s.qwpAngle, kPi / 2 + devQ) * waveplate_unitary(s.hwpAngle, kPi + devH);
}

Effect effect_from_waveplates(const WaveplateSetting& s, double devH, double devQ) {
    if (s.role == WaveplateRole::projection) {
        const Mat2 m = projection_chain(s, devH, devQ);
        const Mat2 md = m.adjoint();
        const std::array<cplx, 2> ket{md.e[0], md.e[2]};  // M^dag |0>
        return Effect(outer(ket, ket));
    }
    const Mat2 p = preparation_unitary(s, devH, devQ);
    const std::array<cplx, 2> ket{p.e[0], p.e[2]};  // P |0>
    return Effect(outer(ket, ket));
}

Effect effect_from_chip(const ChipPolynomial& c, const ChipDrive& d) {
    const auto [phi1, phi2] = chip_phases(c, d);
    const Mat2 ud = chip_unitary(phi1, phi2).adjoint();
    const std::array<cplx, 2> ket{ud.e[0], ud.e[2]};  // U^dag |0>
    return Effect(outer(ket, ket));
}

void check_finite(std::span<const double> p, const char* what) {
    for (double v : p)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite parameter");
}

}  // namespace

std::vector<PauliSetting> pauli_settings() {
    return {{1, 0.0, 0.0},          {2, kPi, 0.0},          {3, kPi / 2, kPi},
            {4, kPi / 2, 0.0},      {5, kPi / 2, kPi / 2},  {6, kPi / 2, 3 * kPi / 2}};
}

std::vector<WaveplateSetting> waveplate_settings(WaveplateRole role) {
    // Angles chosen so that the chain at nominal retardance reproduces the
    // pauli_settings() projectors exactly under this project's rotation and
    // waveplate sign conventions.
    if (role == WaveplateRole::projection) {
        return {{0.0, 0.0, role},           {kPi / 4, 0.0, role},      {-kPi / 8, 0.0, role},
                {kPi / 8, 0.0, role},       {-kPi / 8, kPi / 4, role}, {kPi / 8, -kPi / 4, role}};
    }
    std::vector<WaveplateSetting> out;
    for (const auto& s : pauli_settings()) {
        const auto [x, y] = ideal_prep_angles(s.thetaY, s.phiZ);
        out.push_back({x, y, role});
    }
    return out;
}

int parameter_count(const ErrorModel& model) {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AdditiveAngles>) return 12;
            else if constexpr (std::is_same_v<T, ChipPolynomial>) return 6;
            else return 2;
        },
        model);
}

std::vector<double> parameters_of(const ErrorModel& model) {
    return std::visit(
        [](const auto& m) -> std::vector<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AdditiveAngles>) {
                std::vector<double> p(m.deltaTheta.begin(), m.deltaTheta.end());
                p.insert(p.end(), m.deltaPhi.begin(), m.deltaPhi.end());
                return p;
            } else if constexpr (std::is_same_v<T, ChipPolynomial>) {
                return {m.c.begin(), m.c.end()};
            } else {
                return {m.delta, m.epsilon};
            }
        },
        model);
}

ErrorModel with_parameters(const ErrorModel& prototype, std::span<const double> params) {
    if (static_cast<int>(params.size()) != parameter_count(prototype))
        throw std::invalid_argument("with_parameters: arity mismatch");
    check_finite(params, "with_parameters");
    ErrorModel out = prototype;
    std::visit(
        [&](auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AdditiveAngles>) {
                std::copy(params.begin(), params.begin() + 6, m.deltaTheta.begin());
                std::copy(params.begin() + 6, params.end(), m.deltaPhi.begin());
            } else if constexpr (std::is_same_v<T, ChipPolynomial>) {
                std::copy(params.begin(), params.end(), m.c.begin());
            } else {
                m.delta = params[0];
                m.epsilon = params[1];
            }
        },
        out);
    return out;
}

MeasurementLayout MeasurementLayout::standard_pauli() {
    MeasurementLayout l;
    l.pauli = pauli_settings();
    return l;
}

MeasurementLayout MeasurementLayout::standard_waveplate(WaveplateRole role) {
    MeasurementLayout l;
    l.waveplates = waveplate_settings(role);
    return l;
}

MeasurementLayout MeasurementLayout::chip(const ChipPolynomial& assumed, double maxVolt) {
    MeasurementLayout l;
    for (const auto& s : pauli_settings()) {
        const auto [p1, p2] = chip_target_phases(s);
        l.drives.push_back(
            {chip_drive_voltage(assumed.c[0], assumed.c[1], assumed.c[2], p1, maxVolt),
             chip_drive_voltage(assumed.c[3], assumed.c[4], assumed.c[5], p2, maxVolt)});
    }
    return l;
}

std::vector<Effect> effects_from_model(const ErrorModel& model, const MeasurementLayout& layout) {
    return std::visit(
        [&](const auto& m) -> std::vector<Effect> {
            using T = std::decay_t<decltype(m)>;
            std::vector<Effect> out;
            if constexpr (std::is_same_v<T, AdditiveAngles>) {
                if (layout.pauli.size() != 6)
                    throw std::invalid_argument("effects_from_model: need 6 Pauli settings");
                for (std::size_t j = 0; j < 6; ++j)
                    out.push_back(projector_from_rotations(layout.pauli[j].thetaY + m.deltaTheta[j],
                                                           layout.pauli[j].phiZ + m.deltaPhi[j]));
            } else if constexpr (std::is_same_v<T, Multiplicative>) {
                if (layout.pauli.size() != 6)
                    throw std::invalid_argument("effects_from_model: need 6 Pauli settings");
                for (const auto& s : layout.pauli)
                    out.push_back(projector_from_rotations((1.0 + m.delta) * s.thetaY,
                                                           (1.0 + m.epsilon) * s.phiZ));
            } else if constexpr (std::is_same_v<T, WaveplateRetardance>) {
                if (layout.waveplates.empty())
                    throw std::invalid_argument("effects_from_model: waveplate settings missing");
                for (const auto& s : layout.waveplates)
                    out.push_back(effect_from_waveplates(s, m.delta, m.epsilon));
            } else {
                if (layout.drives.empty())
                    throw std::invalid_argument("effects_from_model: chip drives missing");
                for (const auto& d : layout.drives) out.push_back(effect_from_chip(m, d));
            }
            return out;
        },
        model);
}

Mat2 preparation_unitary(const WaveplateSetting& setting, double retardanceDevHwp,
                         double retardanceDevQwp) {
    return waveplate_unitary(setting.hwpAngle, kPi + retardanceDevHwp) *
           waveplate_unitary(setting.qwpAngle, kPi / 2 + retardanceDevQwp);
}

std::pair<double, double> ideal_prep_angles(double theta, double phi) {
    if (!(theta >= 0.0 && theta <= kPi))
        throw std::invalid_argument("ideal_prep_angles: theta outside [0, pi]");
    const double y = -0.5 * std::asin(std::sin(theta) * std::sin(phi));
    // atan2 form resolves the arctan branch, including theta = pi/2 with
    // phi = +-pi/2 where tan(theta)*cos(phi) is 0 * inf.
    const double x = 0.25 * std::atan2(std::sin(theta) * std::cos(phi), std::cos(theta)) + 0.5 * y;
    return {x, y};
}

namespace {

double wrap_half_pi(double a) {
    // normalize to [-pi/2, pi/2); waveplates are pi-periodic in the Jones model
    a = std::fmod(a + kPi / 2, kPi);
    if (a < 0) a += kPi;
    return a - kPi / 2;
}

}  // namespace

std::pair<double, double> solve_waveplate_angles(const PureState& target, WaveplateRole role,
                                                 double retardanceDevHwp, double retardanceDevQwp) {
    auto overlap = [&](double x, double y) {
        const WaveplateSetting s{x, y, role};
        if (role == WaveplateRole::preparation) {
            const Mat2 p = preparation_unitary(s, retardanceDevHwp, retardanceDevQwp);
            const cplx amp = std::conj(target.amp[0]) * p.e[0] + std::conj(target.amp[1]) * p.e[2];
            return std::norm(amp);
        }
        const Mat2 m = projection_chain(s, retardanceDevHwp, retardanceDevQwp);
        const cplx amp = m.e[0] * target.amp[0] + m.e[1] * target.amp[1];  // <0| M |target>
        return std::norm(amp);
    };

    const BlochVector v = target.bloch();
    const double theta = std::acos(std::clamp(v.z, -1.0, 1.0));
    double phi = std::atan2(v.y, v.x);
    if (phi < 0) phi += 2 * kPi;
    const auto [x0, y0] = ideal_prep_angles(theta, phi);

    optim::Objective objective = [&](const std::vector<double>& p) {
        return -overlap(p[0], p[1]);
    };
    const std::vector<double> lo{x0 - kPi, y0 - kPi};
    const std::vector<double> hi{x0 + kPi, y0 + kPi};
    optim::NelderMeadOptions nm;
    nm.initialStep = 0.1;
    nm.xTol = 1e-12;
    nm.fTol = 1e-14;

    optim::Result best;
    best.value = 0.0;
    bool first = true;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 2; ++j) {  // pi/2-spaced seed grid, 8 restarts
            const std::vector<double> seed{x0 + i * kPi / 4, y0 + j * kPi / 2};
            auto r = optim::nelder_mead(objective, seed, lo, hi, nm);
            if (first || r.value < best.value) {
                best = std::move(r);
                first = false;
            }
        }
    }
    const double achieved = -best.value;
    if (achieved < 1.0 - 1e-6) throw SolverFailure(achieved);
    return {wrap_half_pi(best.x[0]), wrap_half_pi(best.x[1])};
}

Mat2 chip_unitary(double phi1, double phi2) {
    constexpr double inv = 1.0 / std::numbers::sqrt2;
    const Mat2 coupler{inv, cplx(0, inv), cplx(0, inv), inv};
    const Mat2 d1{1.0, 0.0, 0.0, std::exp(cplx(0, phi1))};
    const Mat2 d2{1.0, 0.0, 0.0, std::exp(cplx(0, phi2))};
    return coupler * d2 * coupler * d1;
}

std::pair<double, double> chip_phases(const ChipPolynomial& c, const ChipDrive& d) {
    if (!std::isfinite(d.v1) || !std::isfinite(d.v2))
        throw std::invalid_argument("chip_phases: non-finite drive");
    return {c.c[0] + c.c[1] * d.v1 + c.c[2] * d.v1 * d.v1,
            c.c[3] + c.c[4] * d.v2 + c.c[5] * d.v2 * d.v2};
}

std::pair<double, double> chip_target_phases(const PauliSetting& s) {
    return {kPi - s.phiZ, kPi - s.thetaY};
}

double chip_drive_voltage(double c0, double c1, double c2, double targetPhase, double maxVolt) {
    double best = -1.0;
    for (int k = -2; k <= 4; ++k) {
        const double t = targetPhase + 2 * kPi * k;
        const double disc = c1 * c1 - 4 * c2 * (c0 - t);
        if (disc < 0) continue;
        const double sq = std::sqrt(disc);
        for (double root : {(-c1 + sq) / (2 * c2), (-c1 - sq) / (2 * c2)}) {
            if (root >= 0.0 && root <= maxVolt && root > best) best = root;
        }
    }
    if (best < 0.0) throw std::invalid_argument("chip_drive_voltage: target phase unreachable");
    return best;
}

}  // namespace tomocal
