#include "tomocal/probes.hpp"

#include <cmath>
#include <stdexcept>

namespace tomocal {

namespace {

constexpr double kPi = std::numbers::pi;

PureState from_bloch_direction(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    const double theta = std::acos(std::clamp(z / n, -1.0, 1.0));
    double phi = std::atan2(y, x);
    if (phi < 0) phi += 2 * kPi;
    return state_from_angles(theta, phi);
}

ProbeSet make(ProbeKind kind, std::vector<PureState> states) {
    // pairwise Bloch separation > 1e-6 rad
    for (std::size_t i = 0; i < states.size(); ++i) {
        const BlochVector a = states[i].bloch();
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const BlochVector b = states[j].bloch();
            const double dot = std::clamp(a.x * b.x + a.y * b.y + a.z * b.z, -1.0, 1.0);
            if (std::acos(dot) <= 1e-6)
                throw std::invalid_argument("probe_set: duplicate Bloch points");
        }
    }
    return {kind, std::move(states)};
}

}  // namespace

ProbeKind probe_kind_from_name(const std::string& name) {
    if (name == "pauli6") return ProbeKind::pauli6;
    if (name == "cube8") return ProbeKind::cube8;
    if (name == "icosahedron12") return ProbeKind::icosahedron12;
    if (name == "latlon") return ProbeKind::latlon;
    if (name == "fibonacci") return ProbeKind::fibonacci;
    throw std::invalid_argument("unknown probe kind: " + name);
}

std::string probe_kind_name(ProbeKind kind) {
    switch (kind) {
        case ProbeKind::pauli6: return "pauli6";
        case ProbeKind::cube8: return "cube8";
        case ProbeKind::icosahedron12: return "icosahedron12";
        case ProbeKind::latlon: return "latlon";
        case ProbeKind::fibonacci: return "fibonacci";
    }
    throw std::invalid_argument("unknown probe kind");
}

ProbeSet probe_set(ProbeKind kind, std::optional<int> n) {
    std::vector<PureState> states;
    switch (kind) {
        case ProbeKind::pauli6:
            for (double s : {1.0, -1.0}) {
                states.push_back(from_bloch_direction(s, 0, 0));
                states.push_back(from_bloch_direction(0, s, 0));
                states.push_back(from_bloch_direction(0, 0, s));
            }
            return make(kind, std::move(states));

        case ProbeKind::cube8:
            for (double x : {1.0, -1.0})
                for (double y : {1.0, -1.0})
                    for (double z : {1.0, -1.0}) states.push_back(from_bloch_direction(x, y, z));
            return make(kind, std::move(states));

        case ProbeKind::icosahedron12: {
            const double g = (1.0 + std::sqrt(5.0)) / 2.0;
            for (double s1 : {1.0, -1.0})
                for (double s2 : {1.0, -1.0}) {
                    states.push_back(from_bloch_direction(0, s1, s2 * g));
                    states.push_back(from_bloch_direction(s1, s2 * g, 0));
                    states.push_back(from_bloch_direction(s2 * g, 0, s1));
                }
            return make(kind, std::move(states));
        }

        case ProbeKind::latlon: {
            if (!n || *n < 4) throw std::invalid_argument("latlon: need n >= 4");
            // poles + r rings of m = (n-2)/r points; r the divisor of n-2
            // closest to sqrt(n-2), ties to the smaller
            const int inner = *n - 2;
            int rings = 1;
            double bestScore = 1e300;
            for (int r = 1; r <= inner; ++r) {
                if (inner % r) continue;
                const double score = std::abs(r - std::sqrt(static_cast<double>(inner)));
                if (score < bestScore) {
                    bestScore = score;
                    rings = r;
                }
            }
            const int perRing = inner / rings;
            states.push_back(state_from_angles(0.0, 0.0));
            states.push_back(state_from_angles(kPi, 0.0));
            for (int k = 1; k <= rings; ++k) {
                const double theta = k * kPi / (rings + 1);
                for (int i = 0; i < perRing; ++i)
                    states.push_back(state_from_angles(theta, 2 * kPi * i / perRing));
            }
            return make(kind, std::move(states));
        }

        case ProbeKind::fibonacci: {
            if (!n || *n < 2) throw std::invalid_argument("fibonacci: need n >= 2");
            const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
            const double step = 2 * kPi * (1.0 - 1.0 / golden);
            for (int i = 0; i < *n; ++i) {
                const double z = 1.0 - 2.0 * (i + 0.5) / *n;
                const double theta = std::acos(std::clamp(z, -1.0, 1.0));
                const double phi = std::fmod(i * step, 2 * kPi);
                states.push_back(state_from_angles(theta, phi));
            }
            return make(kind, std::move(states));
        }
    }
    throw std::invalid_argument("probe_set: unknown kind");
}

}  // namespace tomocal
