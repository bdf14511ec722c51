#pragma once
// Probe/test state ensembles on the Bloch sphere.

#include <optional>
#include <string>
#include <vector>

#include "tomocal/qubit.hpp"

namespace tomocal {

enum class ProbeKind { pauli6, cube8, icosahedron12, latlon, fibonacci };

struct ProbeSet {
    ProbeKind kind;
    std::vector<PureState> states;  // all carry blochAngles
};

ProbeKind probe_kind_from_name(const std::string& name);
std::string probe_kind_name(ProbeKind kind);

// pauli6/cube8/icosahedron12 ignore n; latlon and fibonacci require n >= 2.
ProbeSet probe_set(ProbeKind kind, std::optional<int> n = std::nullopt);

}  // namespace tomocal
