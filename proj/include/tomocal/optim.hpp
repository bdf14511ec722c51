#pragma once
// Derivative-free optimizers: bounded Nelder-Mead simplex, mesh-adaptive
// coordinate pattern search (ortho-2n polling, opportunistic acceptance,
// mesh halving) and Latin-hypercube seeding for global starts.

#include <cstdint>
#include <functional>
#include <vector>

namespace tomocal::optim {

using Objective = std::function<double(const std::vector<double>&)>;

struct Result {
    std::vector<double> x;
    double value = 0.0;
    long evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    int maxIterations = 4000;
    double initialStep = 0.05;
    double xTol = 1e-9;
    double fTol = 1e-12;
};

// Simplex descent with parameters clamped to [lower, upper].
Result nelder_mead(const Objective& f, std::vector<double> start,
                   const std::vector<double>& lower, const std::vector<double>& upper,
                   const NelderMeadOptions& opts = {});

struct PatternSearchOptions {
    double meshInitial = 0.1;
    double meshMin = 1e-5;
    long maxEvaluations = 100000;  // budget shared via external counter
};

// Polls +-mesh along every coordinate; first improvement moves the
// incumbent, a full failed poll halves the mesh. Stops at meshMin or when
// *evalBudget runs out. evalBudget is decremented per objective call.
Result pattern_search(const Objective& f, std::vector<double> start,
                      const std::vector<double>& lower, const std::vector<double>& upper,
                      const PatternSearchOptions& opts, long* evalBudget);

// n space-filling points in the box, one stratum per coordinate and sample.
std::vector<std::vector<double>> latin_hypercube(const std::vector<double>& lower,
                                                 const std::vector<double>& upper, int n,
                                                 std::uint64_t seed);

}  // namespace tomocal::optim
