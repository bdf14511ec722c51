#include "tomocal/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tomocal/parallel.hpp"

namespace tomocal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSentinelCost = 1.0;

struct Recorder {
    long evaluations = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<long, double>> trace;

    double note(double value) {
        ++evaluations;
        if (value < best) {
            best = value;
            trace.emplace_back(evaluations, value);
        }
        return value;
    }
};

optim::Objective recorded_cost(const ErrorModel& prototype,
                               const std::vector<Tomogram>& tomograms,
                               const MeasurementLayout& layout, Recorder& rec) {
    return [&prototype, &tomograms, &layout, &rec](const std::vector<double>& x) {
        const ErrorModel m = with_parameters(prototype, x);
        return rec.note(calibration_cost(m, tomograms, layout));
    };
}

CalibrationReport finish(const ErrorModel& prototype, const std::vector<Tomogram>& tomograms,
                         const MeasurementLayout& layout, Recorder&& rec,
                         std::vector<double> bestX, bool converged) {
    CalibrationReport rep;
    rep.optimalParams = with_parameters(prototype, bestX);
    rep.costBefore = calibration_cost(prototype, tomograms, layout);
    rep.costAfter = rec.best;
    rep.evaluations = rec.evaluations;
    rep.costTrace = std::move(rec.trace);
    rep.converged = converged;
    return rep;
}

// x = B y for a row-major dim x dim basis; identity when the basis is empty
std::vector<double> basis_apply(const std::vector<double>& basis, std::vector<double> y) {
    if (basis.empty()) return y;
    const int n = static_cast<int>(y.size());
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x[i] += basis[i * n + j] * y[j];
    return x;
}

// solves B y = x (partial-pivot elimination); used to seed the search from
// model-space parameters when a reparametrization is active
std::vector<double> basis_solve(const std::vector<double>& basis, std::vector<double> x) {
    if (basis.empty()) return x;
    const int n = static_cast<int>(x.size());
    std::vector<double> a = basis;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300)
            throw std::invalid_argument("searchBasis is singular");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            std::swap(x[col], x[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            x[r] -= f * x[col];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= a[i * n + j] * x[j];
        x[i] /= a[i * n + i];
    }
    return x;
}

}  // namespace

OptimizerConfig OptimizerConfig::defaults_for(const ErrorModel& prototype) {
    OptimizerConfig cfg;
    const int n = parameter_count(prototype);
    cfg.lowerBound.assign(n, -0.5);
    cfg.upperBound.assign(n, 0.5);
    return cfg;
}

double purity_modulation(const std::vector<DensityMatrix>& states) {
    if (states.size() < 2) throw std::invalid_argument("purity_modulation: need >= 2 states");
    double lo = 1.0, hi = 0.0;
    for (const auto& s : states) {
        const double p = purity(s);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    return hi - lo;
}

CostEval evaluate_cost(const ErrorModel& params, const std::vector<Tomogram>& tomograms,
                       const MeasurementLayout& layout, const MaxLikOptions& ml) {
    if (tomograms.size() < 2) throw std::invalid_argument("evaluate_cost: need >= 2 tomograms");
    const std::vector<Effect> effects = effects_from_model(params, layout);
    std::vector<double> purities(tomograms.size());
    std::vector<char> ok(tomograms.size(), 1);
    parallel::parallel_for(tomograms.size(), [&](std::size_t i) {
        const MaxLikResult r = maxlik(tomograms[i], effects, ml);
        purities[i] = purity(r.rho);
        ok[i] = r.converged ? 1 : 0;
    });
    CostEval ev;
    ev.allConverged = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
    const auto [lo, hi] = std::minmax_element(purities.begin(), purities.end());
    ev.minPurity = *lo;
    ev.deltaP = *hi - *lo;
    return ev;
}

double calibration_cost(const ErrorModel& params, const std::vector<Tomogram>& tomograms,
                        const MeasurementLayout& layout, const MaxLikOptions& ml,
                        bool* diagnosticFlag) {
    const CostEval ev = evaluate_cost(params, tomograms, layout, ml);
    if (diagnosticFlag) *diagnosticFlag = !ev.allConverged;
    return ev.allConverged ? ev.deltaP : kSentinelCost;
}

CalibrationReport calibrate_global(const std::vector<Tomogram>& tomograms,
                                   const ErrorModel& prototype, const MeasurementLayout& layout,
                                   const OptimizerConfig& cfg) {
    const int dim = parameter_count(prototype);
    if (static_cast<int>(cfg.lowerBound.size()) != dim ||
        static_cast<int>(cfg.upperBound.size()) != dim)
        throw std::invalid_argument("calibrate_global: bound arity mismatch");
    if (!cfg.searchBasis.empty() &&
        static_cast<int>(cfg.searchBasis.size()) != dim * dim)
        throw std::invalid_argument("calibrate_global: searchBasis arity mismatch");

    Recorder rec;
    const optim::Objective f = recorded_cost(prototype, tomograms, layout, rec);

    // the search runs in box-normalized coordinates so mesh and simplex steps
    // scale with each parameter's admissible range; otherwise a narrow
    // coefficient axis is polled with steps larger than its whole box
    std::vector<double> width(dim);
    for (int i = 0; i < dim; ++i) {
        width[i] = cfg.upperBound[i] - cfg.lowerBound[i];
        if (!(width[i] > 0.0))
            throw std::invalid_argument("calibrate_global: empty bound box");
    }
    const auto to_x = [&](const std::vector<double>& u) {
        std::vector<double> y(dim);
        for (int i = 0; i < dim; ++i) y[i] = cfg.lowerBound[i] + u[i] * width[i];
        return basis_apply(cfg.searchBasis, std::move(y));
    };
    const optim::Objective g = [&](const std::vector<double>& u) { return f(to_x(u)); };
    const std::vector<double> zeros(dim, 0.0), ones(dim, 1.0);

    long budget = cfg.maxEvaluations;
    auto seeds = optim::latin_hypercube(zeros, ones, cfg.lhSamples, cfg.seed);
    // warm start: the current assumption is always one of the candidates, so
    // a model that already explains the data is never searched away from
    std::vector<double> warm = basis_solve(cfg.searchBasis, parameters_of(prototype));
    for (int i = 0; i < dim; ++i)
        warm[i] = (std::clamp(warm[i], cfg.lowerBound[i], cfg.upperBound[i]) -
                   cfg.lowerBound[i]) / width[i];
    seeds.insert(seeds.begin(), std::move(warm));
    std::vector<std::pair<double, int>> scored;
    scored.reserve(seeds.size());
    for (int i = 0; i < static_cast<int>(seeds.size()) && budget > 0; ++i) {
        scored.emplace_back(g(seeds[i]), i);
        --budget;
    }
    std::sort(scored.begin(), scored.end());

    optim::PatternSearchOptions ps;
    ps.meshInitial = cfg.meshInitial;
    ps.meshMin = cfg.meshMin;
    ps.maxEvaluations = cfg.maxEvaluations;

    // simplex descent from u, spending at most `cap` evaluations of g.
    // Restart with a fresh simplex while restarts keep paying off: in a
    // curved valley the simplex collapses onto the valley floor and stalls
    // well above the minimum otherwise.
    const auto polish = [&](std::vector<double> u, long& cap) {
        const optim::Objective capped = [&](const std::vector<double>& v) {
            if (cap <= 0 || budget <= 0) return kSentinelCost;
            --cap;
            --budget;
            return g(v);
        };
        auto best = optim::nelder_mead(capped, std::move(u), zeros, ones);
        optim::NelderMeadOptions nm;
        for (int k = 0; k < 8 && cap > 0 && budget > 0; ++k) {
            nm.initialStep = std::max(0.5 * nm.initialStep, 1e-4);
            const auto r = optim::nelder_mead(capped, best.x, zeros, ones, nm);
            const bool paidOff = r.value < best.value - 1e-15;
            if (r.value < best.value) best = r;
            if (!paidOff) break;
        }
        return best;
    };

    std::vector<double> bestU = seeds.at(scored.front().second);
    double bestCost = scored.front().first;
    bool allMeshed = true;
    const int starts = std::min<int>(cfg.localStarts, static_cast<int>(scored.size()));
    for (int s = 0; s < starts && budget > 0; ++s) {
        // even budget shares, reserving half of what remains for the polish
        const long share = std::clamp(budget / (2 * (starts - s)), 1L, budget);
        long sub = share - share / 2;
        const long sub0 = sub;
        auto r = optim::pattern_search(g, seeds[scored[s].second], zeros, ones, ps, &sub);
        budget -= sub0 - sub;
        allMeshed = allMeshed && r.converged;
        if (budget > 0) {
            // simplex polish handles the curved valleys the axis-aligned
            // poll set cannot follow
            long cap = std::min(share / 2 + sub, budget);
            const auto nm = polish(r.x, cap);
            if (nm.value < r.value) r = nm;
        }
        if (r.value < bestCost) {
            bestCost = r.value;
            bestU = r.x;
        }
    }
    // finishing alternation: the modulation cost has a conical (max-of-smooth)
    // minimum, where the coordinate search converges steadily and the simplex
    // fixes diagonal residuals; repeat while there is budget and progress
    for (int round = 0; round < 6 && budget > 0; ++round) {
        const double before = bestCost;
        long sub = budget / 2;
        const long sub0 = sub;
        const auto r2 = optim::pattern_search(g, bestU, zeros, ones, ps, &sub);
        budget -= sub0 - sub;
        if (r2.value < bestCost) {
            bestCost = r2.value;
            bestU = r2.x;
        }
        if (budget > 0) {
            long cap = budget / 2;
            const auto nm = polish(bestU, cap);
            if (nm.value < bestCost) {
                bestCost = nm.value;
                bestU = nm.x;
            }
        }
        if (bestCost >= before - 1e-15) break;
    }
    return finish(prototype, tomograms, layout, std::move(rec), to_x(bestU),
                  allMeshed && budget >= 0);
}

CalibrationReport calibrate_local(const std::vector<Tomogram>& tomograms,
                                  const ErrorModel& prototype, const MeasurementLayout& layout,
                                  const OptimizerConfig& cfg, std::vector<double> start) {
    const int dim = parameter_count(prototype);
    if (start.empty()) start = parameters_of(prototype);
    if (static_cast<int>(start.size()) != dim ||
        static_cast<int>(cfg.lowerBound.size()) != dim ||
        static_cast<int>(cfg.upperBound.size()) != dim)
        throw std::invalid_argument("calibrate_local: arity mismatch");

    Recorder rec;
    const optim::Objective f = recorded_cost(prototype, tomograms, layout, rec);
    // same box normalization (and optional reparametrization) as the global
    // search; the start is given in model space
    const std::vector<double> startY = basis_solve(cfg.searchBasis, std::move(start));
    std::vector<double> width(dim), u(dim);
    for (int i = 0; i < dim; ++i) {
        width[i] = cfg.upperBound[i] - cfg.lowerBound[i];
        if (!(width[i] > 0.0))
            throw std::invalid_argument("calibrate_local: empty bound box");
        u[i] = (std::clamp(startY[i], cfg.lowerBound[i], cfg.upperBound[i]) -
                cfg.lowerBound[i]) / width[i];
    }
    const auto to_x = [&](const std::vector<double>& v) {
        std::vector<double> y(dim);
        for (int i = 0; i < dim; ++i) y[i] = cfg.lowerBound[i] + v[i] * width[i];
        return basis_apply(cfg.searchBasis, std::move(y));
    };
    const optim::Objective g = [&](const std::vector<double>& v) { return f(to_x(v)); };
    const auto r = optim::nelder_mead(g, std::move(u), std::vector<double>(dim, 0.0),
                                      std::vector<double>(dim, 1.0));
    return finish(prototype, tomograms, layout, std::move(rec), to_x(r.x), r.converged);
}

CalibrationReport reversed_calibration(const std::vector<Tomogram>& prepTomograms,
                                       const ErrorModel& prototype,
                                       const MeasurementLayout& layout,
                                       const OptimizerConfig& cfg) {
    const bool local = std::holds_alternative<Multiplicative>(prototype) ||
                       std::holds_alternative<WaveplateRetardance>(prototype);
    return local ? calibrate_local(prepTomograms, prototype, layout, cfg)
                 : calibrate_global(prepTomograms, prototype, layout, cfg);
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 to_vec(const BlochVector& b) { return {b.x, b.y, b.z}; }

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// cyclic Jacobi for a symmetric 4x4; returns eigenvector of the largest value
std::array<double, 4> principal_eigenvector(std::array<std::array<double, 4>, 4> k) {
    std::array<std::array<double, 4>, 4> v{};
    for (int i = 0; i < 4; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += k[p][q] * k[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                if (std::abs(k[p][q]) < 1e-18) continue;
                const double theta = 0.5 * std::atan2(2 * k[p][q], k[q][q] - k[p][p]);
                const double c = std::cos(theta), s = std::sin(theta);
                for (int i = 0; i < 4; ++i) {
                    const double kip = k[i][p], kiq = k[i][q];
                    k[i][p] = c * kip - s * kiq;
                    k[i][q] = s * kip + c * kiq;
                }
                for (int i = 0; i < 4; ++i) {
                    const double kpi = k[p][i], kqi = k[q][i];
                    k[p][i] = c * kpi - s * kqi;
                    k[q][i] = s * kpi + c * kqi;
                }
                for (int i = 0; i < 4; ++i) {
                    const double vip = v[i][p], viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
    }
    int argmax = 0;
    for (int i = 1; i < 4; ++i)
        if (k[i][i] > k[argmax][argmax]) argmax = i;
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = v[i][argmax];
    return out;
}

Vec3 conjugated_bloch(const Mat2& u, const Vec3& r) {
    const StokesVector s{1.0, r[2], r[0], r[1]};
    const Mat2 m = u * density_carrier_from_stokes(s) * u.adjoint();
    const BlochVector b = bloch_vector(DensityMatrix(m));
    return to_vec(b);
}

double alignment(const Mat2& u, const std::array<Vec3, 2>& recon,
                 const std::array<Vec3, 2>& ideal) {
    double g = 0.0;
    for (int i = 0; i < 2; ++i) g += dot3(conjugated_bloch(u, recon[i]), ideal[i]);
    return g;
}

}  // namespace

Mat2 gauge_unitary(const std::pair<DensityMatrix, DensityMatrix>& reconPair,
                   const std::pair<PureState, PureState>& idealPair) {
    const std::array<Vec3, 2> ideal{to_vec(idealPair.first.bloch()),
                                    to_vec(idealPair.second.bloch())};
    const double ang = std::acos(std::clamp(dot3(ideal[0], ideal[1]), -1.0, 1.0));
    if (ang < kPi / 18 || ang > kPi - kPi / 18)
        throw std::invalid_argument(
            "gauge_unitary: ideal pair nearly (anti)parallel, rotation undetermined");
    const std::array<Vec3, 2> recon{to_vec(bloch_vector(reconPair.first)),
                                    to_vec(bloch_vector(reconPair.second))};

    // Davenport q-method: B = sum ideal_i recon_i^T, maximize q^T K q
    double b[3][3] = {};
    for (int n = 0; n < 2; ++n)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) b[i][j] += ideal[n][i] * recon[n][j];
    const double sigma = b[0][0] + b[1][1] + b[2][2];
    const Vec3 z{b[1][2] - b[2][1], b[2][0] - b[0][2], b[0][1] - b[1][0]};
    std::array<std::array<double, 4>, 4> k{};
    k[0][0] = sigma;
    for (int i = 0; i < 3; ++i) {
        k[0][i + 1] = k[i + 1][0] = z[i];
        for (int j = 0; j < 3; ++j) k[i + 1][j + 1] = b[i][j] + b[j][i] - (i == j ? sigma : 0.0);
    }
    const auto q = principal_eigenvector(k);

    // q = (w, n sin(w/2)-style vector); build both handedness candidates and
    // keep whichever conjugation actually aligns the pair
    const cplx i1(0.0, 1.0);
    const Mat2 u = cplx(q[0]) * Mat2::identity() -
                   i1 * (cplx(q[1]) * pauli_x() + cplx(q[2]) * pauli_y() + cplx(q[3]) * pauli_z());
    const Mat2 ud = u.adjoint();
    return alignment(u, recon, ideal) >= alignment(ud, recon, ideal) ? u : ud;
}

LandscapeGrid landscape(const std::vector<Tomogram>& tomograms, const ErrorModel& prototype,
                        const MeasurementLayout& layout, std::vector<LandscapeAxis> axes,
                        LandscapeMetric metric) {
    if (axes.empty() || axes.size() > 2)
        throw std::invalid_argument("landscape: need 1 or 2 axes");
    const int dim = parameter_count(prototype);
    for (const auto& a : axes) {
        if (a.paramIndex < 0 || a.paramIndex >= dim)
            throw std::invalid_argument("landscape: axis parameter index out of range");
        if (a.values.empty()) throw std::invalid_argument("landscape: empty axis");
    }
    const std::size_t rows = axes[0].values.size();
    const std::size_t cols = axes.size() == 2 ? axes[1].values.size() : 1;
    const std::vector<double> base = parameters_of(prototype);

    LandscapeGrid grid;
    grid.metric = metric;
    grid.values.assign(rows * cols, 0.0);
    parallel::parallel_for(rows * cols, [&](std::size_t node) {
        std::vector<double> p = base;
        p[axes[0].paramIndex] = axes[0].values[node / cols];
        if (axes.size() == 2) p[axes[1].paramIndex] = axes[1].values[node % cols];
        const CostEval ev = evaluate_cost(with_parameters(prototype, p), tomograms, layout);
        if (metric == LandscapeMetric::purityModulation)
            grid.values[node] = ev.allConverged ? ev.deltaP : kSentinelCost;
        else
            grid.values[node] = ev.minPurity;
    });
    grid.axes = std::move(axes);
    return grid;
}

}  // namespace tomocal
