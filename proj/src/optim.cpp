#include "tomocal/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tomocal::optim {

namespace {

void clamp_to_box(std::vector<double>& x, const std::vector<double>& lo,
                  const std::vector<double>& hi) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

}  // namespace

Result nelder_mead(const Objective& f, std::vector<double> start,
                   const std::vector<double>& lower, const std::vector<double>& upper,
                   const NelderMeadOptions& opts) {
    const std::size_t n = start.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("nelder_mead: bound arity mismatch");
    clamp_to_box(start, lower, upper);

    long evals = 0;
    auto eval = [&](std::vector<double> x) {
        clamp_to_box(x, lower, upper);
        ++evals;
        return std::make_pair(f(x), std::move(x));
    };

    // initial simplex: start plus one step along each coordinate
    std::vector<std::pair<double, std::vector<double>>> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(eval(start));
    for (std::size_t i = 0; i < n; ++i) {
        auto v = start;
        const double span = upper[i] - lower[i];
        double step = std::min(opts.initialStep, 0.25 * span);
        if (v[i] + step > upper[i]) step = -step;
        v[i] += step;
        simplex.push_back(eval(std::move(v)));
    }
    auto by_value = [](const auto& a, const auto& b) { return a.first < b.first; };
    std::sort(simplex.begin(), simplex.end(), by_value);

    bool converged = false;
    for (int it = 0; it < opts.maxIterations; ++it) {
        const double fBest = simplex.front().first;
        const double fWorst = simplex.back().first;
        double xSpread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            xSpread = std::max(xSpread,
                               std::abs(simplex.back().second[i] - simplex.front().second[i]));
        if (std::abs(fWorst - fBest) < opts.fTol && xSpread < opts.xTol) {
            converged = true;
            break;
        }

        // centroid of all but worst
        std::vector<double> cen(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) cen[i] += simplex[k].second[i];
        for (auto& c : cen) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = cen[i] + coef * (simplex.back().second[i] - cen[i]);
            return x;
        };

        auto reflected = eval(blend(-1.0));
        if (reflected.first < simplex.front().first) {
            auto expanded = eval(blend(-2.0));
            simplex.back() = expanded.first < reflected.first ? std::move(expanded)
                                                             : std::move(reflected);
        } else if (reflected.first < simplex[n - 1].first) {
            simplex.back() = std::move(reflected);
        } else {
            auto contracted = eval(blend(reflected.first < simplex.back().first ? -0.5 : 0.5));
            if (contracted.first < std::min(reflected.first, simplex.back().first)) {
                simplex.back() = std::move(contracted);
            } else {
                // shrink toward best
                for (std::size_t k = 1; k <= n; ++k) {
                    std::vector<double> x(n);
                    for (std::size_t i = 0; i < n; ++i)
                        x[i] = 0.5 * (simplex[0].second[i] + simplex[k].second[i]);
                    simplex[k] = eval(std::move(x));
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_value);
    }

    Result r;
    r.x = simplex.front().second;
    r.value = simplex.front().first;
    r.evaluations = evals;
    r.converged = converged;
    return r;
}

Result pattern_search(const Objective& f, std::vector<double> start,
                      const std::vector<double>& lower, const std::vector<double>& upper,
                      const PatternSearchOptions& opts, long* evalBudget) {
    const std::size_t n = start.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("pattern_search: bound arity mismatch");
    clamp_to_box(start, lower, upper);

    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        if (evalBudget) --(*evalBudget);
        return f(x);
    };

    Result r;
    r.x = start;
    r.value = eval(start);

    double mesh = opts.meshInitial;
    while (mesh >= opts.meshMin) {
        if (evalBudget && *evalBudget <= 0) {
            r.evaluations = evals;
            r.converged = false;
            return r;
        }
        bool improved = false;
        for (std::size_t i = 0; i < n && !improved; ++i) {
            for (double sign : {+1.0, -1.0}) {
                if (evalBudget && *evalBudget <= 0) break;
                std::vector<double> x = r.x;
                x[i] = std::clamp(x[i] + sign * mesh, lower[i], upper[i]);
                if (x[i] == r.x[i]) continue;  // pinned at the bound
                const double v = eval(x);
                if (v < r.value) {
                    r.x = std::move(x);
                    r.value = v;
                    improved = true;
                    // speculative search: keep stepping the successful
                    // direction while it pays off
                    while (!evalBudget || *evalBudget > 0) {
                        std::vector<double> y = r.x;
                        y[i] = std::clamp(y[i] + sign * mesh, lower[i], upper[i]);
                        if (y[i] == r.x[i]) break;
                        const double w = eval(y);
                        if (w >= r.value) break;
                        r.x = std::move(y);
                        r.value = w;
                    }
                    break;
                }
                if (evalBudget && *evalBudget <= 0) break;
            }
        }
        if (!improved) mesh *= 0.5;
    }
    r.evaluations = evals;
    r.converged = true;
    return r;
}

std::vector<std::vector<double>> latin_hypercube(const std::vector<double>& lower,
                                                 const std::vector<double>& upper, int n,
                                                 std::uint64_t seed) {
    const std::size_t dim = lower.size();
    if (upper.size() != dim) throw std::invalid_argument("latin_hypercube: bound arity mismatch");
    if (n < 1) throw std::invalid_argument("latin_hypercube: n < 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    std::vector<int> perm(n);
    for (std::size_t d = 0; d < dim; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int k = 0; k < n; ++k) {
            const double u = (perm[k] + unit(rng)) / n;
            pts[k][d] = lower[d] + u * (upper[d] - lower[d]);
        }
    }
    return pts;
}

}  // namespace tomocal::optim
