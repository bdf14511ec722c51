#include "tomocal/reconstruction.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "tomocal/kernels.hpp"

namespace tomocal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kProbFloor = 1e-12;  // survives f = 0 together with p -> 0

double floored(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

double likelihood_from_probs(const Tomogram& t, const std::vector<double>& probs) {
    double L = 0.0;
    for (std::size_t j = 0; j < t.perSetting.size(); ++j) {
        const double p = floored(probs[j]);
        L += t.perSetting[j].fPlus * std::log(p) + t.perSetting[j].fMinus * std::log(1.0 - p);
    }
    return L;
}

// eigenvalue-based trace distance between two packed Hermitian matrices
double packed_trace_distance(const kernels::Packed& a, const kernels::Packed& b) {
    const double d0 = a.v[0] - b.v[0];
    const double d1 = a.v[1] - b.v[1];
    const double off2 = 0.5 * ((a.v[2] - b.v[2]) * (a.v[2] - b.v[2]) +
                               (a.v[3] - b.v[3]) * (a.v[3] - b.v[3]));
    const double half = 0.5 * (d0 + d1);
    const double r = std::sqrt(std::max(half * half - (d0 * d1 - off2), 0.0));
    return 0.5 * (std::abs(half - r) + std::abs(half + r));
}

}  // namespace

Tomogram simulate_tomogram(const DensityMatrix& rho, const std::vector<Effect>& trueEffects,
                           std::optional<long> shots, std::optional<std::uint64_t> rngSeed) {
    if (trueEffects.empty()) throw std::invalid_argument("simulate_tomogram: no effects");
    Tomogram t;
    t.shots = shots;
    std::mt19937_64 rng(rngSeed.value_or(0));
    for (std::size_t j = 0; j < trueEffects.size(); ++j) {
        const double p = born_probability(rho, trueEffects[j]);
        double fPlus = p;
        if (shots) {
            std::binomial_distribution<long> bin(*shots, p);
            fPlus = static_cast<double>(bin(rng)) / static_cast<double>(*shots);
        }
        t.perSetting.push_back({static_cast<int>(j), fPlus, 1.0 - fPlus});
    }
    return t;
}

double log_likelihood(const DensityMatrix& rho, const Tomogram& t,
                      const std::vector<Effect>& effects) {
    std::vector<double> probs;
    probs.reserve(t.perSetting.size());
    for (const auto& s : t.perSetting)
        probs.push_back(born_probability(rho, effects.at(s.effectIndex)));
    return likelihood_from_probs(t, probs);
}

MaxLikResult maxlik(const Tomogram& t, const std::vector<Effect>& assumedEffects,
                    const MaxLikOptions& opts) {
    const std::size_t n = t.perSetting.size();
    if (n == 0) throw std::invalid_argument("maxlik: empty tomogram");
    if (opts.maxIterations < 1 || opts.traceDistanceTol <= 0.0 || opts.dilution <= 0.0 ||
        opts.dilution > 1.0)
        throw std::invalid_argument("maxlik: bad options");
    for (const auto& s : t.perSetting) {
        if (!(s.fPlus >= 0.0 && s.fPlus <= 1.0) || std::abs(s.fPlus + s.fMinus - 1.0) > 1e-12)
            throw std::invalid_argument("maxlik: invalid frequencies");
        if (s.effectIndex < 0 || s.effectIndex >= static_cast<int>(assumedEffects.size()))
            throw std::invalid_argument("maxlik: effect index out of range");
    }

    const auto& ops = kernels::ops();

    std::vector<kernels::Packed> eff(n);
    for (std::size_t j = 0; j < n; ++j)
        eff[j] = kernels::pack(assumedEffects[t.perSetting[j].effectIndex].m);
    const double* effFlat = eff.front().v;

    kernels::Packed rho = kernels::pack(Mat2{0.5, 0.0, 0.0, 0.5});
    std::vector<double> probs(n), candProbs(n), weights(n), q1(n), q2(n);
    ops.dot_batch(rho.v, effFlat, n, probs.data());
    double L = likelihood_from_probs(t, probs);

    // Eigenvalue line search: holding the eigenvectors of rho fixed, the
    // candidates (1-x)|v1><v1| + x|v2><v2| form a segment on which the
    // log-likelihood is concave in x. A ternary search jumps straight to the
    // best split. This closes boundary gaps the multiplicative update only
    // approaches as O(1/k), and just as importantly walks *off* the boundary
    // when the optimum is mixed but an earlier step landed near rank one.
    // Returns the trace-distance step taken, or -1 when nothing improves.
    const auto eigen_split_search = [&]() -> double {
        const Mat2 m = kernels::unpack(rho);
        const auto ev = hermitian_eigenvalues(m);  // ascending
        const double a = m.e[0].real(), dDiag = m.e[3].real();
        const cplx b = m.e[1];
        std::array<cplx, 2> v1;
        if (std::abs(ev[1] - a) > std::abs(ev[1] - dDiag)) v1 = {b, cplx(ev[1] - a)};
        else v1 = {cplx(ev[1] - dDiag), std::conj(b)};
        double nn = std::sqrt(std::norm(v1[0]) + std::norm(v1[1]));
        if (nn < 1e-300) return -1.0;  // degenerate spectrum, no direction
        v1[0] /= nn;
        v1[1] /= nn;
        const std::array<cplx, 2> v2{-std::conj(v1[1]), std::conj(v1[0])};
        const kernels::Packed p1 = kernels::pack(outer(v1, v1));
        const kernels::Packed p2 = kernels::pack(outer(v2, v2));
        ops.dot_batch(p1.v, effFlat, n, q1.data());
        ops.dot_batch(p2.v, effFlat, n, q2.data());
        const auto splitL = [&](double x) {
            for (std::size_t j = 0; j < n; ++j) candProbs[j] = (1.0 - x) * q1[j] + x * q2[j];
            return likelihood_from_probs(t, candProbs);
        };
        // keep a sliver of rank two so later rotations stay reachable
        double lo = 1e-12, hi = 0.5;
        while (hi - lo > 1e-13) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (splitL(m1) < splitL(m2)) lo = m1;
            else hi = m2;
        }
        const double x = 0.5 * (lo + hi);
        const double candL = splitL(x);  // also refreshes candProbs for x
        if (candL < L) return -1.0;
        kernels::Packed cand;
        for (int k = 0; k < 4; ++k) cand.v[k] = (1.0 - x) * p1.v[k] + x * p2.v[k];
        const double step = packed_trace_distance(cand, rho);
        rho = cand;
        probs = candProbs;
        L = candL;
        return step;
    };

    MaxLikResult res;
    int it = 0;
    for (; it < opts.maxIterations; ++it) {
        if (it > 0 && it % 32 == 0) eigen_split_search();
        // R = (1/n) sum_j [ fPlus/p pi + fMinus/(1-p) (I - pi) ]
        double idCoef = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double p = floored(probs[j]);
            const double wMinus = t.perSetting[j].fMinus / (1.0 - p);
            idCoef += wMinus;
            weights[j] = t.perSetting[j].fPlus / p - wMinus;
        }
        kernels::Packed r{{idCoef, idCoef, 0.0, 0.0}};
        ops.axpy_batch(effFlat, weights.data(), n, r.v);
        const double inv = 1.0 / static_cast<double>(n);
        for (double& v : r.v) v *= inv;

        double d = opts.dilution;
        kernels::Packed cand{};
        double candL = 0.0;
        bool accepted = false;
        while (true) {
            // A = I + d (R - I), candidate = A rho A normalized
            Mat2 a = kernels::unpack(r);
            a = Mat2::identity() + cplx(d) * (a - Mat2::identity());
            Mat2 next = a * kernels::unpack(rho) * a;
            const double tr = next.trace().real();
            next = (1.0 / tr) * next;
            cand = kernels::pack(next);
            ops.dot_batch(cand.v, effFlat, n, candProbs.data());
            candL = likelihood_from_probs(t, candProbs);
            if (candL >= L - 1e-15) {
                accepted = true;
                break;
            }
            d *= 0.5;
            if (d < 1e-3) break;  // flat to machine precision
        }
        if (!accepted) {
            // flat along R rho R; confirm it is also flat across eigenvalue
            // splits before declaring a fixed point
            if (eigen_split_search() < opts.traceDistanceTol) {
                res.converged = true;
                break;
            }
            continue;
        }
        const double step = packed_trace_distance(cand, rho);
        rho = cand;
        probs = candProbs;
        L = candL;
        if (step < opts.traceDistanceTol && eigen_split_search() < opts.traceDistanceTol) {
            ++it;
            res.converged = true;
            break;
        }
    }

    // clip tiny negative eigenvalues introduced by roundoff
    Mat2 m = kernels::unpack(rho);
    m.e[1] = 0.5 * (m.e[1] + std::conj(m.e[2]));
    m.e[2] = std::conj(m.e[1]);
    m.e[0] = cplx(m.e[0].real());
    m.e[3] = cplx(m.e[3].real());
    res.rho = DensityMatrix(m);
    res.iterations = it;
    res.logLikelihood = L;
    return res;
}

StokesVector stokes_from_density(const DensityMatrix& rho, double s0) {
    const BlochVector v = bloch_vector(rho);
    return {s0, s0 * v.z, s0 * v.x, s0 * v.y};
}

Mat2 density_carrier_from_stokes(const StokesVector& s) {
    return 0.5 * (cplx(s.s0) * Mat2::identity() + cplx(s.s1) * pauli_z() +
                  cplx(s.s2) * pauli_x() + cplx(s.s3) * pauli_y());
}

namespace {

double polarimeter_intensity(const Mat2& carrier, double alpha, double retardance) {
    const Mat2 w = waveplate_unitary(alpha, retardance);
    // Tr[carrier W^dag |0><0| W] = <0| W carrier W^dag |0>
    const Mat2 m = w * carrier * w.adjoint();
    return m.e[0].real();
}

std::array<double, 5> fourier_coefficients(const std::vector<double>& angles,
                                           const std::vector<double>& values) {
    const std::size_t n = angles.size();
    std::array<double, 5> c{};
    for (std::size_t k = 0; k < n; ++k) {
        const double a = angles[k], v = values[k];
        c[0] += v;
        c[1] += v * std::cos(2 * a);
        c[2] += v * std::sin(2 * a);
        c[3] += v * std::cos(4 * a);
        c[4] += v * std::sin(4 * a);
    }
    c[0] /= n;
    for (int i = 1; i < 5; ++i) c[i] *= 2.0 / n;
    return c;
}

}  // namespace

PolarimeterTrace polarimeter_trace(const DensityMatrix& rho, double trueRetardanceDev,
                                   int nSamples, double s0) {
    if (nSamples < 8) throw std::invalid_argument("polarimeter_trace: need >= 8 samples");
    const double retardance = kPi / 2 + trueRetardanceDev;
    PolarimeterTrace tr;
    tr.angles.reserve(nSamples);
    tr.intensities.reserve(nSamples);
    for (int k = 0; k < nSamples; ++k) {
        const double a = 2 * kPi * k / nSamples;
        tr.angles.push_back(a);
        tr.intensities.push_back(s0 * polarimeter_intensity(rho.m, a, retardance));
    }
    return tr;
}

StokesVector polarimeter_reconstruct(const PolarimeterTrace& trace,
                                     double assumedRetardanceDev) {
    const std::size_t n = trace.angles.size();
    if (n < 8 || trace.intensities.size() != n)
        throw std::invalid_argument("polarimeter_reconstruct: bad trace");
    const double spacing = 2 * kPi / n;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(trace.angles[k] - k * spacing) > 1e-9)
            throw std::invalid_argument("polarimeter_reconstruct: non-uniform angles");

    const double retardance = kPi / 2 + assumedRetardanceDev;

    // design matrix: Fourier coefficients of the forward model for the four
    // Stokes basis inputs at the assumed retardance
    const std::array<StokesVector, 4> basis{StokesVector{1, 0, 0, 0}, StokesVector{0, 1, 0, 0},
                                            StokesVector{0, 0, 1, 0}, StokesVector{0, 0, 0, 1}};
    double design[5][4];
    for (int b = 0; b < 4; ++b) {
        const Mat2 carrier = density_carrier_from_stokes(basis[b]);
        std::vector<double> vals(n);
        for (std::size_t k = 0; k < n; ++k)
            vals[k] = polarimeter_intensity(carrier, trace.angles[k], retardance);
        const auto c = fourier_coefficients(trace.angles, vals);
        for (int i = 0; i < 5; ++i) design[i][b] = c[i];
    }

    const auto data = fourier_coefficients(trace.angles, trace.intensities);

    // normal equations, 4x4 Gaussian elimination with partial pivoting
    double ata[4][4] = {};
    double atb[4] = {};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 5; ++k) {
            atb[i] += design[k][i] * data[k];
            for (int j = 0; j < 4; ++j) ata[i][j] += design[k][i] * design[k][j];
        }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[pivot][col])) pivot = r;
        if (std::abs(ata[pivot][col]) < 1e-10)
            throw std::runtime_error(
                "polarimeter_reconstruct: ill-conditioned inversion (retardance near 0 mod pi)");
        if (pivot != col) {
            for (int j = 0; j < 4; ++j) std::swap(ata[col][j], ata[pivot][j]);
            std::swap(atb[col], atb[pivot]);
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = ata[r][col] / ata[col][col];
            for (int j = 0; j < 4; ++j) ata[r][j] -= f * ata[col][j];
            atb[r] -= f * atb[col];
        }
    }
    return {atb[0] / ata[0][0], atb[1] / ata[1][1], atb[2] / ata[2][2], atb[3] / ata[3][3]};
}

}  // namespace tomocal
