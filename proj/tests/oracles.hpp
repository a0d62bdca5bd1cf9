#pragma once

// Independent reference computations used as test oracles. None of these call into the
// library code they check.

#include "sentinel/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using sentinel::Index;
using sentinel::Real;
using sentinel::Vector;

inline Vector random_walk(Index n, std::mt19937_64& rng) {
    std::normal_distribution<Real> step(0.0, 1.0);
    Vector v(n);
    Real x = 0.0;
    for (Index i = 0; i < n; ++i) v[i] = (x += step(rng));
    return v;
}

inline Vector sine(Index n, Real period, Real noise = 0.0, unsigned seed = 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<Real> eps(0.0, noise > 0.0 ? noise : 1.0);
    Vector v(n);
    for (Index t = 0; t < n; ++t)
        v[t] = std::sin(2.0 * std::numbers::pi * static_cast<Real>(t) / period) + (noise > 0.0 ? eps(rng) : 0.0);
    return v;
}

// Distance between z-normalised windows, written out element by element.
inline Real znorm_dist(const Vector& s, Index i, Index j, Index m) {
    auto stats = [&](Index a, Real& mu, Real& sd) {
        mu = 0.0;
        for (Index k = 0; k < m; ++k) mu += s[a + k];
        mu /= static_cast<Real>(m);
        Real ss = 0.0;
        for (Index k = 0; k < m; ++k) ss += (s[a + k] - mu) * (s[a + k] - mu);
        sd = std::sqrt(ss / static_cast<Real>(m));
    };
    Real mi, si, mj, sj;
    stats(i, mi, si);
    stats(j, mj, sj);
    const bool fi = si <= 1e-12 * (1.0 + std::abs(mi));
    const bool fj = sj <= 1e-12 * (1.0 + std::abs(mj));
    if (fi && fj) return 0.0;
    if (fi || fj) return std::sqrt(2.0 * static_cast<Real>(m));
    Real d2 = 0.0;
    for (Index k = 0; k < m; ++k) {
        const Real a = (s[i + k] - mi) / si;
        const Real b = (s[j + k] - mj) / sj;
        d2 += (a - b) * (a - b);
    }
    return std::sqrt(d2);
}

struct BruteProfile {
    std::vector<Real> nn;
    std::vector<int> close;
};

// O(n^2 m) self-join with exclusion zone ceil(m/2). Windows are z-normalised up front.
inline BruteProfile brute_profile(const Vector& s, Index m, Real delta) {
    const Index count = s.size() - m + 1;
    const Index excl = (m + 1) / 2;
    const auto mm = static_cast<std::size_t>(m);
    std::vector<Real> z(static_cast<std::size_t>(count) * mm);
    std::vector<char> flat(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
        Real mu = 0.0;
        for (Index k = 0; k < m; ++k) mu += s[i + k];
        mu /= static_cast<Real>(m);
        Real ss = 0.0;
        for (Index k = 0; k < m; ++k) ss += (s[i + k] - mu) * (s[i + k] - mu);
        const Real sd = std::sqrt(ss / static_cast<Real>(m));
        flat[static_cast<std::size_t>(i)] = sd <= 1e-12 * (1.0 + std::abs(mu));
        for (Index k = 0; k < m; ++k) z[static_cast<std::size_t>(i) * mm + static_cast<std::size_t>(k)] = (s[i + k] - mu) / sd;
    }
    BruteProfile p{std::vector<Real>(static_cast<std::size_t>(count), std::numeric_limits<Real>::infinity()),
                   std::vector<int>(static_cast<std::size_t>(count), 0)};
    for (Index i = 0; i < count; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        for (Index j = 0; j < count; ++j) {
            if (std::abs(i - j) < excl) continue;
            const auto jj = static_cast<std::size_t>(j);
            Real d;
            if (flat[ii] && flat[jj]) d = 0.0;
            else if (flat[ii] || flat[jj]) d = std::sqrt(2.0 * static_cast<Real>(m));
            else {
                Real d2 = 0.0;
                const Real* a = &z[ii * mm];
                const Real* b = &z[jj * mm];
                for (std::size_t k = 0; k < mm; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
                d = std::sqrt(d2);
            }
            p.nn[ii] = std::min(p.nn[ii], d);
            if (d <= delta) ++p.close[ii];
        }
    }
    return p;
}

// Lag of the highest autocorrelation peak in [min_lag, max_lag], refined by a parabola through
// the neighbouring lags. The biased estimator (divide by n) damps multiples of the period.
inline Real autocorrelation_period(const Vector& x, Index min_lag, Index max_lag) {
    const Index n = x.size();
    const Real mu = x.mean();
    auto acf = [&](Index lag) {
        Real s = 0.0;
        for (Index t = 0; t + lag < n; ++t) s += (x[t] - mu) * (x[t + lag] - mu);
        return s / static_cast<Real>(n);
    };
    Index best = min_lag;
    Real best_v = -std::numeric_limits<Real>::infinity();
    for (Index lag = min_lag; lag <= max_lag; ++lag) {
        const Real v = acf(lag);
        if (v > best_v) {
            best_v = v;
            best = lag;
        }
    }
    const Real a = acf(best - 1), b = best_v, c = acf(best + 1);
    const Real denom = a - 2.0 * b + c;
    const Real shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    return static_cast<Real>(best) + shift;
}

struct Spiral {
    Real period, r_outer, r_hub, cx, cy;
    Index cap;
};

// Closed-form spiral position written independently of the library.
inline void spiral_point(const Spiral& sp, Index start, Index end, Index t, Real& x, Real& y) {
    const Real n = static_cast<Real>(end - start);
    const Real revs = std::max(static_cast<Real>(sp.cap), std::ceil((n - 1.0) / sp.period));
    const Real s = (sp.r_outer - sp.r_hub) / revs;
    const Real u = static_cast<Real>(end - 1 - t) / sp.period;
    const Real r = sp.r_outer - s * u;
    const Real a = -2.0 * std::numbers::pi * u;
    x = sp.cx + r * std::sin(a);
    y = sp.cy - r * std::cos(a);
}

// Sample whose spiral position is nearest to (x, y), by exhaustive search.
inline Index nearest_sample(const Spiral& sp, Index start, Index end, Real x, Real y, Real* best_dist = nullptr) {
    Index best = start;
    Real best_d = std::numeric_limits<Real>::infinity();
    for (Index t = start; t < end; ++t) {
        Real px, py;
        spiral_point(sp, start, end, t, px, py);
        const Real d = std::hypot(px - x, py - y);
        if (d < best_d) {
            best_d = d;
            best = t;
        }
    }
    if (best_dist) *best_dist = best_d;
    return best;
}

inline Real distance_to_sample(const Spiral& sp, Index start, Index end, Index t, Real x, Real y) {
    Real px, py;
    spiral_point(sp, start, end, t, px, py);
    return std::hypot(px - x, py - y);
}

} // namespace oracle
