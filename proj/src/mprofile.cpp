#include "sentinel/mprofile.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <deque>
#include <limits>

namespace sentinel {

Real log_damped_score(Real nn_dist, int close_count) {
    return nn_dist / (1.0 + std::log1p(static_cast<Real>(close_count)));
}

namespace {

struct WindowStats {
    Vector mean;
    Vector sigma;
};

WindowStats window_stats(const Eigen::Ref<const Vector>& x, Index m) {
    const Index count = x.size() - m + 1;
    WindowStats s{Vector(count), Vector(count)};
    for (Index i = 0; i < count; ++i) {
        auto w = x.segment(i, m);
        const Real mu = w.mean();
        const Real sd = std::sqrt((w.array() - mu).square().sum() / static_cast<Real>(m));
        s.mean[i] = mu;
        s.sigma[i] = sd;
    }
    return s;
}

// Squared distances below this (relative to m) are recomputed from explicit z-normalisation:
// the dot-product form loses most of its digits as the correlation approaches 1.
constexpr Real kRefineBelow = 1e-6;

Real refined_sq_distance(const Eigen::Ref<const Vector>& x, Index i, Index j, Index m,
                         Real mu_i, Real sd_i, Real mu_j, Real sd_j) {
    return ((x.segment(i, m).array() - mu_i) / sd_i - (x.segment(j, m).array() - mu_j) / sd_j)
        .square()
        .sum();
}

// Squared z-normalised distance from a dot product of windows of the series shifted by some
// centre; `cmu_*` are the window means with the same shift applied.
struct PairDistance {
    const Eigen::Ref<const Vector>& x;
    Index m;
    Real two_m;
    const Vector& mean;
    const Vector& sigma;
    Vector inv_sigma;
    std::vector<char> flat;
    bool any_flat = false;

    PairDistance(const Eigen::Ref<const Vector>& x_, Index m_, const Vector& mean_, const Vector& sigma_)
        : x(x_), m(m_), two_m(2.0 * static_cast<Real>(m_)), mean(mean_), sigma(sigma_),
          inv_sigma(sigma_.size()), flat(static_cast<std::size_t>(sigma_.size())) {
        for (Index i = 0; i < sigma.size(); ++i) {
            const bool f = detail::is_flat(mean[i], sigma[i]);
            flat[static_cast<std::size_t>(i)] = f;
            any_flat = any_flat || f;
            inv_sigma[i] = f ? 0.0 : 1.0 / sigma[i];
        }
    }

    Real operator()(Index i, Index j, Real qt, Real cmu_i, Real cmu_j) const {
        if (any_flat) {
            const bool fi = flat[static_cast<std::size_t>(i)];
            const bool fj = flat[static_cast<std::size_t>(j)];
            if (fi || fj) return fi && fj ? 0.0 : two_m;
        }
        Real d2 = two_m - 2.0 * (qt - static_cast<Real>(m) * cmu_i * cmu_j) * inv_sigma[i] * inv_sigma[j];
        if (d2 < kRefineBelow * two_m) [[unlikely]]
            d2 = refined_sq_distance(x, i, j, m, mean[i], sigma[i], mean[j], sigma[j]);
        return std::min(std::max(d2, 0.0), 2.0 * two_m);
    }
};

void check_profile_args(Index n, Index m) {
    if (m < 4) throw ArgumentError("subsequence length must be at least 4");
    if (n < 2 * m)
        throw ArgumentError("series of " + std::to_string(n) + " samples is shorter than 2m = " +
                            std::to_string(2 * m));
}

void finish_scores(AnomalyProfile& p, const ScoreAdjustment& adjust) {
    p.score.resize(p.size());
    for (Index i = 0; i < p.size(); ++i) p.score[i] = adjust(p.nn_dist[i], p.close_count[i]);
}

} // namespace

Vector sliding_dot_product(const Eigen::Ref<const Vector>& query, const Eigen::Ref<const Vector>& series) {
    const Index m = query.size();
    const Index n = series.size();
    if (m == 0 || n < m) throw ArgumentError("query longer than series");
    std::size_t size = 1;
    while (size < static_cast<std::size_t>(n + m)) size <<= 1;

    std::vector<Real> a(size, 0.0), b(size, 0.0);
    for (Index i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = series[i];
    for (Index i = 0; i < m; ++i) b[static_cast<std::size_t>(i)] = query[m - 1 - i];

    Eigen::FFT<Real> fft;
    std::vector<std::complex<Real>> fa, fb;
    fft.fwd(fa, a);
    fft.fwd(fb, b);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
    std::vector<Real> conv;
    fft.inv(conv, fa);

    Vector out(n - m + 1);
    for (Index j = 0; j < out.size(); ++j) out[j] = conv[static_cast<std::size_t>(m - 1 + j)];
    return out;
}

AnomalyProfile matrix_profile(const Eigen::Ref<const Vector>& series, const ProfileOptions& opts) {
    const Index n = series.size();
    const Index m = opts.m;
    check_profile_args(n, m);
    if (!series.allFinite()) throw ArgumentError("series contains non-finite values");

    const Index count = n - m + 1;
    const Index excl = exclusion_zone(m);
    const WindowStats st = window_stats(series, m);

    const Real centre = series.mean();
    const Vector xc = series.array() - centre;
    const Vector cmu = st.mean.array() - centre;
    const Vector first_row = sliding_dot_product(xc.head(m), xc);

    const PairDistance dist(series, m, st.mean, st.sigma);

    // Walks every pair (i, i + k) with k >= excl along diagonals, updating the dot product
    // in O(1) per step.
    auto for_each_pair = [&](auto&& visit) {
        const Real* x = xc.data();
        const Real* mu = cmu.data();
        for (Index k = excl; k < count; ++k) {
            Real qt = first_row[k];
            visit(0, k, dist(0, k, qt, mu[0], mu[k]));
            for (Index i = 1, j = k + 1; j < count; ++i, ++j) {
                qt += x[i + m - 1] * x[j + m - 1] - x[i - 1] * x[j - 1];
                visit(i, j, dist(i, j, qt, mu[i], mu[j]));
            }
        }
    };

    constexpr Real inf = std::numeric_limits<Real>::infinity();
    Vector nn2 = Vector::Constant(count, inf);
    Eigen::VectorXi nn_idx = Eigen::VectorXi::Constant(count, -1);
    Eigen::VectorXi close = Eigen::VectorXi::Zero(count);

    auto track_nearest = [&](Index i, Index j, Real d2) {
        if (d2 < nn2[i]) { nn2[i] = d2; nn_idx[i] = static_cast<int>(j); }
        if (d2 < nn2[j]) { nn2[j] = d2; nn_idx[j] = static_cast<int>(i); }
    };

    AnomalyProfile p;
    p.m = m;
    if (opts.delta) {
        p.delta = *opts.delta;
        const Real delta2 = p.delta * p.delta;
        for_each_pair([&](Index i, Index j, Real d2) {
            track_nearest(i, j, d2);
            if (d2 <= delta2) { ++close[i]; ++close[j]; }
        });
        p.nn_dist = nn2.array().sqrt();
    } else {
        for_each_pair(track_nearest);
        p.nn_dist = nn2.array().sqrt();
        p.delta = auto_delta(p.nn_dist);
        const Real delta2 = p.delta * p.delta;
        for_each_pair([&](Index i, Index j, Real d2) {
            if (d2 <= delta2) { ++close[i]; ++close[j]; }
        });
    }
    p.nn_index = std::move(nn_idx);
    p.close_count = std::move(close);
    p.window_mean = st.mean;
    p.window_sigma = st.sigma;
    finish_scores(p, opts.adjust);
    return p;
}

AnomalyProfile matrix_profile_naive(const Eigen::Ref<const Vector>& series, const ProfileOptions& opts) {
    const Index n = series.size();
    const Index m = opts.m;
    check_profile_args(n, m);
    const Index count = n - m + 1;
    const Index excl = exclusion_zone(m);
    const Real max_dist = std::sqrt(2.0 * static_cast<Real>(m));

    Eigen::MatrixXd z(m, count);
    std::vector<char> flat(static_cast<std::size_t>(count));
    AnomalyProfile p;
    p.m = m;
    p.window_mean.resize(count);
    p.window_sigma.resize(count);
    for (Index i = 0; i < count; ++i) {
        auto w = series.segment(i, m);
        const Real mu = w.mean();
        const Real sd = std::sqrt((w.array() - mu).square().sum() / static_cast<Real>(m));
        p.window_mean[i] = mu;
        p.window_sigma[i] = sd;
        flat[static_cast<std::size_t>(i)] = detail::is_flat(mu, sd);
        if (flat[static_cast<std::size_t>(i)]) z.col(i).setZero();
        else z.col(i) = (w.array() - mu) / sd;
    }
    auto distance = [&](Index i, Index j) -> Real {
        const bool fi = flat[static_cast<std::size_t>(i)], fj = flat[static_cast<std::size_t>(j)];
        if (fi || fj) return fi && fj ? 0.0 : max_dist;
        return (z.col(i) - z.col(j)).norm();
    };

    p.nn_dist = Vector::Constant(count, std::numeric_limits<Real>::infinity());
    p.nn_index = Eigen::VectorXi::Constant(count, -1);
    for (Index i = 0; i < count; ++i)
        for (Index j = 0; j < count; ++j) {
            if (std::abs(i - j) < excl) continue;
            const Real d = distance(i, j);
            if (d < p.nn_dist[i]) { p.nn_dist[i] = d; p.nn_index[i] = static_cast<int>(j); }
        }
    p.delta = opts.delta ? *opts.delta : auto_delta(p.nn_dist);
    p.close_count = Eigen::VectorXi::Zero(count);
    for (Index i = 0; i < count; ++i)
        for (Index j = 0; j < count; ++j)
            if (std::abs(i - j) >= excl && distance(i, j) <= p.delta) ++p.close_count[i];
    finish_scores(p, opts.adjust);
    return p;
}

void append_sample(AnomalyProfile& p, Vector& series, Real v, const ScoreAdjustment& adjust) {
    if (!std::isfinite(v)) throw ArgumentError("appended sample must be finite");
    if (series.size() - p.m + 1 != p.size()) throw ArgumentError("profile was not computed from this series");
    series.conservativeResize(series.size() + 1);
    series[series.size() - 1] = v;
    extend_profile(p, series, adjust);
}

void extend_profile(AnomalyProfile& p, const Eigen::Ref<const Vector>& series, const ScoreAdjustment& adjust) {
    const Index m = p.m;
    const Index n = series.size();
    if (n - m != p.size() || p.window_mean.size() != p.size())
        throw ArgumentError("profile does not cover all but the last sample of the series");
    if (!std::isfinite(series[n - 1])) throw ArgumentError("appended sample must be finite");

    const Index q = n - m;  // new window start
    const Index count = q + 1;
    auto w = series.segment(q, m);
    const Real mu = w.mean();
    const Real sd = std::sqrt((w.array() - mu).square().sum() / static_cast<Real>(m));

    p.window_mean.conservativeResize(count);
    p.window_sigma.conservativeResize(count);
    p.window_mean[q] = mu;
    p.window_sigma[q] = sd;
    const PairDistance dist(series, m, p.window_mean, p.window_sigma);
    const Vector centred_query = w.array() - mu;
    const Real delta2 = p.delta * p.delta;

    p.nn_dist.conservativeResize(count);
    p.nn_index.conservativeResize(count);
    p.close_count.conservativeResize(count);
    p.score.conservativeResize(count);
    Real best = std::numeric_limits<Real>::infinity();
    int best_idx = -1;
    int close = 0;
    for (Index j = 0; j + exclusion_zone(m) <= q; ++j) {
        const Real qt = centred_query.dot((series.segment(j, m).array() - mu).matrix());
        const Real d2 = dist(q, j, qt, 0.0, p.window_mean[j] - mu);
        if (d2 < best) { best = d2; best_idx = static_cast<int>(j); }
        const Real d = std::sqrt(d2);
        bool touched = false;
        if (d < p.nn_dist[j]) { p.nn_dist[j] = d; p.nn_index[j] = static_cast<int>(q); touched = true; }
        if (d2 <= delta2) { ++close; ++p.close_count[j]; touched = true; }
        if (touched) p.score[j] = adjust(p.nn_dist[j], p.close_count[j]);
    }
    p.nn_dist[q] = std::sqrt(best);
    p.nn_index[q] = best_idx;
    p.close_count[q] = close;
    p.score[q] = adjust(p.nn_dist[q], close);
}

Real auto_delta(const Eigen::Ref<const Vector>& baseline_nn_dist) {
    if (baseline_nn_dist.size() == 0) throw ArgumentError("cannot derive delta from an empty baseline");
    std::vector<Real> v(baseline_nn_dist.begin(), baseline_nn_dist.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    Real median = v[mid];
    if (v.size() % 2 == 0) {
        const Real lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (lower + median);
    }
    return 2.0 * median;
}

Vector timestep_scores(const AnomalyProfile& profile, Index n) {
    const Index count = profile.size();
    if (n != count + profile.m - 1) throw ArgumentError("series length does not match profile");
    Vector out(n);
    std::deque<Index> window;  // indices with decreasing scores
    Index next = 0;
    for (Index t = 0; t < n; ++t) {
        for (; next <= std::min(t, count - 1); ++next) {
            while (!window.empty() && profile.score[window.back()] <= profile.score[next]) window.pop_back();
            window.push_back(next);
        }
        while (window.front() < t - profile.m + 1) window.pop_front();
        out[t] = profile.score[window.front()];
    }
    return out;
}

} // namespace sentinel
