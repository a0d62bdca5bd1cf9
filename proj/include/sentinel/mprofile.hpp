#pragma once

#include "sentinel/errors.hpp"
#include "sentinel/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sentinel {

// Per-start-index self-join result for one sensor. All sequences have length n - m + 1.
struct AnomalyProfile {
    std::string sensor_id;
    Index m = 0;
    Real delta = 0.0;             // closeness radius
    Vector nn_dist;               // nearest non-trivial neighbour distance
    Eigen::VectorXi nn_index;     // index achieving nn_dist (-1 if none)
    Eigen::VectorXi close_count;  // neighbours within delta
    Vector score;                 // adjusted anomaly score

    // Per-window mean and population sigma, kept for incremental appends.
    Vector window_mean;
    Vector window_sigma;

    Index size() const { return nn_dist.size(); }
};

// Maps (nnDist, closeCount) to an anomaly score. Must be non-increasing in closeCount
// and bounded above by nnDist.
using ScoreAdjustment = std::function<Real(Real nn_dist, int close_count)>;

// nnDist / (1 + ln(1 + closeCount)).
Real log_damped_score(Real nn_dist, int close_count);

struct ProfileOptions {
    Index m = 100;
    std::optional<Real> delta;  // empty: 2 x median of this profile's own nnDist
    ScoreAdjustment adjust = log_damped_score;
};

inline Index exclusion_zone(Index m) { return (m + 1) / 2; }

namespace detail {

// A window whose population deviation is this small relative to its mean is treated as flat.
template <typename Scalar>
bool is_flat(Scalar mean, Scalar sigma) {
    return sigma <= Scalar(1e-12) * (Scalar(1) + std::abs(mean));
}

} // namespace detail

// Euclidean distance between the z-normalised (population sigma) versions of a and b.
// Flat vs flat is 0, flat vs non-flat is sqrt(2m).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar znorm_distance(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    if (a.size() != b.size()) throw ArgumentError("subsequence lengths differ");
    if (a.size() < 2) throw ArgumentError("subsequences need at least two samples");
    const auto m = static_cast<Scalar>(a.size());

    const Scalar mean_a = a.mean();
    const Scalar mean_b = b.mean();
    const Scalar sigma_a = std::sqrt((a.array() - mean_a).square().sum() / m);
    const Scalar sigma_b = std::sqrt((b.array() - mean_b).square().sum() / m);
    const bool flat_a = detail::is_flat(mean_a, sigma_a);
    const bool flat_b = detail::is_flat(mean_b, sigma_b);
    if (flat_a && flat_b) return Scalar(0);
    if (flat_a || flat_b) return std::sqrt(Scalar(2) * m);
    return ((a.array() - mean_a) / sigma_a - (b.array() - mean_b) / sigma_b).matrix().norm();
}

// Sliding dot products of `query` against every window of `series`, via FFT.
Vector sliding_dot_product(const Eigen::Ref<const Vector>& query, const Eigen::Ref<const Vector>& series);

// Fast self-join: FFT first row plus diagonal dot-product recurrences. O(n^2) time, O(n) memory.
AnomalyProfile matrix_profile(const Eigen::Ref<const Vector>& series, const ProfileOptions& opts);

// Reference implementation: explicit z-normalisation of every subsequence, all pairs compared.
AnomalyProfile matrix_profile_naive(const Eigen::Ref<const Vector>& series, const ProfileOptions& opts);

// Updates a profile of series[0, n-1) in place so it equals a batch recompute over the whole
// of `extended` (same delta and adjustment). O(n m).
void extend_profile(AnomalyProfile& profile, const Eigen::Ref<const Vector>& extended,
                    const ScoreAdjustment& adjust = log_damped_score);

// Appends v to `series` and extends the profile accordingly.
void append_sample(AnomalyProfile& profile, Vector& series, Real v,
                   const ScoreAdjustment& adjust = log_damped_score);

// 2 x median of baseline nearest-neighbour distances.
Real auto_delta(const Eigen::Ref<const Vector>& baseline_nn_dist);

// Spreads subsequence scores onto samples: sample t gets the max score of every subsequence
// covering it. Result has length n.
Vector timestep_scores(const AnomalyProfile& profile, Index n);

} // namespace sentinel
