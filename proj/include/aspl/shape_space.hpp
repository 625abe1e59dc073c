#pragma once

#include <aspl/geometry.hpp>

#include <span>
#include <vector>

namespace aspl {

/// Similarity pose: x' = tau_x + s (x cos theta - y sin theta), likewise for y.
struct PoseParams {
    double theta = 0.0;
    double s = 1.0;
    double tau_x = 0.0;
    double tau_y = 0.0;

    double a_x() const;
    double a_y() const;

    friend bool operator==(const PoseParams&, const PoseParams&) = default;
};

/// Per-point weights, nonnegative and summing to 1.
using PointWeights = Eigen::VectorXd;

struct Normalized {
    FlatShape shape;
    Point2 centroid;
    double eta = 1.0;
};

/// Centers on the centroid and divides by the largest per-axis deviation, so
/// every coordinate lands in [-1, 1].
Normalized normalize(const FlatShape& shape);

FlatShape transform(const FlatShape& shape, const PoseParams& pose);

/// Rotation and scale only.
FlatShape transform_linear(const FlatShape& shape, double theta, double s);

PointWeights uniform_weights(Eigen::Index m);

/// Weighted least-squares similarity taking `source` onto `target`.
PoseParams align_pair(const FlatShape& target, const FlatShape& source,
                      const PointWeights& weights);

/// Weights favouring points whose distances to the other points vary least
/// across the set. Falls back to uniform weights when any variance sum is zero.
PointWeights point_weights(std::span<const FlatShape> shapes);

struct AlignOptions {
    double tolerance = 1e-6;
    int max_iterations = 100;
    std::size_t basis = 0;
};

struct AlignedSet {
    std::vector<FlatShape> aligned;
    FlatShape mean;
    PointWeights weights;
    int iterations = 0;
    /// Max mean-coordinate change per iteration.
    std::vector<double> deltas;
};

AlignedSet align_set(std::span<const FlatShape> shapes, const AlignOptions& options = {});

double weighted_residual(const FlatShape& target, const FlatShape& source,
                         const PointWeights& weights);

} // namespace aspl
