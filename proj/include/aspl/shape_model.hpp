#pragma once

// Point distribution model over aligned, expanded spline shapes.

#include <aspl/geometry.hpp>
#include <aspl/shape_space.hpp>
#include <aspl/spline.hpp>

#include <span>
#include <vector>

namespace aspl {

using ModeVector = Eigen::VectorXd;

/// Spline settings the model was trained with, and how its points split into
/// contour parts. `parts` counts masters per part.
struct SplineMeta {
    double alpha = 0.5;
    double rho = 0.5;
    int epsilon = 0;
    Topology topology = Topology::Closed;
    std::vector<int> parts;

    /// Expanded point count of each part.
    std::vector<int> expanded_parts() const;
    int master_count() const;
    int expanded_count() const;

    friend bool operator==(const SplineMeta&, const SplineMeta&) = default;
};

struct ShapeModel {
    FlatShape mean;
    /// Full orthonormal eigenbasis, columns sorted by descending eigenvalue.
    Eigen::MatrixXd basis;
    /// Full spectrum, descending; values below the zero threshold stored as 0.
    Eigen::VectorXd spectrum;
    int g = 0;
    double phi = 0.95;
    PointWeights weights;
    SplineMeta meta;
    int training_count = 0;

    auto eigvecs() const { return basis.leftCols(g); }
    auto eigvals() const { return spectrum.head(g); }
    Eigen::Index dim() const { return mean.size(); }
    int nonzero_modes() const;

    /// Same model with g re-selected for another retention ratio.
    ShapeModel with_phi(double ratio) const;
};

/// Relative cutoff below which an eigenvalue counts as zero.
inline constexpr double kZeroEigenRatio = 1e-12;

/// Smallest g whose leading eigenvalues exceed `phi` of the total; zero-valued
/// modes are never selected.
int select_mode_count(const Eigen::VectorXd& spectrum, double phi);

ShapeModel train(std::span<const FlatShape> aligned, double phi);

/// Covariance with the 1/r normalization, shared by train() and its tests.
Eigen::MatrixXd shape_covariance(std::span<const FlatShape> aligned, const FlatShape& mean);

FlatShape synthesize(const ShapeModel& model, const ModeVector& b);
ModeVector project(const ShapeModel& model, const FlatShape& shape);
ModeVector clamp_modes(const ShapeModel& model, const ModeVector& b);
ModeVector rescale_modes(const ShapeModel& model, const ModeVector& b, double d_max);
double mahalanobis(const ShapeModel& model, const ModeVector& b);

} // namespace aspl
