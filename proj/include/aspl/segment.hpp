#pragma once

// Model fitting: the shape alternates between model scale (synthesized from
// the mode vector) and image scale (posed into pixels), where gradient vector
// flow pushes each point along its normal. A pyramid driver runs the loop
// coarse to fine.

#include <aspl/image.hpp>
#include <aspl/raster.hpp>
#include <aspl/shape_model.hpp>
#include <aspl/shape_space.hpp>

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace aspl {

struct LevelConfig {
    int width = 0;
    int height = 0;
    std::optional<KernelSize> median;
    int iterations = 1;
    /// Transfer coefficients from the previous (coarser) level; absent on the
    /// entry level.
    std::optional<double> c_t, c_s, c_x, c_y, c_b;
    /// b_2 is set to c_b2 * sqrt(lambda_2) when the level starts.
    std::optional<double> c_b2;
    double phi = 0.95;
    double psi = 1.0;
    double mu = 0.1;
    int gvf_iterations = 200;
    double gvf_tolerance = 1e-4;
    /// D_max = d_max_factor * g.
    double d_max_factor = 2.0;

    void validate() const;
    friend bool operator==(const LevelConfig&, const LevelConfig&) = default;
};

struct PyramidSchedule {
    /// Coarse to fine.
    std::vector<LevelConfig> levels;
    PoseParams init_pose;
    /// Mode l (1-based) -> coefficient on sqrt(lambda_l), applied at entry.
    std::map<int, double> init_b;
    /// Max point movement (pixels) ending a single-level fit early.
    double tolerance = 0.1;

    void validate() const;
    friend bool operator==(const PyramidSchedule&, const PyramidSchedule&) = default;
};

/// The published five-level lung configuration for 256 x 256 inputs.
PyramidSchedule lung_schedule();

/// One level at the image's native size.
PyramidSchedule single_level_schedule(int width, int height, const PoseParams& init);

struct FitState {
    ModeVector b;
    PoseParams pose;
    FlatShape delta;
    int iteration = 0;
    int level = 0;
    FlatShape z_model;
    FlatShape z_image;
    FlatShape z_deformed;
    double d_m = 0.0;
    double d_max = 0.0;
    /// Largest point displacement (pixels) between consecutive image shapes.
    double movement = 0.0;
};

/// Contour layout used for tangent estimation: consecutive parts, each open or
/// closed.
struct PartLayout {
    std::vector<int> sizes;
    Topology topology = Topology::Closed;

    static PartLayout of(const SplineMeta& meta);
};

/// Unit normal per point from the central difference of its neighbours.
FlatShape point_normals(const FlatShape& shape, const PartLayout& layout);

/// Normal component of the sampled field at every point.
FlatShape normal_displacements(const FlatShape& z_image, const VectorField& field,
                               const PartLayout& layout);

FlatShape deform(const FlatShape& z_image, const FlatShape& d, double psi);

/// Pose taking the model-scale shape onto the previous deformed shape.
PoseParams recover_pose(const FlatShape& prev_deformed, const FlatShape& z_model_next);

struct BackToModel {
    FlatShape z_minus;
    PoseParams pose;
};

/// Aligns (z_deformed - delta) onto the mean and maps z_deformed with that pose.
BackToModel back_to_model(const FlatShape& z_deformed, const FlatShape& delta,
                          const FlatShape& mean);

/// Offset between the posed shape and the posed mean, z_image - T(mean),
/// computed through the linear part of the pose.
FlatShape pose_offset(const FlatShape& z_model, const FlatShape& mean, const PoseParams& pose);

/// State positioned at `pose` with mode vector `b`.
FitState make_state(const ShapeModel& model, const ModeVector& b, const PoseParams& pose, int level);

struct LevelOptions {
    /// Stop once movement drops below this; negative runs every iteration.
    double tolerance = -1.0;
};

/// Runs cfg.iterations updates. A singular pose solve ends the level early
/// with the last valid state.
std::vector<FitState> iterate_level(const FitState& start, const VectorField& field,
                                    const LevelConfig& cfg, const ShapeModel& model,
                                    const LevelOptions& options = {});

struct LevelResult {
    int level = 0;
    int g = 0;
    int iterations_run = 0;
    int gvf_iterations = 0;
    double gvf_residual = 0.0;
    bool aborted = false;
};

struct PyramidResult {
    /// Finest-level fitted shape in image coordinates (all expanded points).
    FlatShape contour;
    std::vector<FitState> history;
    std::vector<LevelResult> levels;
    FitState final_state;
};

PyramidResult run_pyramid(const Image& img, const ShapeModel& model, const PyramidSchedule& sched);

/// Masters of each part extracted from an expanded fit.
std::vector<Point2> fitted_masters(const FlatShape& contour, const SplineMeta& meta);

} // namespace aspl
