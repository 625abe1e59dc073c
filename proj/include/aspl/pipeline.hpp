#pragma once

// End-to-end training and segmentation shared by the CLI, the session
// service and the tests.

#include <aspl/io.hpp>
#include <aspl/segment.hpp>
#include <aspl/shape_model.hpp>
#include <aspl/shape_space.hpp>

#include <span>
#include <string>
#include <vector>

namespace aspl {

struct TrainOptions {
    double phi = 0.95;
    int epsilon = 0;
    double alpha = 0.5;
    double rho = 0.5;
    AlignOptions align;
};

struct TrainResult {
    ShapeModel model;
    AlignedSet aligned;
};

/// normalize -> expand -> align -> PCA. All records must share topology and
/// parts table.
TrainResult train_from_shapes(std::span<const ShapeRecord> shapes, const TrainOptions& options);

struct SegmentOutcome {
    PyramidResult fit;
    /// Fitted masters with the model's spline settings.
    ShapeRecord contour;
    BinaryMask mask;
};

SegmentOutcome segment_image(const Image& img, const ShapeModel& model, const PyramidSchedule& sched,
                             int samples_per_segment = 32);

} // namespace aspl
