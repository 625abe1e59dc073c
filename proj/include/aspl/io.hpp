#pragma once

// Versioned text formats for shapes, models, schedules and masks. Numbers use
// the shortest round-trip representation, so write -> read -> write is
// byte-identical.

#include <aspl/raster.hpp>
#include <aspl/segment.hpp>
#include <aspl/shape_model.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aspl {

/// Master points of one or more contour parts plus the spline settings.
struct ShapeRecord {
    SplineMeta meta;
    std::vector<Point2> masters;

    friend bool operator==(const ShapeRecord&, const ShapeRecord&) = default;
};

std::string format_shape(const ShapeRecord& shape);
ShapeRecord parse_shape(std::string_view text);
ShapeRecord read_shape(const std::filesystem::path& path);
void write_shape(const std::filesystem::path& path, const ShapeRecord& shape);

/// Models are checked for basis orthonormality within 1e-6 on parse.
std::string format_model(const ShapeModel& model);
ShapeModel parse_model(std::string_view text);
ShapeModel read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const ShapeModel& model);

std::string format_schedule(const PyramidSchedule& sched);
PyramidSchedule parse_schedule(std::string_view text);
PyramidSchedule read_schedule(const std::filesystem::path& path);
void write_schedule(const std::filesystem::path& path, const PyramidSchedule& sched);

/// Plain PBM (P1) with set pixels written as 1.
std::string format_mask(const BinaryMask& mask);
/// Any Netpbm raster; nonzero samples count as set.
BinaryMask parse_mask(std::string_view bytes);
BinaryMask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

/// Masters of each part as separate point lists.
std::vector<std::vector<Point2>> split_parts(const ShapeRecord& shape);

/// Expanded contour parts of a shape, slaves placed per the record's epsilon.
std::vector<ControlShape> expanded_parts(const ShapeRecord& shape);

/// Concatenated expanded points.
FlatShape expanded_flat(const ShapeRecord& shape);

SplineConfig spline_config(const SplineMeta& meta, int samples_per_segment = 32);

/// Mask of the closed curve through each part's masters.
BinaryMask rasterize_record(const ShapeRecord& shape, int width, int height,
                            int samples_per_segment = 32);

} // namespace aspl
