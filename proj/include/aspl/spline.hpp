#pragma once

// Catmull-Rom splines with alpha-parameterized knots (0 uniform, 0.5 centripetal,
// 1 chordal), endpoint extension for open contours, periodic wrap for closed
// contours, and slave-point expansion.

#include <aspl/geometry.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace aspl {

enum class Topology { Open, Closed };
enum class PointRole : std::uint8_t { Master, Slave };

struct SplineConfig {
    double alpha = 0.5;
    double rho = 0.5;
    int samples_per_segment = 32;
    /// Use p_{m+1} = p_m - rho (p_m - p_{m-1}) for the trailing phantom point
    /// instead of the symmetric outward extension.
    bool literal_trailing_phantom = false;

    void validate() const;
};

struct KnotSequence {
    std::vector<double> knots;
    double alpha = 0.5;
};

/// Ordered control points, each flagged master or slave.
///
/// Masters come first in every gap; every gap between consecutive masters
/// carries the same number of slaves. Open shapes end on a master, closed
/// shapes also carry slaves in the wrap-around gap.
class ControlShape {
public:
    ControlShape() = default;
    ControlShape(std::vector<Point2> points, Topology topology);
    ControlShape(std::vector<Point2> points, std::vector<PointRole> roles, Topology topology);

    const std::vector<Point2>& points() const noexcept { return points_; }
    const std::vector<PointRole>& roles() const noexcept { return roles_; }
    Topology topology() const noexcept { return topology_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    bool is_master(std::size_t i) const { return roles_.at(i) == PointRole::Master; }

    std::vector<std::size_t> master_indices() const;
    std::vector<Point2> masters() const;
    int slaves_per_gap() const noexcept { return slaves_per_gap_; }

private:
    void validate();

    std::vector<Point2> points_;
    std::vector<PointRole> roles_;
    Topology topology_ = Topology::Open;
    int slaves_per_gap_ = 0;
};

/// Minimum control-point count accepted for a topology.
std::size_t minimum_points(Topology topology) noexcept;

KnotSequence knot_sequence(std::span<const Point2> points, double alpha);

/// Prepends and appends the phantom points that let an open curve reach its ends.
std::vector<Point2> extend_endpoints(std::span<const Point2> points, double rho,
                                     bool literal_trailing = false);
std::vector<Point2> extend_endpoints(const ControlShape& shape, double rho,
                                     bool literal_trailing = false);

/// Barry-Goldman pyramid evaluation of one segment, t in [t1, t2].
Point2 eval_segment(const std::array<Point2, 4>& p, const std::array<double, 4>& t, double at);

/// Matrix form of a uniform segment between p[1] and p[2], u in [0, 1].
Point2 eval_segment_uniform(const std::array<Point2, 4>& p, double u);

struct SegmentSupport {
    std::array<Point2, 4> points;
    /// Knots local to the segment, knots[0] == 0.
    std::array<double, 4> knots;
};

std::size_t segment_count(std::size_t n, Topology topology) noexcept;

SegmentSupport segment_support(std::span<const Point2> points, Topology topology,
                               const SplineConfig& cfg, std::size_t segment);

/// Samples of one segment: samples_per_segment points starting at its first
/// control point; the end point is appended when include_end is set.
std::vector<Point2> sample_segment(std::span<const Point2> points, Topology topology,
                                   const SplineConfig& cfg, std::size_t segment,
                                   bool include_end = false);

/// Polyline through every control point, segments * samples_per_segment + 1
/// samples. Closed curves repeat the first sample at the end.
std::vector<Point2> sample_curve(std::span<const Point2> points, Topology topology,
                                 const SplineConfig& cfg);
std::vector<Point2> sample_curve(const ControlShape& shape, const SplineConfig& cfg);

/// Inserts epsilon slaves at equal knot fractions in every master gap.
ControlShape expand_shape(const ControlShape& shape, int epsilon, const SplineConfig& cfg);

/// Segments whose four-point support contains point `index` (phantom points
/// included through the points they derive from).
std::vector<std::size_t> segments_affected_by(std::size_t n, Topology topology, std::size_t index);

} // namespace aspl
