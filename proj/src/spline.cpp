#include <aspl/spline.hpp>

#include <aspl/error.hpp>

#include <cmath>
#include <set>
#include <string>

namespace aspl {

namespace {

double knot_step(Point2 a, Point2 b, double alpha) {
    if (alpha == 0.0) {
        return 1.0;
    }
    const double d = distance(a, b);
    if (d == 0.0) {
        throw Error(ErrorCode::DuplicateConsecutivePoints,
                    "consecutive control points coincide; knot would not advance");
    }
    if (alpha == 0.5) {
        return std::sqrt(d);
    }
    if (alpha == 1.0) {
        return d;
    }
    return std::pow(d, alpha);
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    }
}

} // namespace

void SplineConfig::validate() const {
    check_alpha(alpha);
    if (!(rho > 0.0 && rho <= 0.5)) {
        throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 0.5]");
    }
    if (samples_per_segment < 1) {
        throw Error(ErrorCode::InvalidArgument, "samples_per_segment must be positive");
    }
}

std::size_t minimum_points(Topology topology) noexcept {
    return topology == Topology::Open ? 2 : 3;
}

ControlShape::ControlShape(std::vector<Point2> points, Topology topology)
    : points_(std::move(points)), roles_(points_.size(), PointRole::Master), topology_(topology) {
    validate();
}

ControlShape::ControlShape(std::vector<Point2> points, std::vector<PointRole> roles,
                           Topology topology)
    : points_(std::move(points)), roles_(std::move(roles)), topology_(topology) {
    validate();
}

void ControlShape::validate() {
    if (roles_.size() != points_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one role per point required");
    }
    for (const auto& p : points_) {
        if (!p.finite()) {
            throw Error(ErrorCode::InvalidArgument, "control points must be finite");
        }
    }
    const std::size_t n = points_.size();
    const std::size_t gaps = topology_ == Topology::Closed ? n : (n == 0 ? 0 : n - 1);
    for (std::size_t i = 0; i < gaps; ++i) {
        if (points_[i] == points_[(i + 1) % n]) {
            throw Error(ErrorCode::DuplicateConsecutivePoints,
                        "points " + std::to_string(i) + " and " + std::to_string((i + 1) % n) +
                            " coincide");
        }
    }

    const auto masters = master_indices();
    if (masters.size() < minimum_points(topology_)) {
        throw Error(ErrorCode::InvalidArgument, "too few master points for the topology");
    }
    if (masters.front() != 0) {
        throw Error(ErrorCode::InvalidArgument, "a shape must start on a master point");
    }
    if (topology_ == Topology::Open && masters.back() != n - 1) {
        throw Error(ErrorCode::InvalidArgument, "an open shape must end on a master point");
    }
    const std::size_t span = topology_ == Topology::Closed ? n : n - 1;
    const std::size_t master_gaps = topology_ == Topology::Closed ? masters.size()
                                                                  : masters.size() - 1;
    if (span % master_gaps != 0) {
        throw Error(ErrorCode::InvalidArgument, "slave count between masters is not uniform");
    }
    const std::size_t stride = span / master_gaps;
    for (std::size_t k = 0; k < masters.size(); ++k) {
        if (masters[k] != k * stride) {
            throw Error(ErrorCode::InvalidArgument, "slave count between masters is not uniform");
        }
    }
    slaves_per_gap_ = static_cast<int>(stride) - 1;
}

std::vector<std::size_t> ControlShape::master_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < roles_.size(); ++i) {
        if (roles_[i] == PointRole::Master) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<Point2> ControlShape::masters() const {
    std::vector<Point2> out;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (roles_[i] == PointRole::Master) {
            out.push_back(points_[i]);
        }
    }
    return out;
}

KnotSequence knot_sequence(std::span<const Point2> points, double alpha) {
    check_alpha(alpha);
    if (points.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "knot sequence needs at least two points");
    }
    KnotSequence out;
    out.alpha = alpha;
    out.knots.resize(points.size());
    out.knots[0] = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        out.knots[i] = out.knots[i - 1] + knot_step(points[i - 1], points[i], alpha);
    }
    return out;
}

std::vector<Point2> extend_endpoints(std::span<const Point2> points, double rho,
                                     bool literal_trailing) {
    const std::size_t m = points.size();
    if (m < 2) {
        throw Error(ErrorCode::InvalidArgument, "endpoint extension needs at least two points");
    }
    std::vector<Point2> out;
    out.reserve(m + 2);
    out.push_back(points[0] - rho * (points[1] - points[0]));
    out.insert(out.end(), points.begin(), points.end());
    const Point2 last = points[m - 1];
    const Point2 prev = points[m - 2];
    out.push_back(literal_trailing ? last - rho * (last - prev) : last + rho * (last - prev));
    return out;
}

std::vector<Point2> extend_endpoints(const ControlShape& shape, double rho, bool literal_trailing) {
    if (shape.topology() == Topology::Closed) {
        throw Error(ErrorCode::TopologyError, "closed shapes wrap periodically, no endpoint phantoms");
    }
    return extend_endpoints(std::span<const Point2>(shape.points()), rho, literal_trailing);
}

Point2 eval_segment(const std::array<Point2, 4>& p, const std::array<double, 4>& t, double at) {
    const auto [t0, t1, t2, t3] = t;
    if (!(at >= t1 && at <= t2)) {
        throw Error(ErrorCode::ParameterOutOfRange, "segment parameter outside [t1, t2]");
    }
    if (at == t1) {
        return p[1];
    }
    if (at == t2) {
        return p[2];
    }
    const Point2 l01 = ((t1 - at) * p[0] + (at - t0) * p[1]) * (1.0 / (t1 - t0));
    const Point2 l12 = ((t2 - at) * p[1] + (at - t1) * p[2]) * (1.0 / (t2 - t1));
    const Point2 l23 = ((t3 - at) * p[2] + (at - t2) * p[3]) * (1.0 / (t3 - t2));
    const Point2 l012 = ((t2 - at) * l01 + (at - t0) * l12) * (1.0 / (t2 - t0));
    const Point2 l123 = ((t3 - at) * l12 + (at - t1) * l23) * (1.0 / (t3 - t1));
    return ((t2 - at) * l012 + (at - t1) * l123) * (1.0 / (t2 - t1));
}

Point2 eval_segment_uniform(const std::array<Point2, 4>& p, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw Error(ErrorCode::ParameterOutOfRange, "uniform parameter outside [0, 1]");
    }
    static constexpr double basis[4][4] = {
        {-1, 3, -3, 1},
        {2, -5, 4, -1},
        {-1, 0, 1, 0},
        {0, 2, 0, 0},
    };
    const double powers[4] = {u * u * u, u * u, u, 1.0};
    Point2 out;
    for (int col = 0; col < 4; ++col) {
        double w = 0.0;
        for (int row = 0; row < 4; ++row) {
            w += powers[row] * basis[row][col];
        }
        out = out + 0.5 * w * p[col];
    }
    return out;
}

std::size_t segment_count(std::size_t n, Topology topology) noexcept {
    if (topology == Topology::Closed) {
        return n;
    }
    return n < 2 ? 0 : n - 1;
}

SegmentSupport segment_support(std::span<const Point2> points, Topology topology,
                               const SplineConfig& cfg, std::size_t segment) {
    const std::size_t n = points.size();
    if (n < minimum_points(topology)) {
        throw Error(ErrorCode::InvalidArgument, "too few control points for the topology");
    }
    if (segment >= segment_count(n, topology)) {
        throw Error(ErrorCode::ParameterOutOfRange, "segment index out of range");
    }
    SegmentSupport out;
    if (topology == Topology::Closed) {
        for (std::size_t k = 0; k < 4; ++k) {
            out.points[k] = points[(segment + n + k - 1) % n];
        }
    } else {
        // Phantom points only touch the first and last segment.
        const auto at = [&](std::ptrdiff_t i) -> Point2 {
            if (i < 0) {
                return points[0] - cfg.rho * (points[1] - points[0]);
            }
            if (i >= static_cast<std::ptrdiff_t>(n)) {
                const Point2 last = points[n - 1];
                const Point2 prev = points[n - 2];
                return cfg.literal_trailing_phantom ? last - cfg.rho * (last - prev)
                                                    : last + cfg.rho * (last - prev);
            }
            return points[static_cast<std::size_t>(i)];
        };
        for (std::size_t k = 0; k < 4; ++k) {
            out.points[k] = at(static_cast<std::ptrdiff_t>(segment + k) - 1);
        }
    }
    out.knots[0] = 0.0;
    for (std::size_t k = 1; k < 4; ++k) {
        out.knots[k] = out.knots[k - 1] + knot_step(out.points[k - 1], out.points[k], cfg.alpha);
    }
    return out;
}

std::vector<Point2> sample_segment(std::span<const Point2> points, Topology topology,
                                   const SplineConfig& cfg, std::size_t segment,
                                   bool include_end) {
    const SegmentSupport sup = segment_support(points, topology, cfg, segment);
    const int count = cfg.samples_per_segment;
    const double t1 = sup.knots[1];
    const double t2 = sup.knots[2];
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(count) + 1);
    for (int k = 0; k < count; ++k) {
        out.push_back(eval_segment(sup.points, sup.knots, t1 + (t2 - t1) * k / count));
    }
    if (include_end) {
        out.push_back(eval_segment(sup.points, sup.knots, t2));
    }
    return out;
}

std::vector<Point2> sample_curve(std::span<const Point2> points, Topology topology,
                                 const SplineConfig& cfg) {
    cfg.validate();
    const std::size_t segments = segment_count(points.size(), topology);
    std::vector<Point2> out;
    out.reserve(segments * static_cast<std::size_t>(cfg.samples_per_segment) + 1);
    for (std::size_t s = 0; s < segments; ++s) {
        const auto seg = sample_segment(points, topology, cfg, s);
        out.insert(out.end(), seg.begin(), seg.end());
    }
    out.push_back(topology == Topology::Closed ? points[0] : points[points.size() - 1]);
    return out;
}

std::vector<Point2> sample_curve(const ControlShape& shape, const SplineConfig& cfg) {
    return sample_curve(std::span<const Point2>(shape.points()), shape.topology(), cfg);
}

ControlShape expand_shape(const ControlShape& shape, int epsilon, const SplineConfig& cfg) {
    cfg.validate();
    if (epsilon < 0) {
        throw Error(ErrorCode::InvalidArgument, "slave count must be nonnegative");
    }
    if (shape.slaves_per_gap() != 0) {
        throw Error(ErrorCode::InvalidArgument, "shape is already expanded");
    }
    if (epsilon == 0) {
        return shape;
    }
    const auto& pts = shape.points();
    const std::size_t segments = segment_count(pts.size(), shape.topology());
    std::vector<Point2> out;
    std::vector<PointRole> roles;
    for (std::size_t s = 0; s < segments; ++s) {
        out.push_back(pts[s]);
        roles.push_back(PointRole::Master);
        const SegmentSupport sup = segment_support(pts, shape.topology(), cfg, s);
        const double t1 = sup.knots[1];
        const double t2 = sup.knots[2];
        for (int k = 1; k <= epsilon; ++k) {
            out.push_back(eval_segment(sup.points, sup.knots, t1 + (t2 - t1) * k / (epsilon + 1)));
            roles.push_back(PointRole::Slave);
        }
    }
    if (shape.topology() == Topology::Open) {
        out.push_back(pts.back());
        roles.push_back(PointRole::Master);
    }
    return ControlShape(std::move(out), std::move(roles), shape.topology());
}

std::vector<std::size_t> segments_affected_by(std::size_t n, Topology topology, std::size_t index) {
    if (index >= n) {
        throw Error(ErrorCode::ParameterOutOfRange, "point index out of range");
    }
    std::set<std::size_t> out;
    const auto segments = static_cast<std::ptrdiff_t>(segment_count(n, topology));
    const auto j = static_cast<std::ptrdiff_t>(index);
    for (std::ptrdiff_t s = j - 2; s <= j + 1; ++s) {
        if (topology == Topology::Closed) {
            out.insert(static_cast<std::size_t>(((s % segments) + segments) % segments));
        } else if (s >= 0 && s < segments) {
            out.insert(static_cast<std::size_t>(s));
        }
    }
    return {out.begin(), out.end()};
}

} // namespace aspl
