#include <aspl/raster.hpp>

#include <aspl/error.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aspl {

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), 0) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::InvalidArgument, "mask dimensions must be positive");
    }
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

// Shared by both fills so the crossing abscissa is computed identically.
inline bool crosses(Point2 a, Point2 b, double y) { return (a.y <= y) != (b.y <= y); }
inline double crossing_x(Point2 a, Point2 b, double y) {
    return a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
}

} // namespace

namespace kernels {

void fill_rings(std::span<const Ring> rings, BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
#pragma omp parallel
    {
        std::vector<double> xs;
#pragma omp for schedule(static)
        for (int y = 0; y < h; ++y) {
            const double fy = y;
            xs.clear();
            for (const Ring& ring : rings) {
                const std::size_t n = ring.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const Point2 a = ring[i];
                    const Point2 b = ring[(i + 1) % n];
                    if (crosses(a, b, fy)) {
                        xs.push_back(crossing_x(a, b, fy));
                    }
                }
            }
            std::sort(xs.begin(), xs.end());
            for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
                // Centers px with xs[k] <= px < xs[k+1].
                const double lo = std::ceil(xs[k]);
                const double hi = std::ceil(xs[k + 1]) - 1.0;
                const int x0 = static_cast<int>(std::max(lo, 0.0));
                const int x1 = static_cast<int>(std::min(hi, static_cast<double>(w - 1)));
                for (int x = x0; x <= x1; ++x) {
                    mask.set(x, y, true);
                }
            }
        }
    }
}

} // namespace kernels

namespace reference {

void fill_rings(std::span<const Ring> rings, BinaryMask& mask) {
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const double fx = x;
            const double fy = y;
            bool inside = false;
            for (const Ring& ring : rings) {
                const std::size_t n = ring.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const Point2 a = ring[i];
                    const Point2 b = ring[(i + 1) % n];
                    if (crosses(a, b, fy) && crossing_x(a, b, fy) <= fx) {
                        inside = !inside;
                    }
                }
            }
            mask.set(x, y, inside);
        }
    }
}

} // namespace reference

BinaryMask rasterize_rings(std::span<const Ring> rings, int width, int height) {
    BinaryMask mask(width, height);
    kernels::fill_rings(rings, mask);
    return mask;
}

namespace {

Ring curve_ring(std::span<const Point2> points, const SplineConfig& cfg) {
    Ring ring = sample_curve(points, Topology::Closed, cfg);
    ring.pop_back(); // repeated start sample
    return ring;
}

} // namespace

BinaryMask rasterize(const ControlShape& shape, const SplineConfig& cfg, int width, int height) {
    if (shape.topology() != Topology::Closed) {
        throw Error(ErrorCode::OpenContour, "only closed contours can be rasterized");
    }
    const std::vector<Ring> rings{curve_ring(shape.points(), cfg)};
    return rasterize_rings(rings, width, height);
}

BinaryMask rasterize(const FlatShape& shape, std::span<const int> part_sizes, Topology topology,
                     const SplineConfig& cfg, int width, int height) {
    if (topology != Topology::Closed) {
        throw Error(ErrorCode::OpenContour, "only closed contours can be rasterized");
    }
    const long total = std::accumulate(part_sizes.begin(), part_sizes.end(), 0L);
    if (total != point_count(shape)) {
        throw Error(ErrorCode::DimensionMismatch, "part sizes do not cover the shape");
    }
    const std::vector<Point2> all = to_points(shape);
    std::vector<Ring> rings;
    std::size_t offset = 0;
    for (int n : part_sizes) {
        const std::span<const Point2> part(all.data() + offset, static_cast<std::size_t>(n));
        // Validates distinctness and minimum size through ControlShape.
        const ControlShape cs(std::vector<Point2>(part.begin(), part.end()), Topology::Closed);
        rings.push_back(curve_ring(cs.points(), cfg));
        offset += static_cast<std::size_t>(n);
    }
    return rasterize_rings(rings, width, height);
}

} // namespace aspl
