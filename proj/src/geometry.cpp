#include <aspl/geometry.hpp>

namespace aspl {

FlatShape to_flat(std::span<const Point2> points) {
    FlatShape out(2 * static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        set_point(out, static_cast<Eigen::Index>(i), points[i]);
    }
    return out;
}

std::vector<Point2> to_points(const FlatShape& shape) {
    std::vector<Point2> out(static_cast<std::size_t>(point_count(shape)));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = point_at(shape, static_cast<Eigen::Index>(i));
    }
    return out;
}

} // namespace aspl
