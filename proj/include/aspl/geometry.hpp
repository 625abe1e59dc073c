#pragma once

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <vector>

namespace aspl {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double k, Point2 p) { return {k * p.x, k * p.y}; }
    friend constexpr Point2 operator*(Point2 p, double k) { return {k * p.x, k * p.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;

    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

/// Flat shape vector [x1 y1 x2 y2 ... xm ym].
using FlatShape = Eigen::VectorXd;

inline Eigen::Index point_count(const FlatShape& s) { return s.size() / 2; }
inline Point2 point_at(const FlatShape& s, Eigen::Index i) { return {s[2 * i], s[2 * i + 1]}; }
inline void set_point(FlatShape& s, Eigen::Index i, Point2 p) {
    s[2 * i] = p.x;
    s[2 * i + 1] = p.y;
}

FlatShape to_flat(std::span<const Point2> points);
std::vector<Point2> to_points(const FlatShape& shape);

} // namespace aspl
