#pragma once

// Hand-rolled generators and independent oracles shared by the unit tests and
// the acceptance binary. Nothing here calls into the library's numerics beyond
// the types it needs.

#include <aspl/geometry.hpp>
#include <aspl/image.hpp>
#include <aspl/raster.hpp>
#include <aspl/shape_space.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace aspl::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    double angle() { return uniform(-std::numbers::pi, std::numbers::pi); }
    Point2 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }

    /// Points with consecutive (and wrap-around) distances at least `min_gap`.
    std::vector<Point2> polygon(int n, double lo, double hi, double min_gap) {
        std::vector<Point2> pts;
        while (static_cast<int>(pts.size()) < n) {
            const Point2 p = point(lo, hi);
            if (!pts.empty() && distance(p, pts.back()) < min_gap) {
                continue;
            }
            if (static_cast<int>(pts.size()) == n - 1 && distance(p, pts.front()) < min_gap) {
                continue;
            }
            pts.push_back(p);
        }
        return pts;
    }

    /// Star-shaped closed polygon around `c`: sorted angles, radius jitter.
    std::vector<Point2> star(int n, Point2 c, double r_lo, double r_hi) {
        std::vector<double> angles;
        for (int i = 0; i < n; ++i) {
            angles.push_back((i + uniform(0.1, 0.9)) * 2.0 * std::numbers::pi / n);
        }
        std::vector<Point2> pts;
        for (double a : angles) {
            const double r = uniform(r_lo, r_hi);
            pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
        }
        return pts;
    }

    PoseParams pose(double s_lo, double s_hi, double tau) {
        PoseParams p;
        p.theta = angle();
        p.s = std::exp(uniform(std::log(s_lo), std::log(s_hi)));
        p.tau_x = uniform(-tau, tau);
        p.tau_y = uniform(-tau, tau);
        return p;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double wrap_angle(double a) {
    return std::remainder(a, 2.0 * std::numbers::pi);
}

/// Similarity applied point by point, written out from the definition.
inline FlatShape pose_oracle(const FlatShape& s, const PoseParams& p) {
    FlatShape out(s.size());
    const double c = std::cos(p.theta);
    const double sn = std::sin(p.theta);
    for (Eigen::Index i = 0; i < s.size() / 2; ++i) {
        const double x = s[2 * i];
        const double y = s[2 * i + 1];
        out[2 * i] = p.tau_x + p.s * (c * x - sn * y);
        out[2 * i + 1] = p.tau_y + p.s * (sn * x + c * y);
    }
    return out;
}

// ---- exact polyline self-intersection ------------------------------------

/// Sign of the orientation determinant computed exactly for doubles via
/// error-free product expansion; returns -1, 0 or 1.
inline int orient_exact(Point2 a, Point2 b, Point2 c) {
    // (b - a) x (c - a) evaluated in long double first; fall back to an exact
    // expansion when the result is too close to zero to trust its sign.
    const long double abx = static_cast<long double>(b.x) - a.x;
    const long double aby = static_cast<long double>(b.y) - a.y;
    const long double acx = static_cast<long double>(c.x) - a.x;
    const long double acy = static_cast<long double>(c.y) - a.y;
    const long double l = abx * acy;
    const long double r = aby * acx;
    const long double det = l - r;
    const long double bound = (std::fabs(l) + std::fabs(r)) * 1e-15L;
    if (det > bound) {
        return 1;
    }
    if (det < -bound) {
        return -1;
    }
    // Exact: each difference of doubles and each product is represented by a
    // two-term expansion (Dekker / fma), summed with Shewchuk's two-sum.
    auto two_diff = [](double x, double y, double& hi, double& lo) {
        hi = x - y;
        const double bv = x - hi;
        const double av = hi + bv;
        lo = (x - av) + (bv - y);
    };
    double p[2], q[2], s[2], t[2];
    two_diff(b.x, a.x, p[0], p[1]);
    two_diff(c.y, a.y, q[0], q[1]);
    two_diff(b.y, a.y, s[0], s[1]);
    two_diff(c.x, a.x, t[0], t[1]);
    std::vector<double> terms;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double hp = p[i] * q[j];
            terms.push_back(hp);
            terms.push_back(std::fma(p[i], q[j], -hp));
            const double hn = s[i] * t[j];
            terms.push_back(-hn);
            terms.push_back(-std::fma(s[i], t[j], -hn));
        }
    }
    // Grow an exact nonoverlapping expansion, then read the sign of its largest term.
    std::vector<double> e;
    for (double x : terms) {
        std::vector<double> next;
        double qv = x;
        for (double y : e) {
            const double sum = qv + y;
            const double bv = sum - qv;
            const double err = (qv - (sum - bv)) + (y - bv);
            if (err != 0.0) {
                next.push_back(err);
            }
            qv = sum;
        }
        if (qv != 0.0) {
            next.push_back(qv);
        }
        e = std::move(next);
    }
    if (e.empty()) {
        return 0;
    }
    return e.back() > 0.0 ? 1 : -1;
}

inline bool on_segment_box(Point2 a, Point2 b, Point2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

/// Closed-segment intersection test with exact predicates.
inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    const int o1 = orient_exact(a, b, c);
    const int o2 = orient_exact(a, b, d);
    const int o3 = orient_exact(c, d, a);
    const int o4 = orient_exact(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) {
        return true;
    }
    if (o1 == 0 && on_segment_box(a, b, c)) return true;
    if (o2 == 0 && on_segment_box(a, b, d)) return true;
    if (o3 == 0 && on_segment_box(c, d, a)) return true;
    if (o4 == 0 && on_segment_box(c, d, b)) return true;
    return false;
}

/// True when an open polyline crosses or touches itself anywhere other than
/// at the shared vertex of adjacent edges.
inline bool polyline_self_intersects(const std::vector<Point2>& pts) {
    const std::size_t n = pts.size();
    if (n < 4) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 2; j + 1 < n; ++j) {
            if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1])) {
                return true;
            }
        }
    }
    return false;
}

// ---- Catmull-Rom oracles --------------------------------------------------

/// Uniform Catmull-Rom written from its cubic Hermite form with tangents
/// (p2 - p0)/2 and (p3 - p1)/2.
inline Point2 hermite_catmull_rom(const std::array<Point2, 4>& p, double u) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    const Point2 m1 = 0.5 * (p[2] - p[0]);
    const Point2 m2 = 0.5 * (p[3] - p[1]);
    return h00 * p[1] + h10 * m1 + h01 * p[2] + h11 * m2;
}

// ---- PCA oracle -----------------------------------------------------------

using LMatrix = std::vector<std::vector<long double>>;

/// Covariance with 1/r normalization in long double.
inline LMatrix covariance_oracle(const std::vector<FlatShape>& shapes) {
    const std::size_t d = static_cast<std::size_t>(shapes.front().size());
    const long double r = static_cast<long double>(shapes.size());
    std::vector<long double> mean(d, 0.0L);
    for (const auto& s : shapes) {
        for (std::size_t i = 0; i < d; ++i) {
            mean[i] += s[static_cast<Eigen::Index>(i)];
        }
    }
    for (auto& m : mean) {
        m /= r;
    }
    LMatrix c(d, std::vector<long double>(d, 0.0L));
    for (const auto& s : shapes) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                c[i][j] += (s[static_cast<Eigen::Index>(i)] - mean[i]) * (s[static_cast<Eigen::Index>(j)] - mean[j]);
            }
        }
    }
    for (auto& row : c) {
        for (auto& v : row) {
            v /= r;
        }
    }
    return c;
}

/// Characteristic polynomial det(xI - A) by Faddeev-LeVerrier; coefficient k
/// multiplies x^(n-k), with coefficient 0 equal to 1.
inline std::vector<long double> characteristic_polynomial(const LMatrix& a) {
    const std::size_t n = a.size();
    std::vector<long double> c(n + 1, 0.0L);
    c[0] = 1.0L;
    LMatrix m(n, std::vector<long double>(n, 0.0L));
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k) / k
        LMatrix next(n, std::vector<long double>(n, 0.0L));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                long double acc = 0.0L;
                for (std::size_t l = 0; l < n; ++l) {
                    acc += a[i][l] * m[l][j];
                }
                next[i][j] = acc + (i == j ? c[k - 1] : 0.0L);
            }
        }
        m = std::move(next);
        long double tr = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t l = 0; l < n; ++l) {
                tr += a[i][l] * m[l][i];
            }
        }
        c[k] = -tr / static_cast<long double>(k);
    }
    return c;
}

inline long double poly_eval(const std::vector<long double>& c, long double x) {
    long double acc = 0.0L;
    for (long double v : c) {
        acc = acc * x + v;
    }
    return acc;
}

/// Positive roots of a polynomial with `zeros` known roots at the origin,
/// found by sign-change scan on a log grid and bisection. Descending order.
inline std::vector<long double> positive_roots(std::vector<long double> c, std::size_t zeros, long double hi) {
    c.resize(c.size() - zeros);  // divide by x^zeros
    const std::size_t degree = c.size() - 1;
    std::vector<long double> roots;
    const int steps = 40000;
    const long double lo = hi * 1e-11L;
    long double prev_x = lo;
    long double prev_v = poly_eval(c, prev_x);
    for (int i = 1; i <= steps && roots.size() < degree; ++i) {
        const long double x = lo * std::pow(hi / lo, static_cast<long double>(i) / steps);
        const long double v = poly_eval(c, x);
        if ((prev_v < 0) != (v < 0)) {
            long double a = prev_x;
            long double b = x;
            long double fa = prev_v;
            for (int it = 0; it < 200; ++it) {
                const long double mid = 0.5L * (a + b);
                const long double fm = poly_eval(c, mid);
                if ((fa < 0) == (fm < 0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5L * (a + b));
        }
        prev_x = x;
        prev_v = v;
    }
    std::sort(roots.begin(), roots.end(), std::greater<>());
    return roots;
}

/// Sylvester-Hadamard matrix of order 2^k with entries +-1.
inline std::vector<std::vector<int>> hadamard(int order) {
    std::vector<std::vector<int>> h{{1}};
    while (static_cast<int>(h.size()) < order) {
        const std::size_t n = h.size();
        std::vector<std::vector<int>> next(2 * n, std::vector<int>(2 * n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                next[i][j] = h[i][j];
                next[i][j + n] = h[i][j];
                next[i + n][j] = h[i][j];
                next[i + n][j + n] = -h[i][j];
            }
        }
        h = std::move(next);
    }
    return h;
}

// ---- images ---------------------------------------------------------------

/// Bright filled disc plus a deterministic ripple, no noise.
inline Image disc_image(int w, int h, Point2 c, double r, double inside = 0.85, double outside = 0.15) {
    Image img(w, h, outside);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (distance({static_cast<double>(x), static_cast<double>(y)}, c) <= r) {
                img.at(x, y) = inside;
            }
        }
    }
    return img;
}

/// Brute-force mask counts.
struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
};

inline Counts count_masks(const BinaryMask& pred, const BinaryMask& truth) {
    Counts c;
    for (int y = 0; y < truth.height(); ++y) {
        for (int x = 0; x < truth.width(); ++x) {
            const bool p = pred.at(x, y);
            const bool t = truth.at(x, y);
            c.tp += p && t;
            c.fp += p && !t;
            c.fn += !p && t;
        }
    }
    return c;
}

} // namespace aspl::testing
