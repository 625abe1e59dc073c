#include <aspl/shape_space.hpp>

#include <aspl/error.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aspl {

double PoseParams::a_x() const { return s * std::cos(theta); }
double PoseParams::a_y() const { return s * std::sin(theta); }

Normalized normalize(const FlatShape& shape) {
    const Eigen::Index m = point_count(shape);
    if (m < 2 || shape.size() != 2 * m) {
        throw Error(ErrorCode::InvalidArgument, "normalization needs at least two points");
    }
    double cx = 0.0;
    double cy = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        cx += shape[2 * i];
        cy += shape[2 * i + 1];
    }
    cx /= static_cast<double>(m);
    cy /= static_cast<double>(m);
    double eta = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        eta = std::max({eta, std::abs(shape[2 * i] - cx), std::abs(shape[2 * i + 1] - cy)});
    }
    if (eta == 0.0) {
        throw Error(ErrorCode::DegenerateShape, "all points coincide");
    }
    Normalized out;
    out.centroid = {cx, cy};
    out.eta = eta;
    out.shape.resize(shape.size());
    for (Eigen::Index i = 0; i < m; ++i) {
        out.shape[2 * i] = (shape[2 * i] - cx) / eta;
        out.shape[2 * i + 1] = (shape[2 * i + 1] - cy) / eta;
    }
    return out;
}

FlatShape transform(const FlatShape& shape, const PoseParams& pose) {
    const double c = pose.s * std::cos(pose.theta);
    const double s = pose.s * std::sin(pose.theta);
    FlatShape out(shape.size());
    for (Eigen::Index i = 0; i < point_count(shape); ++i) {
        const double x = shape[2 * i];
        const double y = shape[2 * i + 1];
        out[2 * i] = pose.tau_x + x * c - y * s;
        out[2 * i + 1] = pose.tau_y + x * s + y * c;
    }
    return out;
}

FlatShape transform_linear(const FlatShape& shape, double theta, double s) {
    return transform(shape, PoseParams{theta, s, 0.0, 0.0});
}

PointWeights uniform_weights(Eigen::Index m) {
    return PointWeights::Constant(m, 1.0 / static_cast<double>(m));
}

PoseParams align_pair(const FlatShape& target, const FlatShape& source,
                      const PointWeights& weights) {
    const Eigen::Index m = point_count(source);
    if (target.size() != source.size() || weights.size() != m) {
        throw Error(ErrorCode::DimensionMismatch, "alignment inputs differ in point count");
    }
    double chi = 0, gamma = 0, chi_t = 0, gamma_t = 0, z = 0, w = 0, c1 = 0, c2 = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double wi = weights[i];
        const double x = source[2 * i];
        const double y = source[2 * i + 1];
        const double xt = target[2 * i];
        const double yt = target[2 * i + 1];
        chi += wi * x;
        gamma += wi * y;
        chi_t += wi * xt;
        gamma_t += wi * yt;
        z += wi * (x * x + y * y);
        w += wi;
        c1 += wi * (xt * x + yt * y);
        c2 += wi * (yt * x - xt * y);
    }
    Eigen::Matrix4d a;
    a << chi, -gamma, w, 0,
         gamma, chi, 0, w,
         z, 0, chi, gamma,
         0, z, -gamma, chi;
    const Eigen::Vector4d rhs(chi_t, gamma_t, c1, c2);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(a);
    if (lu.rank() < 4) {
        throw Error(ErrorCode::SingularSystem, "pose system is rank-deficient");
    }
    const Eigen::Vector4d sol = lu.solve(rhs);
    PoseParams pose;
    pose.theta = std::atan2(sol[1], sol[0]);
    pose.s = std::hypot(sol[0], sol[1]);
    pose.tau_x = sol[2];
    pose.tau_y = sol[3];
    if (!(pose.s > 0.0) || !std::isfinite(pose.s)) {
        throw Error(ErrorCode::SingularSystem, "recovered scale is not positive");
    }
    return pose;
}

PointWeights point_weights(std::span<const FlatShape> shapes) {
    if (shapes.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "point weights need at least two shapes");
    }
    const Eigen::Index m = point_count(shapes[0]);
    for (const auto& s : shapes) {
        if (s.size() != 2 * m) {
            throw Error(ErrorCode::DimensionMismatch, "shapes differ in point count");
        }
    }
    const double r = static_cast<double>(shapes.size());
    PointWeights omega(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double variance_sum = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == i) {
                continue;
            }
            double mean = 0.0;
            for (const auto& s : shapes) {
                mean += distance(point_at(s, i), point_at(s, j));
            }
            mean /= r;
            double var = 0.0;
            for (const auto& s : shapes) {
                const double d = distance(point_at(s, i), point_at(s, j)) - mean;
                var += d * d;
            }
            variance_sum += var / r;
        }
        if (variance_sum == 0.0) {
            return uniform_weights(m);
        }
        omega[i] = 1.0 / variance_sum;
    }
    return omega / omega.sum();
}

double weighted_residual(const FlatShape& target, const FlatShape& source,
                         const PointWeights& weights) {
    double out = 0.0;
    for (Eigen::Index i = 0; i < point_count(source); ++i) {
        const double dx = target[2 * i] - source[2 * i];
        const double dy = target[2 * i + 1] - source[2 * i + 1];
        out += weights[i] * (dx * dx + dy * dy);
    }
    return out;
}

namespace {

void align_all(std::span<const FlatShape> shapes, const FlatShape& target,
               const PointWeights& weights, std::vector<FlatShape>& out) {
    const auto n = static_cast<std::ptrdiff_t>(shapes.size());
    // Each slot is written by exactly one iteration; order does not matter.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        out[idx] = transform(shapes[idx], align_pair(target, shapes[idx], weights));
    }
}

FlatShape mean_of(const std::vector<FlatShape>& shapes) {
    FlatShape mean = FlatShape::Zero(shapes[0].size());
    for (const auto& s : shapes) {
        mean += s;
    }
    return mean / static_cast<double>(shapes.size());
}

} // namespace

AlignedSet align_set(std::span<const FlatShape> shapes, const AlignOptions& options) {
    if (shapes.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "alignment needs at least two shapes");
    }
    if (options.basis >= shapes.size()) {
        throw Error(ErrorCode::InvalidArgument, "basis index out of range");
    }
    if (options.max_iterations < 1 || !(options.tolerance > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "alignment needs a positive tolerance and iteration cap");
    }
    AlignedSet out;
    out.weights = point_weights(shapes);
    out.aligned.resize(shapes.size());

    FlatShape previous = normalize(shapes[options.basis]).shape;
    align_all(shapes, previous, out.weights, out.aligned);

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        FlatShape mean = normalize(mean_of(out.aligned)).shape;
        align_all(shapes, mean, out.weights, out.aligned);
        const double delta = (mean - previous).cwiseAbs().maxCoeff();
        out.deltas.push_back(delta);
        out.iterations = iter;
        previous = std::move(mean);
        if (delta < options.tolerance) {
            out.mean = std::move(previous);
            return out;
        }
    }
    std::ostringstream msg;
    msg << "alignment did not converge in " << options.max_iterations
        << " iterations, last delta " << out.deltas.back();
    throw Error(ErrorCode::NonConvergence, msg.str());
}

} // namespace aspl
