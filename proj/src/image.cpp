#include <aspl/image.hpp>

#include <aspl/error.hpp>
#include <aspl/kernels.hpp>

#include <algorithm>
#include <cmath>

namespace aspl {

Image::Image(int width, int height, double fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)),
            fill) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
}

double Image::clamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return data_[index(x, y)];
}

double Image::mean() const {
    double sum = 0.0;
    for (double v : data_) {
        sum += v;
    }
    return data_.empty() ? 0.0 : sum / static_cast<double>(data_.size());
}

double Image::max_abs() const {
    double out = 0.0;
    for (double v : data_) {
        out = std::max(out, std::abs(v));
    }
    return out;
}

Point2 VectorField::sample(Point2 p) const {
    const int w = u.width();
    const int h = u.height();
    const double x = std::clamp(p.x, 0.0, static_cast<double>(w - 1));
    const double y = std::clamp(p.y, 0.0, static_cast<double>(h - 1));
    const int x0 = std::min(static_cast<int>(std::floor(x)), w - 1);
    const int y0 = std::min(static_cast<int>(std::floor(y)), h - 1);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const auto lerp2 = [&](const Image& g) {
        const double top = g.at(x0, y0) * (1.0 - fx) + g.at(x1, y0) * fx;
        const double bottom = g.at(x0, y1) * (1.0 - fx) + g.at(x1, y1) * fx;
        return top * (1.0 - fy) + bottom * fy;
    };
    return {lerp2(u), lerp2(v)};
}

Image median_filter(const Image& img, int kw, int kh) {
    if (kw < 1 || kh < 1) {
        throw Error(ErrorCode::InvalidArgument, "kernel dimensions must be positive");
    }
    if (kw > img.width() || kh > img.height()) {
        throw Error(ErrorCode::KernelTooLarge, "median kernel exceeds image dimensions");
    }
    Image out;
    kernels::median_filter(img, kw, kh, out);
    return out;
}

Gradient gradient(const Image& img) {
    Gradient g;
    kernels::gradient(img, g.gx, g.gy);
    return g;
}

EdgeMap edge_map(const Image& img, std::optional<KernelSize> median) {
    const Image filtered = median ? median_filter(img, median->w, median->h) : img;
    const Gradient g = gradient(filtered);
    EdgeMap out(img.width(), img.height());
    auto dst = out.data();
    const auto gx = g.gx.data();
    const auto gy = g.gy.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = std::hypot(gx[i], gy[i]);
    }
    return out;
}

double gvf_time_step(double mu, double b_max) {
    return 1.0 / (4.0 * mu + std::max(1.0, b_max));
}

namespace {

Image squared_magnitude(const Gradient& f) {
    Image b(f.gx.width(), f.gx.height());
    auto dst = b.data();
    const auto gx = f.gx.data();
    const auto gy = f.gy.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = gx[i] * gx[i] + gy[i] * gy[i];
    }
    return b;
}

} // namespace

double gvf_energy(const Image& u, const Image& v, const Gradient& f, double mu) {
    return kernels::gvf_energy(u, v, f.gx, f.gy, squared_magnitude(f), mu);
}

double gvf_iterate(VectorField& field, const Gradient& f, double dt) {
    const Image b = squared_magnitude(f);
    Image un;
    Image vn;
    const double change = kernels::gvf_step(field.u, field.v, f.gx, f.gy, b, field.mu, dt, un, vn);
    field.u = std::move(un);
    field.v = std::move(vn);
    return change;
}

VectorField gvf(const EdgeMap& fe, const GvfOptions& options) {
    if (!(options.mu > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "GVF regularization must be positive");
    }
    if (options.max_iterations < 0) {
        throw Error(ErrorCode::InvalidArgument, "GVF iteration count must be nonnegative");
    }
    const Gradient f = gradient(fe);
    const Image b = squared_magnitude(f);
    const double dt = gvf_time_step(options.mu, b.max_abs());

    VectorField field;
    field.mu = options.mu;
    field.time_step = dt;
    field.u = f.gx;
    field.v = f.gy;
    field.energy.push_back(kernels::gvf_energy(field.u, field.v, f.gx, f.gy, b, options.mu));

    Image un;
    Image vn;
    int rises = 0;
    for (int it = 0; it < options.max_iterations; ++it) {
        const double change =
            kernels::gvf_step(field.u, field.v, f.gx, f.gy, b, options.mu, dt, un, vn);
        std::swap(field.u, un);
        std::swap(field.v, vn);
        field.iterations_run = it + 1;
        field.final_residual = change;
        const double e = kernels::gvf_energy(field.u, field.v, f.gx, f.gy, b, options.mu);
        const double prev = field.energy.back();
        field.energy.push_back(e);
        rises = e > prev + 1e-12 * std::max(1.0, std::abs(prev)) ? rises + 1 : 0;
        if (rises >= 2) {
            throw Error(ErrorCode::Divergence, "GVF energy increased on two consecutive iterations");
        }
        if (change < options.tolerance) {
            break;
        }
    }
    return field;
}

Image pyramid_reduce(const Image& img) {
    Image out;
    kernels::reduce(img, out);
    return out;
}

ImagePyramid build_pyramid(const Image& img, int levels) {
    if (levels < 1) {
        throw Error(ErrorCode::InvalidArgument, "pyramid needs at least one level");
    }
    int w = img.width();
    int h = img.height();
    for (int l = 1; l < levels; ++l) {
        w /= 2;
        h /= 2;
    }
    if (w < 4 || h < 4) {
        throw Error(ErrorCode::TooManyLevels, "coarsest pyramid level would be smaller than 4x4");
    }
    ImagePyramid out;
    out.levels.push_back(img);
    for (int l = 1; l < levels; ++l) {
        out.levels.push_back(pyramid_reduce(out.levels.back()));
    }
    return out;
}

Image invert(const Image& img) {
    Image out = img;
    for (double& v : out.data()) {
        v = 1.0 - v;
    }
    return out;
}

} // namespace aspl
