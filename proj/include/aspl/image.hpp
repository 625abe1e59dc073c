#pragma once

// Grayscale images, edge maps, gradient vector flow and Gaussian pyramids.

#include <aspl/geometry.hpp>

#include <optional>
#include <span>
#include <vector>

namespace aspl {

/// Row-major real-valued grid. Intensities are expected in [0, 1].
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool same_dims(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    double& at(int x, int y) { return data_[index(x, y)]; }
    double at(int x, int y) const { return data_[index(x, y)]; }
    /// Replicate-padded access.
    double clamped(int x, int y) const;

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    const double* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
    double* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }

    double mean() const;
    double max_abs() const;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

using GrayImage = Image;
using EdgeMap = Image;

struct KernelSize {
    int w = 3;
    int h = 3;

    friend bool operator==(const KernelSize&, const KernelSize&) = default;
};

struct Gradient {
    Image gx;
    Image gy;
};

struct VectorField {
    Image u;
    Image v;
    double mu = 0.1;
    int iterations_run = 0;
    double final_residual = 0.0;
    double time_step = 0.0;
    /// Discrete energy before the first step and after each step.
    std::vector<double> energy;

    /// Bilinear sample; positions outside the grid use the nearest border cell.
    Point2 sample(Point2 p) const;
};

struct GvfOptions {
    double mu = 0.1;
    int max_iterations = 200;
    double tolerance = 1e-4;
};

/// Finest level first.
struct ImagePyramid {
    std::vector<Image> levels;
};

/// Median of a kw x kh window. The window starts ceil(k/2) - 1 cells before
/// the output pixel on each axis; even-sized windows average the two middle
/// values. Borders are replicate-padded.
Image median_filter(const Image& img, int kw, int kh);

/// Central differences inside, one-sided differences on the border.
Gradient gradient(const Image& img);

/// Gradient magnitude, optionally after median filtering.
EdgeMap edge_map(const Image& img, std::optional<KernelSize> median = std::nullopt);

/// Explicit step for the given regularization and largest squared edge-map gradient.
double gvf_time_step(double mu, double b_max);

/// Discrete energy: mu * sum of squared forward differences of (u, v) plus
/// |grad f|^2 * |(u, v) - grad f|^2 summed over pixels.
double gvf_energy(const Image& u, const Image& v, const Gradient& f, double mu);

VectorField gvf(const EdgeMap& fe, const GvfOptions& options = {});

/// One explicit update of an existing field; returns the largest change.
double gvf_iterate(VectorField& field, const Gradient& f, double dt);

/// Binomial [1 4 6 4 1]/16 smoothing followed by 2x decimation.
Image pyramid_reduce(const Image& img);

ImagePyramid build_pyramid(const Image& img, int levels);

/// p -> 1 - p.
Image invert(const Image& img);

} // namespace aspl
