#pragma once

// Even-odd scanline fill of closed spline contours. Pixel centers sit at
// integer coordinates; a center lies inside when an odd number of edge
// crossings fall at or left of it on its scanline.

#include <aspl/geometry.hpp>
#include <aspl/spline.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace aspl {

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool same_dims(const BinaryMask& o) const noexcept {
        return width_ == o.width_ && height_ == o.height_;
    }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool on) { bits_[index(x, y)] = on ? 1 : 0; }
    std::span<std::uint8_t> bits() noexcept { return bits_; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::size_t count() const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// A closed polyline; the closing edge from back() to front() is implied.
using Ring = std::vector<Point2>;

namespace kernels {
/// Row-parallel scanline fill.
void fill_rings(std::span<const Ring> rings, BinaryMask& mask);
} // namespace kernels

namespace reference {
/// Per-pixel crossing-number test with the same half-open rule.
void fill_rings(std::span<const Ring> rings, BinaryMask& mask);
} // namespace reference

BinaryMask rasterize_rings(std::span<const Ring> rings, int width, int height);

/// Densely samples a closed shape and fills it.
BinaryMask rasterize(const ControlShape& shape, const SplineConfig& cfg, int width, int height);

/// Multi-part variant: `part_sizes` splits the flat shape into consecutive
/// closed contours, filled together under the even-odd rule.
BinaryMask rasterize(const FlatShape& shape, std::span<const int> part_sizes, Topology topology,
                     const SplineConfig& cfg, int width, int height);

} // namespace aspl
