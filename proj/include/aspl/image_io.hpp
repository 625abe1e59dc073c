#pragma once

// Netpbm raster I/O. PGM (P2/P5, 8 or 16 bit) and PPM (P3/P6) are read with
// intensities scaled to [0, 1]; color inputs select one channel.

#include <aspl/image.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace aspl {

enum class Channel { Luma, Red, Green, Blue };

Channel parse_channel(std::string_view name);

Image parse_image(std::string_view bytes, Channel channel = Channel::Luma);
Image read_image(const std::filesystem::path& path, Channel channel = Channel::Luma);

/// Quantizes to maxval after clamping to [0, 1].
std::string format_pgm(const Image& img, bool binary = true, int maxval = 255);
void write_pgm(const std::filesystem::path& path, const Image& img, int maxval = 255);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace aspl
