#pragma once

// Deterministic synthetic corpus: smooth closed blobs with a few controlled
// modes of variation, rendered as noisy bright-on-dark images with pixel
// ground truth equal to the rasterized shape.

#include <aspl/image.hpp>
#include <aspl/io.hpp>
#include <aspl/segment.hpp>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace aspl {

struct SynthOptions {
    std::uint64_t seed = 1;
    int count = 24;
    int width = 128;
    int height = 128;
    int masters = 8;
    double background = 0.15;
    double foreground = 0.85;
    double noise = 0.03;
};

struct SynthItem {
    std::string name;
    ShapeRecord shape;
    Image image;
    BinaryMask truth;
};

/// Uniform doubles in [0, 1) and standard normals drawn directly from the
/// fully specified mt19937_64 stream, so corpora do not depend on the
/// standard library's distribution implementations.
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed);
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

private:
    std::mt19937_64 gen_;
};

std::vector<SynthItem> synth_corpus(const SynthOptions& options);

/// Three-level schedule tuned for the default corpus geometry.
PyramidSchedule synth_schedule(int width, int height);

/// Writes shapes/, images/, truth/, schedule.txt and corpus.json; the first
/// half of the items is listed as the training split.
void write_corpus(const std::filesystem::path& dir, const std::vector<SynthItem>& items,
                  const SynthOptions& options);

} // namespace aspl
