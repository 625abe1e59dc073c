#include <aspl/synth.hpp>

#include <aspl/error.hpp>
#include <aspl/image_io.hpp>
#include <aspl/kernels.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace aspl {

SynthRng::SynthRng(std::uint64_t seed) : gen_(seed) {}

double SynthRng::uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

double SynthRng::normal() {
    // Box-Muller; 1 - u keeps the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

Image blur(const Image& in) {
    const int w = in.width();
    const int h = in.height();
    Image tmp(w, h);
    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < 5; ++i) {
                acc += kBinomial5[i] * in.clamped(x + i - 2, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = 0; j < 5; ++j) {
                acc += kBinomial5[j] * tmp.clamped(x, y + j - 2);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

ShapeRecord blob(SynthRng& rng, const SynthOptions& o) {
    const double scale = std::min(o.width, o.height) / 128.0;
    const double rx = rng.uniform(26.0, 38.0) * scale;
    const double ry = rng.uniform(20.0, 30.0) * scale;
    const double lobe = rng.uniform(-0.08, 0.08);
    const double rot = rng.uniform(-0.25, 0.25);
    const double cx = (o.width - 1) / 2.0 + rng.uniform(-4.0, 4.0) * scale;
    const double cy = (o.height - 1) / 2.0 + rng.uniform(-4.0, 4.0) * scale;
    ShapeRecord rec;
    rec.meta.topology = Topology::Closed;
    rec.meta.epsilon = 0;
    rec.meta.parts = {o.masters};
    for (int k = 0; k < o.masters; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / o.masters;
        const double r = 1.0 + lobe * std::cos(3.0 * phi);
        const double ex = rx * r * std::cos(phi);
        const double ey = ry * r * std::sin(phi);
        rec.masters.push_back({cx + ex * std::cos(rot) - ey * std::sin(rot),
                               cy + ex * std::sin(rot) + ey * std::cos(rot)});
    }
    return rec;
}

std::string item_name(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "blob_%03d", i);
    return buf;
}

} // namespace

std::vector<SynthItem> synth_corpus(const SynthOptions& o) {
    if (o.count < 2) {
        throw Error(ErrorCode::InvalidArgument, "corpus needs at least two items");
    }
    if (o.masters < 3) {
        throw Error(ErrorCode::InvalidArgument, "blobs need at least three masters");
    }
    SynthRng rng(o.seed);
    std::vector<SynthItem> items;
    for (int i = 0; i < o.count; ++i) {
        SynthItem item;
        item.name = item_name(i);
        item.shape = blob(rng, o);
        item.truth = rasterize_record(item.shape, o.width, o.height);
        Image img(o.width, o.height, o.background);
        for (int y = 0; y < o.height; ++y) {
            for (int x = 0; x < o.width; ++x) {
                if (item.truth.at(x, y)) {
                    img.at(x, y) = o.foreground;
                }
            }
        }
        img = blur(img);
        // Quantized exactly as an 8-bit file reads back.
        for (double& v : img.data()) {
            const double noisy = std::clamp(v + o.noise * rng.normal(), 0.0, 1.0);
            v = static_cast<double>(std::lround(noisy * 255.0)) * (1.0 / 255.0);
        }
        item.image = std::move(img);
        items.push_back(std::move(item));
    }
    return items;
}

PyramidSchedule synth_schedule(int width, int height) {
    PyramidSchedule s;
    const int iterations[] = {15, 15, 20};
    for (int k = 0; k < 3; ++k) {
        LevelConfig l;
        const int div = 4 >> k;
        l.width = width / div;
        l.height = height / div;
        l.iterations = iterations[k];
        if (k > 0) {
            l.c_t = 1.0;
            l.c_s = 2.0;
            l.c_x = 2.0;
            l.c_y = 2.0;
            l.c_b = 1.0;
        }
        l.phi = 0.95;
        l.psi = 10.0;
        l.mu = 0.2;
        s.levels.push_back(l);
    }
    // Corpus blobs span about a quarter of the frame around its center.
    s.init_pose = {0.0, std::min(width, height) / 16.0, (width - 1) / 8.0, (height - 1) / 8.0};
    return s;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<SynthItem>& items,
                  const SynthOptions& o) {
    namespace fs = std::filesystem;
    std::error_code ec;
    for (const char* sub : {"shapes", "images", "truth"}) {
        fs::create_directories(dir / sub, ec);
        if (ec) {
            throw Error(ErrorCode::IoError, "cannot create " + (dir / sub).string());
        }
    }
    nlohmann::ordered_json index;
    index["format"] = "aspl-corpus";
    index["version"] = 1;
    index["seed"] = o.seed;
    index["count"] = o.count;
    index["width"] = o.width;
    index["height"] = o.height;
    index["masters"] = o.masters;
    index["noise"] = o.noise;
    index["schedule"] = "schedule.txt";
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    const std::size_t half = items.size() / 2;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const SynthItem& it = items[i];
        const std::string shape = "shapes/" + it.name + ".shape";
        const std::string image = "images/" + it.name + ".pgm";
        const std::string truth = "truth/" + it.name + ".pbm";
        write_shape(dir / shape, it.shape);
        write_pgm(dir / image, it.image);
        write_mask(dir / truth, it.truth);
        list.push_back({{"name", it.name},
                        {"split", i < half ? "train" : "test"},
                        {"shape", shape},
                        {"image", image},
                        {"truth", truth}});
    }
    index["items"] = list;
    write_schedule(dir / "schedule.txt", synth_schedule(o.width, o.height));
    write_file(dir / "corpus.json", index.dump(2) + "\n");
}

} // namespace aspl
