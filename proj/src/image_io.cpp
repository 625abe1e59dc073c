#include <aspl/image_io.hpp>

#include <aspl/error.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aspl {

namespace {

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string token() {
        skip_space_and_comments();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) &&
               bytes_[pos_] != '#') {
            ++pos_;
        }
        if (start == pos_) {
            throw Error(ErrorCode::ParseError, "unexpected end of raster data");
        }
        return std::string(bytes_.substr(start, pos_ - start));
    }

    long integer() {
        const std::string t = token();
        try {
            std::size_t used = 0;
            const long v = std::stol(t, &used);
            if (used != t.size()) {
                throw Error(ErrorCode::ParseError, "bad integer '" + t + "'");
            }
            return v;
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::ParseError, "bad integer '" + t + "'");
        }
    }

    /// Single bit character for ASCII PBM, where digits may run together.
    int bit() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) {
            throw Error(ErrorCode::ParseError, "unexpected end of bitmap data");
        }
        const char c = bytes_[pos_++];
        if (c != '0' && c != '1') {
            throw Error(ErrorCode::ParseError, "bitmap digits must be 0 or 1");
        }
        return c - '0';
    }

    /// Binary payload begins after exactly one whitespace byte.
    std::string_view binary(std::size_t count) {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw Error(ErrorCode::ParseError, "missing separator before binary raster data");
        }
        ++pos_;
        if (bytes_.size() - pos_ < count) {
            throw Error(ErrorCode::ParseError, "truncated binary raster data");
        }
        const auto out = bytes_.substr(pos_, count);
        pos_ += count;
        return out;
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

double pick_channel(double r, double g, double b, Channel channel) {
    switch (channel) {
    case Channel::Red: return r;
    case Channel::Green: return g;
    case Channel::Blue: return b;
    case Channel::Luma: return 0.299 * r + 0.587 * g + 0.114 * b;
    }
    return r;
}

} // namespace

Channel parse_channel(std::string_view name) {
    if (name == "luma" || name == "gray") return Channel::Luma;
    if (name == "red") return Channel::Red;
    if (name == "green") return Channel::Green;
    if (name == "blue") return Channel::Blue;
    throw Error(ErrorCode::InvalidArgument, "unknown channel '" + std::string(name) + "'");
}

Image parse_image(std::string_view bytes, Channel channel) {
    Reader in(bytes);
    const std::string magic = in.token();
    if (magic.size() != 2 || magic[0] != 'P' || magic[1] < '1' || magic[1] > '6') {
        throw Error(ErrorCode::ParseError, "not a Netpbm raster");
    }
    const int kind = magic[1] - '0';
    const long w = in.integer();
    const long h = in.integer();
    if (w <= 0 || h <= 0 || w > 65536 || h > 65536) {
        throw Error(ErrorCode::ParseError, "bad raster dimensions");
    }
    const bool bitmap = kind == 1 || kind == 4;
    const long maxval = bitmap ? 1 : in.integer();
    if (maxval <= 0 || maxval > 65535) {
        throw Error(ErrorCode::ParseError, "bad maxval");
    }
    Image img(static_cast<int>(w), static_cast<int>(h));
    // Division rather than a reciprocal keeps k / maxval correctly rounded.
    const double denom = static_cast<double>(maxval);
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    auto dst = img.data();
    const bool color = kind == 3 || kind == 6;
    const int components = color ? 3 : 1;

    if (kind == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            dst[i] = in.bit();
        }
    } else if (kind == 4) {
        const std::size_t stride = (static_cast<std::size_t>(w) + 7) / 8;
        const auto raw = in.binary(stride * static_cast<std::size_t>(h));
        for (long y = 0; y < h; ++y) {
            for (long x = 0; x < w; ++x) {
                const auto byte = static_cast<unsigned char>(raw[static_cast<std::size_t>(y) * stride +
                                                                 static_cast<std::size_t>(x) / 8]);
                dst[static_cast<std::size_t>(y * w + x)] = (byte >> (7 - x % 8)) & 1;
            }
        }
    } else if (kind == 2 || kind == 3) {
        for (std::size_t i = 0; i < n; ++i) {
            double c[3] = {0, 0, 0};
            for (int k = 0; k < components; ++k) {
                const long v = in.integer();
                if (v < 0 || v > maxval) {
                    throw Error(ErrorCode::ParseError, "sample exceeds maxval");
                }
                c[k] = static_cast<double>(v) / denom;
            }
            dst[i] = color ? pick_channel(c[0], c[1], c[2], channel) : c[0];
        }
    } else {
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        const auto raw = in.binary(n * static_cast<std::size_t>(components) * bytes_per);
        std::size_t k = 0;
        const auto next = [&]() {
            unsigned v = static_cast<unsigned char>(raw[k++]);
            if (bytes_per == 2) {
                v = (v << 8) | static_cast<unsigned char>(raw[k++]);
            }
            if (v > static_cast<unsigned>(maxval)) {
                throw Error(ErrorCode::ParseError, "sample exceeds maxval");
            }
            return static_cast<double>(v) / denom;
        };
        for (std::size_t i = 0; i < n; ++i) {
            if (color) {
                const double r = next();
                const double g = next();
                const double b = next();
                dst[i] = pick_channel(r, g, b, channel);
            } else {
                dst[i] = next();
            }
        }
    }
    return img;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

Image read_image(const std::filesystem::path& path, Channel channel) {
    return parse_image(read_file(path), channel);
}

std::string format_pgm(const Image& img, bool binary, int maxval) {
    if (maxval < 1 || maxval > 65535) {
        throw Error(ErrorCode::InvalidArgument, "maxval must lie in [1, 65535]");
    }
    std::ostringstream out;
    out << (binary ? "P5" : "P2") << '\n' << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
    const auto quantize = [maxval](double v) {
        return static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    };
    if (binary) {
        std::string payload;
        payload.reserve(img.size() * (maxval > 255 ? 2 : 1));
        for (double v : img.data()) {
            const unsigned q = quantize(v);
            if (maxval > 255) {
                payload.push_back(static_cast<char>((q >> 8) & 0xff));
            }
            payload.push_back(static_cast<char>(q & 0xff));
        }
        out << payload;
    } else {
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                out << quantize(img.at(x, y)) << (x + 1 < img.width() ? ' ' : '\n');
            }
        }
    }
    return out.str();
}

void write_pgm(const std::filesystem::path& path, const Image& img, int maxval) {
    write_file(path, format_pgm(img, true, maxval));
}

} // namespace aspl
