#include <aspl/io.hpp>

#include <aspl/error.hpp>
#include <aspl/image_io.hpp>
#include <aspl/text.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace aspl {

namespace {

using Words = std::vector<std::string_view>;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

void expect_header(const std::vector<std::string_view>& lines, std::string_view magic) {
    if (lines.empty()) {
        parse_fail("empty file");
    }
    const Words w = split_words(lines.front());
    if (w.size() != 2 || w[0] != magic) {
        parse_fail("missing '" + std::string(magic) + "' header");
    }
    if (w[1] != "1") {
        parse_fail("unsupported " + std::string(magic) + " version " + std::string(w[1]));
    }
}

std::string topology_name(Topology t) { return t == Topology::Closed ? "closed" : "open"; }

Topology parse_topology(std::string_view s) {
    if (s == "closed") return Topology::Closed;
    if (s == "open") return Topology::Open;
    parse_fail("unknown topology '" + std::string(s) + "'");
}

std::string join_numbers(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) out += ' ';
        out += format_number(v[i]);
    }
    return out;
}

Eigen::VectorXd parse_numbers(const Words& w, std::size_t from, Eigen::Index expected) {
    if (static_cast<Eigen::Index>(w.size() - from) != expected) {
        parse_fail("expected " + std::to_string(expected) + " values after '" + std::string(w[0]) + "'");
    }
    Eigen::VectorXd v(expected);
    for (Eigen::Index i = 0; i < expected; ++i) {
        v[i] = parse_number(w[from + static_cast<std::size_t>(i)]);
    }
    return v;
}

/// Sequential key-value reader over "key values..." lines.
class Fields {
public:
    Fields(const std::vector<std::string_view>& lines, std::size_t start) : lines_(lines), pos_(start) {}

    Words next(std::string_view key, std::size_t min_values = 1) {
        if (pos_ >= lines_.size()) {
            parse_fail("missing '" + std::string(key) + "' record");
        }
        Words w = split_words(lines_[pos_++]);
        if (w.empty() || w[0] != key) {
            parse_fail("expected '" + std::string(key) + "' record");
        }
        if (w.size() < min_values + 1) {
            parse_fail("'" + std::string(key) + "' record is missing values");
        }
        return w;
    }

    bool done() const { return pos_ >= lines_.size(); }
    std::size_t position() const { return pos_; }
    std::string_view raw() { return lines_.at(pos_++); }

private:
    const std::vector<std::string_view>& lines_;
    std::size_t pos_;
};

std::string format_meta(const SplineMeta& m) {
    std::string out;
    out += "topology " + topology_name(m.topology) + "\n";
    out += "alpha " + format_number(m.alpha) + "\n";
    out += "rho " + format_number(m.rho) + "\n";
    out += "epsilon " + std::to_string(m.epsilon) + "\n";
    out += "parts";
    for (int p : m.parts) {
        out += " " + std::to_string(p);
    }
    out += "\n";
    return out;
}

SplineMeta parse_meta(Fields& f) {
    SplineMeta m;
    m.topology = parse_topology(f.next("topology")[1]);
    m.alpha = parse_number(f.next("alpha")[1]);
    m.rho = parse_number(f.next("rho")[1]);
    m.epsilon = static_cast<int>(parse_integer(f.next("epsilon")[1]));
    const Words parts = f.next("parts");
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const long n = parse_integer(parts[i]);
        if (n < static_cast<long>(minimum_points(m.topology))) {
            parse_fail("part has too few masters");
        }
        m.parts.push_back(static_cast<int>(n));
    }
    if (m.epsilon < 0) {
        parse_fail("epsilon must be nonnegative");
    }
    SplineConfig{m.alpha, m.rho}.validate();
    return m;
}

} // namespace

SplineConfig spline_config(const SplineMeta& meta, int samples_per_segment) {
    SplineConfig cfg;
    cfg.alpha = meta.alpha;
    cfg.rho = meta.rho;
    cfg.samples_per_segment = samples_per_segment;
    return cfg;
}

std::string format_shape(const ShapeRecord& shape) {
    if (static_cast<int>(shape.masters.size()) != shape.meta.master_count()) {
        throw Error(ErrorCode::DimensionMismatch, "master count differs from the parts table");
    }
    std::string out = "aspl-shape 1\n" + format_meta(shape.meta);
    for (const Point2& p : shape.masters) {
        out += format_number(p.x) + " " + format_number(p.y) + "\n";
    }
    return out;
}

ShapeRecord parse_shape(std::string_view text) {
    const auto lines = content_lines(text);
    expect_header(lines, "aspl-shape");
    Fields f(lines, 1);
    ShapeRecord rec;
    rec.meta = parse_meta(f);
    const int total = rec.meta.master_count();
    for (int i = 0; i < total; ++i) {
        if (f.done()) {
            parse_fail("shape file lists fewer points than its parts table");
        }
        const Words w = split_words(f.raw());
        if (w.size() != 2) {
            parse_fail("point lines hold exactly two numbers");
        }
        rec.masters.push_back({parse_number(w[0]), parse_number(w[1])});
    }
    if (!f.done()) {
        parse_fail("shape file lists more points than its parts table");
    }
    // Construct each part once to surface geometric errors at load time.
    for (const auto& part : split_parts(rec)) {
        ControlShape(part, rec.meta.topology);
    }
    return rec;
}

ShapeRecord read_shape(const std::filesystem::path& path) { return parse_shape(read_file(path)); }
void write_shape(const std::filesystem::path& path, const ShapeRecord& shape) {
    write_file(path, format_shape(shape));
}

std::vector<std::vector<Point2>> split_parts(const ShapeRecord& shape) {
    if (static_cast<int>(shape.masters.size()) != shape.meta.master_count()) {
        throw Error(ErrorCode::DimensionMismatch, "master count differs from the parts table");
    }
    std::vector<std::vector<Point2>> out;
    std::size_t offset = 0;
    for (int n : shape.meta.parts) {
        out.emplace_back(shape.masters.begin() + static_cast<std::ptrdiff_t>(offset),
                         shape.masters.begin() + static_cast<std::ptrdiff_t>(offset + static_cast<std::size_t>(n)));
        offset += static_cast<std::size_t>(n);
    }
    return out;
}

std::vector<ControlShape> expanded_parts(const ShapeRecord& shape) {
    const SplineConfig cfg = spline_config(shape.meta);
    std::vector<ControlShape> out;
    for (auto& part : split_parts(shape)) {
        out.push_back(expand_shape(ControlShape(std::move(part), shape.meta.topology), shape.meta.epsilon, cfg));
    }
    return out;
}

FlatShape expanded_flat(const ShapeRecord& shape) {
    std::vector<Point2> all;
    for (const auto& part : expanded_parts(shape)) {
        all.insert(all.end(), part.points().begin(), part.points().end());
    }
    return to_flat(all);
}

BinaryMask rasterize_record(const ShapeRecord& shape, int width, int height, int samples_per_segment) {
    if (shape.meta.topology != Topology::Closed) {
        throw Error(ErrorCode::OpenContour, "only closed contours can be rasterized");
    }
    const SplineConfig cfg = spline_config(shape.meta, samples_per_segment);
    const FlatShape flat = to_flat(shape.masters);
    return rasterize(flat, shape.meta.parts, Topology::Closed, cfg, width, height);
}

std::string format_model(const ShapeModel& model) {
    const Eigen::Index dim = model.dim();
    if (model.basis.rows() != dim || model.basis.cols() != dim || model.spectrum.size() != dim ||
        model.weights.size() != dim / 2) {
        throw Error(ErrorCode::DimensionMismatch, "model arrays have inconsistent sizes");
    }
    std::string out = "aspl-model 1\n" + format_meta(model.meta);
    out += "training_count " + std::to_string(model.training_count) + "\n";
    out += "phi " + format_number(model.phi) + "\n";
    out += "g " + std::to_string(model.g) + "\n";
    out += "dim " + std::to_string(dim) + "\n";
    out += "mean " + join_numbers(model.mean) + "\n";
    out += "weights " + join_numbers(model.weights) + "\n";
    out += "spectrum " + join_numbers(model.spectrum) + "\n";
    out += "basis\n";
    for (Eigen::Index i = 0; i < dim; ++i) {
        out += join_numbers(model.basis.row(i).transpose()) + "\n";
    }
    return out;
}

ShapeModel parse_model(std::string_view text) {
    const auto lines = content_lines(text);
    expect_header(lines, "aspl-model");
    Fields f(lines, 1);
    ShapeModel m;
    m.meta = parse_meta(f);
    m.training_count = static_cast<int>(parse_integer(f.next("training_count")[1]));
    m.phi = parse_number(f.next("phi")[1]);
    m.g = static_cast<int>(parse_integer(f.next("g")[1]));
    const long dim = parse_integer(f.next("dim")[1]);
    if (dim != 2L * m.meta.expanded_count()) {
        parse_fail("model dimension does not match its parts table");
    }
    if (m.g < 0 || m.g > dim) {
        parse_fail("retained mode count out of range");
    }
    m.mean = parse_numbers(f.next("mean", 0), 1, dim);
    m.weights = parse_numbers(f.next("weights", 0), 1, dim / 2);
    m.spectrum = parse_numbers(f.next("spectrum", 0), 1, dim);
    f.next("basis", 0);
    m.basis.resize(dim, dim);
    for (long i = 0; i < dim; ++i) {
        if (f.done()) {
            parse_fail("basis has too few rows");
        }
        m.basis.row(i) = parse_numbers(split_words(f.raw()), 0, dim).transpose();
    }
    if (!f.done()) {
        parse_fail("trailing data after basis");
    }
    for (Eigen::Index l = 0; l < m.spectrum.size(); ++l) {
        if (m.spectrum[l] < 0.0 || (l > 0 && m.spectrum[l] > m.spectrum[l - 1])) {
            parse_fail("spectrum must be nonnegative and descending");
        }
    }
    if (m.g > m.nonzero_modes()) {
        parse_fail("retained modes include zero eigenvalues");
    }
    const Eigen::MatrixXd gram = m.basis.transpose() * m.basis;
    const double err = (gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (!(err <= 1e-6)) {
        parse_fail("model basis is not orthonormal (max deviation " + format_number(err) + ")");
    }
    return m;
}

ShapeModel read_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }
void write_model(const std::filesystem::path& path, const ShapeModel& model) {
    write_file(path, format_model(model));
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : "nil"; }

std::optional<double> parse_opt_number(std::string_view s) {
    if (s == "nil") return std::nullopt;
    return parse_number(s);
}

std::pair<int, int> parse_dims(std::string_view s) {
    const auto x = s.find('x');
    if (x == std::string_view::npos) {
        parse_fail("dimensions are written WxH");
    }
    return {static_cast<int>(parse_integer(s.substr(0, x))), static_cast<int>(parse_integer(s.substr(x + 1)))};
}

} // namespace

std::string format_schedule(const PyramidSchedule& s) {
    std::string out = "aspl-schedule 1\n";
    out += "init_pose " + format_number(s.init_pose.theta) + " " + format_number(s.init_pose.s) + " " +
           format_number(s.init_pose.tau_x) + " " + format_number(s.init_pose.tau_y) + "\n";
    for (const auto& [l, c] : s.init_b) {
        out += "init_b " + std::to_string(l) + " " + format_number(c) + "\n";
    }
    out += "tolerance " + format_number(s.tolerance) + "\n";
    for (const LevelConfig& l : s.levels) {
        out += "level " + std::to_string(l.width) + "x" + std::to_string(l.height);
        out += " median=" + (l.median ? std::to_string(l.median->w) + "x" + std::to_string(l.median->h)
                                      : std::string("nil"));
        out += " q=" + std::to_string(l.iterations);
        out += " c_t=" + opt_number(l.c_t);
        out += " c_s=" + opt_number(l.c_s);
        out += " c_x=" + opt_number(l.c_x);
        out += " c_y=" + opt_number(l.c_y);
        out += " c_b=" + opt_number(l.c_b);
        out += " c_b2=" + opt_number(l.c_b2);
        out += " phi=" + format_number(l.phi);
        out += " psi=" + format_number(l.psi);
        out += " mu=" + format_number(l.mu);
        out += " gvf_iterations=" + std::to_string(l.gvf_iterations);
        out += " gvf_tolerance=" + format_number(l.gvf_tolerance);
        out += " d_max_factor=" + format_number(l.d_max_factor);
        out += "\n";
    }
    return out;
}

PyramidSchedule parse_schedule(std::string_view text) {
    const auto lines = content_lines(text);
    expect_header(lines, "aspl-schedule");
    PyramidSchedule s;
    bool have_pose = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Words w = split_words(lines[i]);
        if (w[0] == "init_pose") {
            const Eigen::VectorXd p = parse_numbers(w, 1, 4);
            s.init_pose = {p[0], p[1], p[2], p[3]};
            have_pose = true;
        } else if (w[0] == "init_b") {
            if (w.size() != 3) parse_fail("init_b takes a mode index and a coefficient");
            s.init_b[static_cast<int>(parse_integer(w[1]))] = parse_number(w[2]);
        } else if (w[0] == "tolerance") {
            if (w.size() != 2) parse_fail("tolerance takes one value");
            s.tolerance = parse_number(w[1]);
        } else if (w[0] == "level") {
            if (w.size() < 2) parse_fail("level needs a resolution");
            LevelConfig l;
            std::tie(l.width, l.height) = parse_dims(w[1]);
            for (std::size_t k = 2; k < w.size(); ++k) {
                const auto eq = w[k].find('=');
                if (eq == std::string_view::npos) parse_fail("level fields are key=value");
                const std::string_view key = w[k].substr(0, eq);
                const std::string_view val = w[k].substr(eq + 1);
                if (key == "median") {
                    if (val == "nil") {
                        l.median.reset();
                    } else {
                        const auto [kw, kh] = parse_dims(val);
                        l.median = KernelSize{kw, kh};
                    }
                } else if (key == "q") {
                    l.iterations = static_cast<int>(parse_integer(val));
                } else if (key == "c_t") {
                    l.c_t = parse_opt_number(val);
                } else if (key == "c_s") {
                    l.c_s = parse_opt_number(val);
                } else if (key == "c_x") {
                    l.c_x = parse_opt_number(val);
                } else if (key == "c_y") {
                    l.c_y = parse_opt_number(val);
                } else if (key == "c_b") {
                    l.c_b = parse_opt_number(val);
                } else if (key == "c_b2") {
                    l.c_b2 = parse_opt_number(val);
                } else if (key == "phi") {
                    l.phi = parse_number(val);
                } else if (key == "psi") {
                    l.psi = parse_number(val);
                } else if (key == "mu") {
                    l.mu = parse_number(val);
                } else if (key == "gvf_iterations") {
                    l.gvf_iterations = static_cast<int>(parse_integer(val));
                } else if (key == "gvf_tolerance") {
                    l.gvf_tolerance = parse_number(val);
                } else if (key == "d_max_factor") {
                    l.d_max_factor = parse_number(val);
                } else {
                    parse_fail("unknown level field '" + std::string(key) + "'");
                }
            }
            s.levels.push_back(l);
        } else {
            parse_fail("unknown schedule record '" + std::string(w[0]) + "'");
        }
    }
    if (!have_pose) {
        parse_fail("schedule lacks init_pose");
    }
    s.validate();
    return s;
}

PyramidSchedule read_schedule(const std::filesystem::path& path) { return parse_schedule(read_file(path)); }
void write_schedule(const std::filesystem::path& path, const PyramidSchedule& sched) {
    write_file(path, format_schedule(sched));
}

std::string format_mask(const BinaryMask& mask) {
    std::string out = "P1\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n";
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            out += mask.at(x, y) ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

BinaryMask parse_mask(std::string_view bytes) {
    const Image img = parse_image(bytes);
    BinaryMask mask(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            mask.set(x, y, img.at(x, y) > 0.0);
        }
    }
    return mask;
}

BinaryMask read_mask(const std::filesystem::path& path) { return parse_mask(read_file(path)); }
void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
    write_file(path, format_mask(mask));
}

} // namespace aspl
