#include <aspl/segment.hpp>

#include <aspl/error.hpp>

#include <algorithm>
#include <cmath>

namespace aspl {

void LevelConfig::validate() const {
    const auto fail = [](const std::string& what) {
        throw Error(ErrorCode::ScheduleMismatch, "level config: " + what);
    };
    if (width <= 0 || height <= 0) fail("resolution must be positive");
    if (iterations < 1) fail("iteration count must be at least 1");
    if (!(phi > 0.0 && phi < 1.0)) fail("phi must lie in (0, 1)");
    if (!std::isfinite(psi)) fail("psi must be finite");
    if (!(mu > 0.0)) fail("mu must be positive");
    if (gvf_iterations < 0) fail("GVF iteration count must be nonnegative");
    if (!(gvf_tolerance >= 0.0)) fail("GVF tolerance must be nonnegative");
    if (!(d_max_factor > 0.0)) fail("D_max factor must be positive");
    if (median && (median->w < 1 || median->h < 1)) fail("median kernel must be at least 1x1");
}

void PyramidSchedule::validate() const {
    if (levels.empty()) {
        throw Error(ErrorCode::ScheduleMismatch, "schedule has no levels");
    }
    for (const auto& l : levels) {
        l.validate();
    }
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        if (levels[i].width != levels[i + 1].width / 2 || levels[i].height != levels[i + 1].height / 2) {
            throw Error(ErrorCode::ScheduleMismatch, "level resolutions must double from coarse to fine");
        }
    }
    if (!(init_pose.s > 0.0) || !std::isfinite(init_pose.theta) || !std::isfinite(init_pose.tau_x) ||
        !std::isfinite(init_pose.tau_y)) {
        throw Error(ErrorCode::ScheduleMismatch, "initial pose must be finite with positive scale");
    }
    for (const auto& [l, c] : init_b) {
        if (l < 1 || !std::isfinite(c)) {
            throw Error(ErrorCode::ScheduleMismatch, "initial mode overrides use 1-based indices");
        }
    }
    if (!std::isfinite(tolerance)) {
        throw Error(ErrorCode::ScheduleMismatch, "tolerance must be finite");
    }
}

PyramidSchedule lung_schedule() {
    struct Row {
        int res;
        std::optional<KernelSize> median;
        int q;
        bool entry;
        double c_b2;
        double phi;
    };
    const Row rows[] = {
        {16, std::nullopt, 1, true, -3.0, 0.50},
        {32, std::nullopt, 2, false, -1.5, 0.60},
        {64, KernelSize{3, 3}, 10, false, -1.5, 0.70},
        {128, KernelSize{4, 4}, 60, false, -1.5, 0.90},
        {256, std::nullopt, 180, false, -1.5, 0.98},
    };
    PyramidSchedule s;
    for (const Row& r : rows) {
        LevelConfig l;
        l.width = r.res;
        l.height = r.res;
        l.median = r.median;
        l.iterations = r.q;
        if (!r.entry) {
            l.c_t = 0.2;
            l.c_s = 2.0;
            l.c_x = 2.0;
            l.c_y = 2.0;
            l.c_b = 0.5;
        }
        l.c_b2 = r.c_b2;
        l.phi = r.phi;
        s.levels.push_back(l);
    }
    s.init_pose = {0.0, 6.0, 9.0, 7.0};
    return s;
}

PyramidSchedule single_level_schedule(int width, int height, const PoseParams& init) {
    PyramidSchedule s;
    LevelConfig l;
    l.width = width;
    l.height = height;
    l.iterations = 100;
    s.levels.push_back(l);
    s.init_pose = init;
    return s;
}

PartLayout PartLayout::of(const SplineMeta& meta) {
    return {meta.expanded_parts(), meta.topology};
}

FlatShape point_normals(const FlatShape& shape, const PartLayout& layout) {
    FlatShape out = FlatShape::Zero(shape.size());
    Eigen::Index offset = 0;
    for (int n : layout.sizes) {
        for (int i = 0; i < n; ++i) {
            int prev = i - 1;
            int next = i + 1;
            if (layout.topology == Topology::Closed) {
                prev = (prev + n) % n;
                next = next % n;
            } else {
                prev = std::max(prev, 0);
                next = std::min(next, n - 1);
            }
            const Point2 t = point_at(shape, offset + next) - point_at(shape, offset + prev);
            const double len = t.norm();
            if (len > 0.0) {
                set_point(out, offset + i, Point2{-t.y / len, t.x / len});
            }
        }
        offset += n;
    }
    if (offset != point_count(shape)) {
        throw Error(ErrorCode::DimensionMismatch, "part layout does not cover the shape");
    }
    return out;
}

FlatShape normal_displacements(const FlatShape& z_image, const VectorField& field,
                               const PartLayout& layout) {
    const FlatShape normals = point_normals(z_image, layout);
    FlatShape d(z_image.size());
    for (Eigen::Index i = 0; i < point_count(z_image); ++i) {
        const Point2 n = point_at(normals, i);
        const Point2 q = field.sample(point_at(z_image, i));
        set_point(d, i, dot(q, n) * n);
    }
    return d;
}

FlatShape deform(const FlatShape& z_image, const FlatShape& d, double psi) {
    if (z_image.size() != d.size()) {
        throw Error(ErrorCode::DimensionMismatch, "displacement length differs from the shape");
    }
    return z_image + psi * d;
}

PoseParams recover_pose(const FlatShape& prev_deformed, const FlatShape& z_model_next) {
    return align_pair(prev_deformed, z_model_next, uniform_weights(point_count(z_model_next)));
}

FlatShape pose_offset(const FlatShape& z_model, const FlatShape& mean, const PoseParams& pose) {
    return transform_linear(z_model - mean, pose.theta, pose.s);
}

BackToModel back_to_model(const FlatShape& z_deformed, const FlatShape& delta,
                          const FlatShape& mean) {
    if (z_deformed.size() != delta.size() || z_deformed.size() != mean.size()) {
        throw Error(ErrorCode::DimensionMismatch, "shape lengths differ");
    }
    BackToModel out;
    out.pose = align_pair(mean, z_deformed - delta, uniform_weights(point_count(mean)));
    out.z_minus = transform(z_deformed, out.pose);
    return out;
}

FitState make_state(const ShapeModel& model, const ModeVector& b, const PoseParams& pose, int level) {
    FitState s;
    s.b = b;
    s.pose = pose;
    s.level = level;
    s.z_model = synthesize(model, b);
    s.z_image = transform(s.z_model, pose);
    s.z_deformed = s.z_image;
    s.delta = pose_offset(s.z_model, model.mean, pose);
    s.d_m = mahalanobis(model, b);
    return s;
}

std::vector<FitState> iterate_level(const FitState& start, const VectorField& field,
                                    const LevelConfig& cfg, const ShapeModel& model,
                                    const LevelOptions& options) {
    const PartLayout layout = PartLayout::of(model.meta);
    const double d_max = cfg.d_max_factor * model.g;
    std::vector<FitState> history;
    FitState state = start;
    for (int n = 1; n <= cfg.iterations; ++n) {
        FitState next;
        try {
            const FlatShape d = normal_displacements(state.z_image, field, layout);
            next.z_deformed = deform(state.z_image, d, cfg.psi);
            // Equal to z_image - T(mean); on the first iteration this is the
            // rotated and scaled model-scale offset.
            next.delta = pose_offset(state.z_model, model.mean, state.pose);
            const BackToModel back = back_to_model(next.z_deformed, next.delta, model.mean);
            ModeVector b = clamp_modes(model, project(model, back.z_minus));
            if (model.g > 0) {
                b = rescale_modes(model, b, d_max);
            }
            next.b = b;
            next.z_model = synthesize(model, b);
            next.pose = recover_pose(next.z_deformed, next.z_model);
            next.z_image = transform(next.z_model, next.pose);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SingularSystem) {
                break;
            }
            throw;
        }
        next.iteration = n;
        next.level = start.level;
        next.d_m = mahalanobis(model, next.b);
        next.d_max = d_max;
        double movement = 0.0;
        for (Eigen::Index i = 0; i < point_count(next.z_image); ++i) {
            movement = std::max(movement, distance(point_at(next.z_image, i), point_at(state.z_image, i)));
        }
        next.movement = movement;
        history.push_back(next);
        state = std::move(next);
        if (movement < options.tolerance) {
            break;
        }
    }
    return history;
}

namespace {

ModeVector entry_modes(const ShapeModel& model, const LevelConfig& cfg, const PyramidSchedule& sched) {
    ModeVector b = ModeVector::Zero(model.g);
    if (cfg.c_b2 && model.g >= 2) {
        b[1] = *cfg.c_b2 * std::sqrt(model.spectrum[1]);
    }
    for (const auto& [l, c] : sched.init_b) {
        if (l <= model.g) {
            b[l - 1] = c * std::sqrt(model.spectrum[l - 1]);
        }
    }
    return b;
}

ModeVector transfer_modes(const ShapeModel& model, const ModeVector& prev, const LevelConfig& cfg) {
    ModeVector b = ModeVector::Zero(model.g);
    const double c_b = cfg.c_b.value_or(1.0);
    for (Eigen::Index l = 0; l < std::min<Eigen::Index>(prev.size(), b.size()); ++l) {
        b[l] = c_b * prev[l];
    }
    if (cfg.c_b2 && model.g >= 2) {
        b[1] = *cfg.c_b2 * std::sqrt(model.spectrum[1]);
    }
    return b;
}

PoseParams transfer_pose(const PoseParams& p, const LevelConfig& cfg) {
    return {p.theta * cfg.c_t.value_or(1.0), p.s * cfg.c_s.value_or(1.0),
            p.tau_x * cfg.c_x.value_or(1.0), p.tau_y * cfg.c_y.value_or(1.0)};
}

} // namespace

PyramidResult run_pyramid(const Image& img, const ShapeModel& model, const PyramidSchedule& sched) {
    sched.validate();
    const std::size_t count = sched.levels.size();
    const LevelConfig& finest = sched.levels.back();
    if (finest.width != img.width() || finest.height != img.height()) {
        throw Error(ErrorCode::ScheduleMismatch,
                    "finest schedule level is " + std::to_string(finest.width) + "x" +
                        std::to_string(finest.height) + " but the image is " +
                        std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
    if (model.dim() != 2 * model.meta.expanded_count()) {
        throw Error(ErrorCode::DimensionMismatch, "model metadata does not match its mean shape");
    }
    const ImagePyramid pyr = build_pyramid(img, static_cast<int>(count));

    PyramidResult result;
    FitState state;
    for (std::size_t li = 0; li < count; ++li) {
        const LevelConfig& cfg = sched.levels[li];
        const Image& level_img = pyr.levels[count - 1 - li];
        const int level_number = static_cast<int>(count - li);
        const ShapeModel level_model = model.with_phi(cfg.phi);

        FitState start;
        if (li == 0) {
            start = make_state(level_model, entry_modes(level_model, cfg, sched), sched.init_pose,
                               level_number);
        } else {
            start = make_state(level_model, transfer_modes(level_model, state.b, cfg),
                               transfer_pose(state.pose, cfg), level_number);
        }

        const EdgeMap fe = edge_map(level_img, cfg.median);
        const VectorField field = gvf(fe, {cfg.mu, cfg.gvf_iterations, cfg.gvf_tolerance});

        LevelOptions options;
        if (count == 1) {
            options.tolerance = sched.tolerance;
        }
        std::vector<FitState> steps = iterate_level(start, field, cfg, level_model, options);

        LevelResult lr;
        lr.level = level_number;
        lr.g = level_model.g;
        lr.iterations_run = static_cast<int>(steps.size());
        lr.gvf_iterations = field.iterations_run;
        lr.gvf_residual = field.final_residual;
        lr.aborted = static_cast<int>(steps.size()) < cfg.iterations &&
                     !(options.tolerance >= 0.0 && !steps.empty() && steps.back().movement < options.tolerance);
        result.levels.push_back(lr);

        state = steps.empty() ? start : steps.back();
        for (auto& s : steps) {
            result.history.push_back(std::move(s));
        }
    }
    result.final_state = state;
    result.contour = state.z_image;
    return result;
}

std::vector<Point2> fitted_masters(const FlatShape& contour, const SplineMeta& meta) {
    if (point_count(contour) != meta.expanded_count()) {
        throw Error(ErrorCode::DimensionMismatch, "contour length differs from the model layout");
    }
    std::vector<Point2> out;
    Eigen::Index offset = 0;
    for (int n : meta.expanded_parts()) {
        for (int i = 0; i < n; i += meta.epsilon + 1) {
            out.push_back(point_at(contour, offset + i));
        }
        offset += n;
    }
    return out;
}

} // namespace aspl
