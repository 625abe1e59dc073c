#include <aspl/session.hpp>

#include <aspl/error.hpp>
#include <aspl/pipeline.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace aspl {

void Catalog::add_model(const std::string& id, ShapeModel model) { models_[id] = std::move(model); }

void Catalog::add_schedule(const std::string& id, PyramidSchedule schedule) {
    schedules_[id] = std::move(schedule);
}

void Catalog::load_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        files.push_back(entry.path());
    }
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot list " + dir.string());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        if (p.extension() == ".model") {
            add_model(p.stem().string(), read_model(p));
        } else if (p.extension() == ".schedule") {
            add_schedule(p.stem().string(), read_schedule(p));
        }
    }
}

const ShapeModel* Catalog::model(const std::string& id) const {
    const auto it = models_.find(id);
    return it == models_.end() ? nullptr : &it->second;
}

const PyramidSchedule* Catalog::schedule(const std::string& id) const {
    const auto it = schedules_.find(id);
    return it == schedules_.end() ? nullptr : &it->second;
}

const char* to_string(SegmentStatus s) noexcept {
    switch (s) {
    case SegmentStatus::Idle: return "idle";
    case SegmentStatus::Running: return "running";
    case SegmentStatus::Done: return "done";
    case SegmentStatus::Failed: return "failed";
    }
    return "unknown";
}

PoseParams default_pose(int width, int height) {
    return {0.0, std::min(width, height) / 4.0, (width - 1) / 2.0, (height - 1) / 2.0};
}

struct SessionStore::Session {
    std::string id;
    std::string token;
    Image image;
    std::string model_id;
    const ShapeModel* model = nullptr;
    std::optional<BinaryMask> truth;
    bool study_mode = false;

    // Everything below is guarded by `mutex`.
    mutable std::mutex mutex;
    SegmentStatus status = SegmentStatus::Idle;
    std::string error;
    std::optional<ShapeRecord> contour;
    EditSession log;
    bool read_only = false;
    unsigned long generation = 0;
    std::shared_future<void> job;
};

namespace {

std::string random_token() {
    std::random_device rd;
    char buf[33];
    for (int i = 0; i < 4; ++i) {
        std::snprintf(buf + 8 * i, 9, "%08x", static_cast<unsigned>(rd()));
    }
    return std::string(buf, 32);
}

/// Writer lock that reports contention instead of waiting.
std::unique_lock<std::mutex> writer_lock(std::mutex& m) {
    std::unique_lock<std::mutex> lock(m, std::try_to_lock);
    if (!lock.owns_lock()) {
        throw ServiceError(409, "another request is modifying this session");
    }
    return lock;
}

struct PointAddress {
    std::size_t part = 0;
    std::size_t master = 0;
};

/// Maps an index into the concatenated expanded points onto a master, or
/// explains why it cannot be moved.
PointAddress address_of(const ShapeRecord& contour, std::size_t index) {
    const auto sizes = contour.meta.expanded_parts();
    std::size_t offset = 0;
    for (std::size_t p = 0; p < sizes.size(); ++p) {
        const auto n = static_cast<std::size_t>(sizes[p]);
        if (index < offset + n) {
            const std::size_t local = index - offset;
            const auto stride = static_cast<std::size_t>(contour.meta.epsilon + 1);
            if (local % stride != 0) {
                throw ServiceError(404, "point " + std::to_string(index) +
                                            " is a slave point; only master points can be moved");
            }
            return {p, local / stride};
        }
        offset += n;
    }
    throw ServiceError(404, "unknown point index " + std::to_string(index));
}

std::vector<SegmentSamples> sample_segments(const std::vector<Point2>& masters, std::size_t part,
                                            const SplineMeta& meta, int density,
                                            const std::vector<std::size_t>& which) {
    const SplineConfig cfg = spline_config(meta, density);
    std::vector<SegmentSamples> out;
    for (std::size_t s : which) {
        out.push_back({part, s, sample_segment(masters, meta.topology, cfg, s, true)});
    }
    return out;
}

void check_density(int density) {
    if (density < 1 || density > 4096) {
        throw ServiceError(400, "density must lie in [1, 4096]");
    }
}

} // namespace

SessionStore::SessionStore(std::shared_ptr<const Catalog> catalog) : catalog_(std::move(catalog)) {}

SessionStore::~SessionStore() {
    std::vector<std::shared_future<void>> jobs;
    {
        std::unique_lock lock(index_mutex_);
        for (auto& [id, s] : sessions_) {
            std::lock_guard guard(s->mutex);
            if (s->job.valid()) {
                jobs.push_back(s->job);
            }
        }
    }
    for (auto& j : jobs) {
        j.wait();
    }
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) const {
    std::shared_lock lock(index_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw ServiceError(404, "unknown session " + id);
    }
    return it->second;
}

void SessionStore::check_token(const Session& s, const std::string& token) {
    if (token != s.token) {
        throw ServiceError(403, "session token does not match");
    }
}

Created SessionStore::create(CreateRequest request) {
    const ShapeModel* model = catalog_->model(request.model_id);
    if (model == nullptr) {
        throw ServiceError(404, "unknown model " + request.model_id);
    }
    if (request.image.width() <= 0) {
        throw ServiceError(400, "image is empty");
    }
    if (request.truth && (request.truth->width() != request.image.width() ||
                          request.truth->height() != request.image.height())) {
        throw ServiceError(422, "truth mask dimensions differ from the image");
    }
    if (request.study_mode && !request.truth) {
        throw ServiceError(422, "study mode needs a truth mask");
    }
    auto s = std::make_shared<Session>();
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06lu", next_id_.fetch_add(1));
    s->id = buf;
    s->token = random_token();
    s->image = std::move(request.image);
    s->model_id = request.model_id;
    s->model = model;
    s->truth = std::move(request.truth);
    s->study_mode = request.study_mode;
    {
        std::unique_lock lock(index_mutex_);
        sessions_[s->id] = s;
    }
    return {s->id, s->token};
}

SessionView SessionStore::view(const std::string& id) const {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    SessionView v;
    v.id = s->id;
    v.status = s->status;
    v.error = s->error;
    v.study_mode = s->study_mode;
    v.read_only = s->read_only;
    v.moves = s->log.moves();
    if (!s->study_mode || s->read_only) {
        v.theta_before = s->log.theta_before;
    }
    return v;
}

SessionView SessionStore::segment(const std::string& id, const std::string& token,
                                  const std::string& schedule_id, bool wait_for_result) {
    const auto s = find(id);
    check_token(*s, token);
    PyramidSchedule sched;
    if (schedule_id.empty()) {
        sched = single_level_schedule(s->image.width(), s->image.height(),
                                      default_pose(s->image.width(), s->image.height()));
    } else {
        const PyramidSchedule* found = catalog_->schedule(schedule_id);
        if (found == nullptr) {
            throw ServiceError(404, "unknown schedule " + schedule_id);
        }
        sched = *found;
    }
    {
        auto lock = writer_lock(s->mutex);
        if (s->read_only) {
            throw ServiceError(409, "session was exported and is read-only");
        }
        if (s->status == SegmentStatus::Running) {
            throw ServiceError(409, "segmentation already running");
        }
        s->status = SegmentStatus::Running;
        s->error.clear();
        s->contour.reset();
        s->log = EditSession{};
        const unsigned long generation = ++s->generation;
        // A weak reference keeps the stored future from owning its session.
        std::weak_ptr<Session> weak = s;
        s->job = std::async(std::launch::async, [weak, sched = std::move(sched), generation] {
                     const auto s = weak.lock();
                     if (!s) {
                         return;
                     }
                     std::optional<SegmentOutcome> outcome;
                     std::string failure;
                     try {
                         outcome = segment_image(s->image, *s->model, sched);
                     } catch (const Error& e) {
                         const char* cls = classify(e.code()) == ErrorClass::Numerical ? "numerical"
                                           : classify(e.code()) == ErrorClass::Schedule ? "schedule"
                                                                                        : "input";
                         failure = std::string(cls) + ": " + e.what();
                     } catch (const std::exception& e) {
                         failure = std::string("internal: ") + e.what();
                     }
                     std::lock_guard guard(s->mutex);
                     if (s->generation != generation) {
                         return;
                     }
                     if (outcome) {
                         s->contour = outcome->contour;
                         if (s->truth) {
                             s->log.theta_before = overlap(outcome->mask, *s->truth).theta;
                         }
                         s->status = SegmentStatus::Done;
                     } else {
                         s->error = failure;
                         s->status = SegmentStatus::Failed;
                     }
                 }).share();
    }
    if (wait_for_result) {
        return wait(id);
    }
    return view(id);
}

SessionView SessionStore::wait(const std::string& id) const {
    const auto s = find(id);
    std::shared_future<void> job;
    {
        std::lock_guard lock(s->mutex);
        job = s->job;
    }
    if (job.valid()) {
        job.wait();
    }
    return view(id);
}

MoveResult SessionStore::move_point(const std::string& id, const std::string& token,
                                    const MoveRequest& request) {
    check_density(request.density);
    if (!request.to.finite() || !std::isfinite(request.t_ms) ||
        (request.t_down_ms && !std::isfinite(*request.t_down_ms))) {
        throw ServiceError(400, "coordinates and timestamps must be finite");
    }
    const auto s = find(id);
    check_token(*s, token);
    auto lock = writer_lock(s->mutex);
    if (s->read_only) {
        throw ServiceError(409, "session was exported and is read-only");
    }
    if (s->status != SegmentStatus::Done || !s->contour) {
        throw ServiceError(409, "session has no contour to edit");
    }
    ShapeRecord& contour = *s->contour;
    const PointAddress at = address_of(contour, request.index);

    const double last = s->log.events.empty() ? s->log.start_ms.value_or(request.t_ms)
                                              : s->log.events.back().t_ms;
    if (request.t_ms < last) {
        throw ServiceError(422, "timestamps must not decrease");
    }
    if (request.t_down_ms && *request.t_down_ms > request.t_ms) {
        throw ServiceError(422, "pointer-down time follows the release time");
    }

    auto parts = split_parts(contour);
    std::vector<Point2>& masters = parts[at.part];
    const Point2 from = masters[at.master];
    masters[at.master] = request.to;
    try {
        ControlShape(masters, contour.meta.topology);
    } catch (const Error& e) {
        throw ServiceError(422, e.what());
    }

    std::size_t offset = 0;
    for (std::size_t p = 0; p < at.part; ++p) {
        offset += static_cast<std::size_t>(contour.meta.parts[p]);
    }
    contour.masters[offset + at.master] = request.to;
    if (s->log.events.empty() && !s->log.start_ms) {
        s->log.start_ms = request.t_down_ms.value_or(request.t_ms);
    }
    s->log.events.push_back({request.t_ms, request.index, from, request.to});

    MoveResult r;
    r.index = request.index;
    r.part = at.part;
    r.moves = s->log.moves();
    r.segments = sample_segments(masters, at.part, contour.meta, request.density,
                                 segments_affected_by(masters.size(), contour.meta.topology, at.master));
    return r;
}

ContourView SessionStore::contour(const std::string& id, int density) const {
    check_density(density);
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    if (s->status != SegmentStatus::Done || !s->contour) {
        throw ServiceError(409, "session has no contour");
    }
    ContourView v;
    v.masters = *s->contour;
    for (const auto& part : expanded_parts(v.masters)) {
        v.points.insert(v.points.end(), part.points().begin(), part.points().end());
        v.roles.insert(v.roles.end(), part.roles().begin(), part.roles().end());
    }
    const auto parts = split_parts(v.masters);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        std::vector<std::size_t> all(segment_count(parts[p].size(), v.masters.meta.topology));
        for (std::size_t k = 0; k < all.size(); ++k) {
            all[k] = k;
        }
        auto segs = sample_segments(parts[p], p, v.masters.meta, density, all);
        v.segments.insert(v.segments.end(), segs.begin(), segs.end());
    }
    return v;
}

ExportResult SessionStore::export_session(const std::string& id, const std::string& token,
                                          std::optional<double> t_ms) {
    const auto s = find(id);
    check_token(*s, token);
    auto lock = writer_lock(s->mutex);
    if (s->read_only) {
        throw ServiceError(409, "session was already exported");
    }
    if (s->status != SegmentStatus::Done || !s->contour) {
        throw ServiceError(409, "session has no contour to export");
    }
    if (t_ms) {
        if (!std::isfinite(*t_ms)) {
            throw ServiceError(400, "export time must be finite");
        }
        const double last = s->log.events.empty() ? s->log.start_ms.value_or(*t_ms)
                                                  : s->log.events.back().t_ms;
        if (*t_ms < last) {
            throw ServiceError(422, "export time precedes the last move");
        }
        s->log.end_ms = t_ms;
    } else if (!s->log.events.empty()) {
        s->log.end_ms = s->log.events.back().t_ms;
    }

    const BinaryMask mask = rasterize_record(*s->contour, s->image.width(), s->image.height());
    if (s->truth) {
        s->log.theta_after = overlap(mask, *s->truth).theta;
    }
    ExportResult r;
    r.contour = format_shape(*s->contour);
    r.mask = format_mask(mask);
    if (s->log.moves() > 0) {
        try {
            r.metrics = compute_metrics(s->log);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroEffort) {
                throw;
            }
            EditSession without = s->log;
            without.theta_after.reset();
            r.metrics = compute_metrics(without);
        }
    }
    r.log = format_edit_log(s->log);
    r.theta_before = s->log.theta_before;
    r.theta_after = s->log.theta_after;
    s->read_only = true;
    return r;
}

Image SessionStore::display_image(const std::string& id) const {
    const auto s = find(id);
    return s->study_mode ? invert(s->image) : s->image;
}

std::optional<BinaryMask> SessionStore::truth(const std::string& id) const {
    return find(id)->truth;
}

} // namespace aspl
