#pragma once

// Editing sessions: an image, a model, an optional truth mask, the delivered
// contour and the edit log. Independent of any transport; the HTTP layer maps
// ServiceError statuses onto responses.

#include <aspl/image.hpp>
#include <aspl/io.hpp>
#include <aspl/metrics.hpp>
#include <aspl/segment.hpp>

#include <atomic>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace aspl {

class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

/// Named models and schedules available to sessions.
class Catalog {
public:
    void add_model(const std::string& id, ShapeModel model);
    void add_schedule(const std::string& id, PyramidSchedule schedule);
    /// Loads *.model and *.schedule files; ids are the file stems.
    void load_directory(const std::filesystem::path& dir);

    const ShapeModel* model(const std::string& id) const;
    const PyramidSchedule* schedule(const std::string& id) const;
    const std::map<std::string, ShapeModel>& models() const noexcept { return models_; }
    const std::map<std::string, PyramidSchedule>& schedules() const noexcept { return schedules_; }

private:
    std::map<std::string, ShapeModel> models_;
    std::map<std::string, PyramidSchedule> schedules_;
};

struct CreateRequest {
    Image image;
    std::string model_id;
    std::optional<BinaryMask> truth;
    bool study_mode = false;
};

struct Created {
    std::string id;
    std::string token;
};

enum class SegmentStatus { Idle, Running, Done, Failed };
const char* to_string(SegmentStatus s) noexcept;

struct SessionView {
    std::string id;
    SegmentStatus status = SegmentStatus::Idle;
    std::string error;
    bool study_mode = false;
    bool read_only = false;
    std::size_t moves = 0;
    /// Hidden in study mode until export.
    std::optional<double> theta_before;
};

/// One curve segment of one contour part, sampled at the requested density.
struct SegmentSamples {
    std::size_t part = 0;
    std::size_t segment = 0;
    std::vector<Point2> points;
};

struct MoveRequest {
    std::size_t index = 0;
    Point2 to;
    double t_ms = 0.0;
    /// Pointer-down time of the drag, if the client reports it.
    std::optional<double> t_down_ms;
    int density = 32;
};

struct MoveResult {
    std::size_t index = 0;
    std::size_t part = 0;
    std::size_t moves = 0;
    std::vector<SegmentSamples> segments;
};

struct ContourView {
    ShapeRecord masters;
    /// Every point with its role, masters followed by their slaves per gap.
    std::vector<Point2> points;
    std::vector<PointRole> roles;
    std::vector<SegmentSamples> segments;
};

struct ExportResult {
    std::string contour;
    std::string mask;
    std::string log;
    std::optional<EditMetrics> metrics;
    std::optional<double> theta_before;
    std::optional<double> theta_after;
};

class SessionStore {
public:
    explicit SessionStore(std::shared_ptr<const Catalog> catalog);
    ~SessionStore();
    SessionStore(const SessionStore&) = delete;
    SessionStore& operator=(const SessionStore&) = delete;

    const Catalog& catalog() const noexcept { return *catalog_; }

    Created create(CreateRequest request);
    SessionView view(const std::string& id) const;

    /// Starts a fit off the calling thread; `wait` blocks until it finishes.
    /// An empty schedule id fits one level at native resolution.
    SessionView segment(const std::string& id, const std::string& token, const std::string& schedule_id,
                        bool wait);
    /// Blocks until any running fit of the session ends.
    SessionView wait(const std::string& id) const;

    MoveResult move_point(const std::string& id, const std::string& token, const MoveRequest& request);
    ContourView contour(const std::string& id, int density) const;
    ExportResult export_session(const std::string& id, const std::string& token,
                                std::optional<double> t_ms);

    /// Display image: inverted in study mode.
    Image display_image(const std::string& id) const;
    std::optional<BinaryMask> truth(const std::string& id) const;

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;
    static void check_token(const Session& s, const std::string& token);

    std::shared_ptr<const Catalog> catalog_;
    mutable std::shared_mutex index_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::atomic<unsigned long> next_id_{1};
};

/// Default initial pose for native-resolution fits: the model mean centered
/// in the frame, spanning a quarter of the shorter side.
PoseParams default_pose(int width, int height);

} // namespace aspl
