#pragma once

// Overlap accuracy and edit-usability metrics, plus the line-oriented edit log
// that lets them be recomputed offline.

#include <aspl/geometry.hpp>
#include <aspl/raster.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aspl {

struct OverlapReport {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double theta = 0.0;
};

/// theta = tp / (tp + fp + fn); two empty masks overlap perfectly.
OverlapReport overlap(const BinaryMask& pred, const BinaryMask& truth);
double overlap_ratio(std::size_t tp, std::size_t fp, std::size_t fn);

/// One completed drag of one master point. Times are client milliseconds.
struct EditEvent {
    double t_ms = 0.0;
    std::size_t index = 0;
    Point2 from;
    Point2 to;

    friend bool operator==(const EditEvent&, const EditEvent&) = default;
};

struct EditSession {
    /// First pointer-down; defaults to the first event time.
    std::optional<double> start_ms;
    /// Export time; defaults to the last event time.
    std::optional<double> end_ms;
    std::vector<EditEvent> events;
    std::optional<double> theta_before;
    std::optional<double> theta_after;

    std::size_t moves() const noexcept { return events.size(); }
    /// Seconds from first interaction to the end mark.
    double duration() const;
};

/// Formula forms over plain numbers, e.g. cohort means with fractional moves.
double manipulation(double duration_s, double moves);
double effort(double duration_s, double moves);
double efficiency(double delta_theta, double effort_value);

double manipulation(const EditSession& session);
double effort(const EditSession& session);
double efficiency(const EditSession& session);

struct EditMetrics {
    double duration = 0.0;
    std::size_t moves = 0;
    double manipulation = 0.0;
    double effort = 0.0;
    std::optional<double> efficiency;
};

/// Throws NoActions without moves. Efficiency is present only when both
/// thetas are known; ZeroEffort then propagates.
EditMetrics compute_metrics(const EditSession& session);

std::string format_edit_log(const EditSession& session);
EditSession parse_edit_log(std::string_view text);

/// Mean, sample standard deviation, min and max.
struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

Summary summarize(const std::vector<double>& values);

} // namespace aspl
