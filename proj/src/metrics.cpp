#include <aspl/metrics.hpp>

#include <aspl/error.hpp>
#include <aspl/text.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aspl {

double overlap_ratio(std::size_t tp, std::size_t fp, std::size_t fn) {
    const std::size_t denom = tp + fp + fn;
    if (denom == 0) {
        return 1.0;
    }
    return static_cast<double>(tp) / static_cast<double>(denom);
}

OverlapReport overlap(const BinaryMask& pred, const BinaryMask& truth) {
    if (!pred.same_dims(truth)) {
        throw Error(ErrorCode::DimensionMismatch, "prediction and truth masks differ in size");
    }
    OverlapReport r;
    const auto p = pred.bits();
    const auto t = truth.bits();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] && t[i]) {
            ++r.tp;
        } else if (p[i]) {
            ++r.fp;
        } else if (t[i]) {
            ++r.fn;
        }
    }
    r.theta = overlap_ratio(r.tp, r.fp, r.fn);
    return r;
}

double EditSession::duration() const {
    if (events.empty() && !(start_ms && end_ms)) {
        return 0.0;
    }
    const double start = start_ms ? *start_ms : events.front().t_ms;
    const double end = end_ms ? *end_ms : events.back().t_ms;
    return (end - start) / 1000.0;
}

double manipulation(double duration_s, double moves) {
    if (!(moves > 0.0)) {
        throw Error(ErrorCode::NoActions, "no moves recorded");
    }
    return duration_s / moves;
}

double effort(double duration_s, double moves) {
    return manipulation(duration_s, moves) * duration_s;
}

double efficiency(double delta_theta, double effort_value) {
    if (effort_value == 0.0) {
        throw Error(ErrorCode::ZeroEffort, "edit effort is zero");
    }
    return delta_theta * 100.0 / effort_value;
}

double manipulation(const EditSession& session) {
    return manipulation(session.duration(), static_cast<double>(session.moves()));
}

double effort(const EditSession& session) {
    return effort(session.duration(), static_cast<double>(session.moves()));
}

double efficiency(const EditSession& session) {
    if (!session.theta_before || !session.theta_after) {
        throw Error(ErrorCode::InvalidArgument, "efficiency needs overlap before and after the edit");
    }
    return efficiency(*session.theta_after - *session.theta_before, effort(session));
}

EditMetrics compute_metrics(const EditSession& session) {
    EditMetrics m;
    m.duration = session.duration();
    m.moves = session.moves();
    m.manipulation = manipulation(session);
    m.effort = effort(session);
    if (session.theta_before && session.theta_after) {
        m.efficiency = efficiency(session);
    }
    return m;
}

std::string format_edit_log(const EditSession& session) {
    std::string out = "aspl-editlog 1\n";
    if (session.start_ms) {
        out += "start " + format_number(*session.start_ms) + "\n";
    }
    for (const EditEvent& e : session.events) {
        out += "move " + format_number(e.t_ms) + " " + std::to_string(e.index) + " " +
               format_number(e.from.x) + " " + format_number(e.from.y) + " " + format_number(e.to.x) +
               " " + format_number(e.to.y) + "\n";
    }
    if (session.end_ms) {
        out += "end " + format_number(*session.end_ms) + "\n";
    }
    if (session.theta_before) {
        out += "theta_before " + format_number(*session.theta_before) + "\n";
    }
    if (session.theta_after) {
        out += "theta_after " + format_number(*session.theta_after) + "\n";
    }
    return out;
}

EditSession parse_edit_log(std::string_view text) {
    const auto lines = content_lines(text);
    if (lines.empty() || split_words(lines.front()) != std::vector<std::string_view>{"aspl-editlog", "1"}) {
        throw Error(ErrorCode::ParseError, "missing 'aspl-editlog 1' header");
    }
    EditSession s;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto w = split_words(lines[i]);
        const auto expect = [&](std::size_t n) {
            if (w.size() != n) {
                throw Error(ErrorCode::ParseError, "malformed edit log line: " + std::string(lines[i]));
            }
        };
        if (w[0] == "start") {
            expect(2);
            s.start_ms = parse_number(w[1]);
        } else if (w[0] == "end") {
            expect(2);
            s.end_ms = parse_number(w[1]);
        } else if (w[0] == "move") {
            expect(7);
            const long idx = parse_integer(w[2]);
            if (idx < 0) {
                throw Error(ErrorCode::ParseError, "negative point index in edit log");
            }
            s.events.push_back({parse_number(w[1]), static_cast<std::size_t>(idx),
                                {parse_number(w[3]), parse_number(w[4])},
                                {parse_number(w[5]), parse_number(w[6])}});
        } else if (w[0] == "theta_before") {
            expect(2);
            s.theta_before = parse_number(w[1]);
        } else if (w[0] == "theta_after") {
            expect(2);
            s.theta_after = parse_number(w[1]);
        } else {
            throw Error(ErrorCode::ParseError, "unknown edit log record '" + std::string(w[0]) + "'");
        }
    }
    return s;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.n = values.size();
    if (values.empty()) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

} // namespace aspl
