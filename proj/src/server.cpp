#include <aspl/server.hpp>

#include <aspl/error.hpp>
#include <aspl/image_io.hpp>
#include <aspl/text.hpp>

#include <httplib.h>
#include <json.hpp>

#include <functional>

namespace aspl {

namespace {

using json = nlohmann::json;

const char* kJson = "application/json";

json flat_points(const std::vector<Point2>& pts) {
    json a = json::array();
    for (const Point2& p : pts) {
        a.push_back(p.x);
        a.push_back(p.y);
    }
    return a;
}

json segments_json(const std::vector<SegmentSamples>& segs) {
    json a = json::array();
    for (const auto& s : segs) {
        a.push_back({{"part", s.part}, {"segment", s.segment}, {"points", flat_points(s.points)}});
    }
    return a;
}

json view_json(const SessionView& v) {
    json j = {{"id", v.id},
              {"status", to_string(v.status)},
              {"study_mode", v.study_mode},
              {"read_only", v.read_only},
              {"moves", v.moves}};
    if (!v.error.empty()) {
        j["error"] = v.error;
    }
    if (v.theta_before) {
        j["theta_before"] = *v.theta_before;
    }
    return j;
}

json metrics_json(const EditMetrics& m) {
    json j = {{"duration", m.duration},
              {"moves", m.moves},
              {"manipulation", m.manipulation},
              {"effort", m.effort}};
    j["efficiency"] = m.efficiency ? json(*m.efficiency) : json(nullptr);
    return j;
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) {
        return json::object();
    }
    json j = json::parse(req.body);
    if (!j.is_object()) {
        throw ServiceError(400, "request body must be a JSON object");
    }
    return j;
}

int status_for(const Error& e) {
    if (e.code() == ErrorCode::ParseError) {
        return 400;
    }
    return classify(e.code()) == ErrorClass::Input ? 422 : 500;
}

void respond(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

/// Runs a handler, translating failures into JSON error responses.
void guarded(httplib::Response& res, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ServiceError& e) {
        respond(res, e.status(), {{"error", e.what()}});
    } catch (const Error& e) {
        respond(res, status_for(e), {{"error", e.what()}, {"code", to_string(e.code())}});
    } catch (const json::exception& e) {
        respond(res, 400, {{"error", std::string("malformed JSON: ") + e.what()}});
    } catch (const std::exception& e) {
        respond(res, 500, {{"error", e.what()}});
    }
}

std::string token_of(const httplib::Request& req) { return req.get_header_value("X-Session-Token"); }

} // namespace

void register_routes(httplib::Server& server, SessionStore& store) {
    server.Post("/sessions", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = parse_body(req);
            CreateRequest cr;
            cr.image = parse_image(body.at("image").get<std::string>(),
                                   parse_channel(body.value("channel", std::string("luma"))));
            cr.model_id = body.at("model").get<std::string>();
            if (body.contains("truth") && !body["truth"].is_null()) {
                cr.truth = parse_mask(body["truth"].get<std::string>());
            }
            cr.study_mode = body.value("study_mode", false);
            const int w = cr.image.width();
            const int h = cr.image.height();
            const bool study = cr.study_mode;
            const Created c = store.create(std::move(cr));
            respond(res, 201,
                    {{"id", c.id},
                     {"token", c.token},
                     {"width", w},
                     {"height", h},
                     {"study_mode", study},
                     {"display", {{"inverted", study}, {"truth_overlay", study}}}});
        });
    });

    server.Get(R"(/sessions/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { respond(res, 200, view_json(store.view(req.matches[1]))); });
    });

    server.Get(R"(/sessions/([^/]+)/image)", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            res.status = 200;
            res.set_content(format_pgm(store.display_image(req.matches[1]), false), "image/x-portable-graymap");
        });
    });

    server.Get(R"(/sessions/([^/]+)/truth)", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string id = req.matches[1];
            if (!store.view(id).study_mode) {
                throw ServiceError(404, "truth overlay is only served in study mode");
            }
            res.status = 200;
            res.set_content(format_mask(*store.truth(id)), "image/x-portable-bitmap");
        });
    });

    server.Post(R"(/sessions/([^/]+)/segment)", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = parse_body(req);
            const bool wait = body.value("wait", false) || req.get_param_value("wait") == "1";
            const SessionView v = store.segment(req.matches[1], token_of(req),
                                                body.value("schedule", std::string()), wait);
            if (v.status == SegmentStatus::Failed) {
                respond(res, 500, view_json(v));
            } else {
                respond(res, wait ? 200 : 202, view_json(v));
            }
        });
    });

    server.Patch(R"(/sessions/([^/]+)/points/(\d+))", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = parse_body(req);
            MoveRequest mr;
            mr.index = static_cast<std::size_t>(parse_integer(req.matches[2].str()));
            mr.to = {body.at("x").get<double>(), body.at("y").get<double>()};
            mr.t_ms = body.at("t_ms").get<double>();
            if (body.contains("t_down_ms")) {
                mr.t_down_ms = body["t_down_ms"].get<double>();
            }
            mr.density = body.value("density", 32);
            const MoveResult r = store.move_point(req.matches[1], token_of(req), mr);
            respond(res, 200,
                    {{"index", r.index}, {"part", r.part}, {"moves", r.moves}, {"segments", segments_json(r.segments)}});
        });
    });

    server.Get(R"(/sessions/([^/]+)/contour)", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            int density = 32;
            if (req.has_param("density")) {
                density = static_cast<int>(parse_integer(req.get_param_value("density")));
            }
            const ContourView v = store.contour(req.matches[1], density);
            json roles = json::array();
            for (PointRole r : v.roles) {
                roles.push_back(r == PointRole::Master ? "master" : "slave");
            }
            respond(res, 200,
                    {{"shape", format_shape(v.masters)},
                     {"points", flat_points(v.points)},
                     {"roles", roles},
                     {"density", density},
                     {"segments", segments_json(v.segments)}});
        });
    });

    server.Post(R"(/sessions/([^/]+)/export)", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = parse_body(req);
            std::optional<double> t;
            if (body.contains("t_ms")) {
                t = body["t_ms"].get<double>();
            }
            const ExportResult r = store.export_session(req.matches[1], token_of(req), t);
            json j = {{"contour", r.contour}, {"mask", r.mask}, {"log", r.log}};
            j["metrics"] = r.metrics ? metrics_json(*r.metrics) : json(nullptr);
            j["theta_before"] = r.theta_before ? json(*r.theta_before) : json(nullptr);
            j["theta_after"] = r.theta_after ? json(*r.theta_after) : json(nullptr);
            respond(res, 200, j);
        });
    });

    server.Get("/models", [&store](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            json a = json::array();
            for (const auto& [id, m] : store.catalog().models()) {
                a.push_back({{"id", id},
                             {"g", m.g},
                             {"phi", m.phi},
                             {"parts", m.meta.parts},
                             {"epsilon", m.meta.epsilon},
                             {"topology", m.meta.topology == Topology::Closed ? "closed" : "open"},
                             {"training_count", m.training_count}});
            }
            respond(res, 200, a);
        });
    });

    server.Get("/schedules", [&store](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            json a = json::array();
            for (const auto& [id, s] : store.catalog().schedules()) {
                json levels = json::array();
                for (const auto& l : s.levels) {
                    levels.push_back({{"width", l.width}, {"height", l.height}, {"iterations", l.iterations}});
                }
                a.push_back({{"id", id}, {"levels", levels}, {"text", format_schedule(s)}});
            }
            respond(res, 200, a);
        });
    });
}

void serve(SessionStore& store, const std::string& host, int port) {
    httplib::Server server;
    register_routes(server, store);
    if (!server.listen(host, port)) {
        throw Error(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
    }
}

} // namespace aspl
