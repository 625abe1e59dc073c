#include "expect_error.hpp"

#include <aspl/image_io.hpp>
#include <aspl/pipeline.hpp>
#include <aspl/server.hpp>
#include <aspl/session.hpp>
#include <aspl/synth.hpp>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace aspl;
using json = nlohmann::json;

namespace {

struct Shared {
    std::vector<SynthItem> items;
    std::shared_ptr<Catalog> catalog = std::make_shared<Catalog>();
};

const Shared& shared() {
    static const Shared s = [] {
        Shared out;
        SynthOptions o;
        o.count = 8;
        out.items = synth_corpus(o);
        std::vector<ShapeRecord> train;
        for (int i = 0; i < 6; ++i) train.push_back(out.items[i].shape);
        TrainOptions t;
        t.epsilon = 1;
        out.catalog->add_model("blob", train_from_shapes(train, t).model);
        out.catalog->add_schedule("synth", synth_schedule(o.width, o.height));
        return out;
    }();
    return s;
}

class Http : public ::testing::Test {
protected:
    void SetUp() override {
        store_ = std::make_unique<SessionStore>(shared().catalog);
        register_routes(server_, *store_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }

    void TearDown() override {
        server_.stop();
        thread_.join();
    }

    static json body(const httplib::Result& r) { return json::parse(r->body); }

    json create(bool study, bool with_truth, int item = 7) {
        json req = {{"image", format_pgm(shared().items[item].image, false)}, {"model", "blob"}, {"study_mode", study}};
        if (with_truth) req["truth"] = format_mask(shared().items[item].truth);
        auto r = client_->Post("/sessions", req.dump(), "application/json");
        EXPECT_EQ(r->status, 201) << r->body;
        return body(r);
    }

    httplib::Headers token(const json& created) { return {{"X-Session-Token", created["token"]}}; }

    json segment(const json& created) {
        auto r = client_->Post("/sessions/" + created["id"].get<std::string>() + "/segment", token(created),
                               json{{"schedule", "synth"}, {"wait", true}}.dump(), "application/json");
        EXPECT_EQ(r->status, 200) << r->body;
        return body(r);
    }

    httplib::Result patch(const json& created, std::size_t index, const json& req) {
        return client_->Patch("/sessions/" + created["id"].get<std::string>() + "/points/" + std::to_string(index),
                              token(created), req.dump(), "application/json");
    }

    json contour(const json& created) {
        auto r = client_->Get("/sessions/" + created["id"].get<std::string>() + "/contour?density=8");
        EXPECT_EQ(r->status, 200) << r->body;
        return body(r);
    }

    httplib::Result export_session(const json& created, const json& req) {
        return client_->Post("/sessions/" + created["id"].get<std::string>() + "/export", token(created), req.dump(),
                             "application/json");
    }

    std::unique_ptr<SessionStore> store_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::unique_ptr<httplib::Client> client_;
};

std::size_t first_of(const json& roles, const char* role) {
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (roles[i] == role) return i;
    }
    return roles.size();
}

} // namespace

TEST_F(Http, CatalogListings) {
    auto r = client_->Get("/models");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(body(r)[0]["id"], "blob");
    EXPECT_EQ(body(r)[0]["epsilon"], 1);
    r = client_->Get("/schedules");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(body(r)[0]["levels"].size(), 3u);
}

TEST_F(Http, CreateErrors) {
    auto r = client_->Post("/sessions", "{not json", "application/json");
    EXPECT_EQ(r->status, 400);
    json req = {{"image", format_pgm(shared().items[0].image, false)}, {"model", "nope"}};
    EXPECT_EQ(client_->Post("/sessions", req.dump(), "application/json")->status, 404);
    req["model"] = "blob";
    req["study_mode"] = true;
    EXPECT_EQ(client_->Post("/sessions", req.dump(), "application/json")->status, 422);
    req["study_mode"] = false;
    req["truth"] = format_mask(BinaryMask(5, 5));
    EXPECT_EQ(client_->Post("/sessions", req.dump(), "application/json")->status, 422);
    req.erase("truth");
    req["image"] = "P2\n2 2\n255\n1\n";
    EXPECT_EQ(client_->Post("/sessions", req.dump(), "application/json")->status, 400);
    EXPECT_EQ(client_->Get("/sessions/missing")->status, 404);
}

TEST_F(Http, SegmentEditExportFlow) {
    const json c = create(false, true);
    const std::string id = c["id"];
    // No contour yet.
    EXPECT_EQ(patch(c, 0, {{"x", 1}, {"y", 1}, {"t_ms", 0}})->status, 409);
    // Wrong token.
    auto bad = client_->Post("/sessions/" + id + "/segment", {{"X-Session-Token", "x"}}, "{}", "application/json");
    EXPECT_EQ(bad->status, 403);

    const json v = segment(c);
    EXPECT_EQ(v["status"], "done");
    ASSERT_TRUE(v.contains("theta_before"));
    EXPECT_GT(v["theta_before"].get<double>(), 0.8);

    const json before = contour(c);
    const std::size_t master = first_of(before["roles"], "master");
    const std::size_t slave = first_of(before["roles"], "slave");
    ASSERT_LT(slave, before["roles"].size());
    EXPECT_EQ(patch(c, slave, {{"x", 1}, {"y", 1}, {"t_ms", 10}})->status, 404);
    EXPECT_EQ(patch(c, 9999, {{"x", 1}, {"y", 1}, {"t_ms", 10}})->status, 404);

    // Moving a master away and back restores the contour exactly.
    const double x0 = before["points"][2 * master];
    const double y0 = before["points"][2 * master + 1];
    auto r = patch(c, master, {{"x", x0 + 4}, {"y", y0 - 3}, {"t_ms", 1000}, {"t_down_ms", 400}});
    ASSERT_EQ(r->status, 200) << r->body;
    EXPECT_EQ(body(r)["moves"], 1);
    EXPECT_FALSE(body(r)["segments"].empty());
    EXPECT_NE(contour(c)["segments"], before["segments"]);
    EXPECT_EQ(patch(c, master, {{"x", x0}, {"y", y0}, {"t_ms", 500}})->status, 422);
    r = patch(c, master, {{"x", x0}, {"y", y0}, {"t_ms", 3000}});
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(contour(c)["segments"], before["segments"]);
    EXPECT_EQ(contour(c)["shape"], before["shape"]);

    EXPECT_EQ(export_session(c, {{"t_ms", 2000}})->status, 422);
    r = export_session(c, {{"t_ms", 5400}});
    ASSERT_EQ(r->status, 200) << r->body;
    const json e = body(r);
    EXPECT_NEAR(e["metrics"]["duration"].get<double>(), 5.0, 1e-12);
    EXPECT_EQ(e["metrics"]["moves"], 2);
    EXPECT_NEAR(e["metrics"]["manipulation"].get<double>(), 2.5, 1e-12);
    EXPECT_NEAR(e["metrics"]["effort"].get<double>(), 12.5, 1e-12);
    // The edit returned the shape to where it began.
    EXPECT_EQ(e["theta_after"], e["theta_before"]);
    const EditSession log = parse_edit_log(e["log"].get<std::string>());
    EXPECT_EQ(log.start_ms, 400.0);
    EXPECT_EQ(log.moves(), 2u);
    EXPECT_EQ(format_edit_log(log), e["log"].get<std::string>());

    // Exported sessions are read-only.
    EXPECT_EQ(patch(c, master, {{"x", x0}, {"y", y0}, {"t_ms", 6000}})->status, 409);
    EXPECT_EQ(export_session(c, json::object())->status, 409);
    EXPECT_TRUE(body(client_->Get("/sessions/" + id))["read_only"].get<bool>());
}

TEST_F(Http, ExportWithoutMovesHasNoMetrics) {
    const json c = create(false, false);
    segment(c);
    auto r = export_session(c, json::object());
    ASSERT_EQ(r->status, 200) << r->body;
    const json e = body(r);
    EXPECT_TRUE(e["metrics"].is_null());
    EXPECT_TRUE(e["theta_after"].is_null());
    EXPECT_EQ(parse_mask(e["mask"].get<std::string>()).width(), 128);
    EXPECT_NO_THROW(parse_shape(e["contour"].get<std::string>()));
}

TEST_F(Http, StudyModeHidesOverlapAndInvertsDisplay) {
    const json c = create(true, true);
    EXPECT_TRUE(c["display"]["inverted"].get<bool>());
    const json v = segment(c);
    EXPECT_FALSE(v.contains("theta_before"));
    auto img = client_->Get("/sessions/" + c["id"].get<std::string>() + "/image");
    ASSERT_EQ(img->status, 200);
    const Image shown = parse_image(img->body);
    const Image& original = shared().items[7].image;
    EXPECT_NEAR(shown.at(3, 3), 1.0 - original.at(3, 3), 1e-12);
    auto truth = client_->Get("/sessions/" + c["id"].get<std::string>() + "/truth");
    ASSERT_EQ(truth->status, 200);
    EXPECT_EQ(parse_mask(truth->body), shared().items[7].truth);

    const json cv = contour(c);
    const std::size_t m = first_of(cv["roles"], "master");
    ASSERT_EQ(patch(c, m, {{"x", cv["points"][2 * m].get<double>() + 2}, {"y", cv["points"][2 * m + 1]}, {"t_ms", 100}})
                  ->status,
              200);
    const json e = body(export_session(c, {{"t_ms", 2100}}));
    ASSERT_TRUE(e["theta_before"].is_number());
    ASSERT_TRUE(e["theta_after"].is_number());
    EXPECT_TRUE(e["metrics"]["efficiency"].is_number());
}

TEST_F(Http, TruthNotServedOutsideStudyMode) {
    const json c = create(false, true);
    EXPECT_EQ(client_->Get("/sessions/" + c["id"].get<std::string>() + "/truth")->status, 404);
    EXPECT_EQ(client_->Get("/sessions/" + c["id"].get<std::string>() + "/contour")->status, 409);
    segment(c);
    EXPECT_EQ(client_->Get("/sessions/" + c["id"].get<std::string>() + "/contour?density=0")->status, 400);
}

TEST(Store, DefaultPoseCentersMean) {
    const PoseParams p = default_pose(200, 100);
    EXPECT_EQ(p.tau_x, 99.5);
    EXPECT_EQ(p.tau_y, 49.5);
    EXPECT_GT(p.s, 0.0);
}

TEST(Store, ConcurrentSegmentIsRejected) {
    SessionStore store(shared().catalog);
    CreateRequest req;
    req.image = shared().items[6].image;
    req.model_id = "blob";
    const Created c = store.create(std::move(req));
    store.segment(c.id, c.token, "synth", false);
    // Either still running (409) or already done; both leave a finished fit.
    try {
        store.segment(c.id, c.token, "synth", false);
    } catch (const ServiceError& e) {
        EXPECT_EQ(e.status(), 409);
    }
    EXPECT_EQ(store.wait(c.id).status, SegmentStatus::Done);
}
