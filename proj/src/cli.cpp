#include <aspl/cli.hpp>

#include <aspl/error.hpp>
#include <aspl/image_io.hpp>
#include <aspl/io.hpp>
#include <aspl/metrics.hpp>
#include <aspl/pipeline.hpp>
#include <aspl/server.hpp>
#include <aspl/session.hpp>
#include <aspl/synth.hpp>
#include <aspl/text.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>

namespace aspl {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct CorpusEntry {
    std::string name;
    std::string split;
    fs::path shape;
    fs::path image;
    fs::path truth;
};

std::vector<CorpusEntry> read_corpus(const fs::path& dir) {
    const auto j = nlohmann::json::parse(read_file(dir / "corpus.json"));
    std::vector<CorpusEntry> out;
    for (const auto& it : j.at("items")) {
        out.push_back({it.at("name").get<std::string>(), it.at("split").get<std::string>(),
                       dir / it.at("shape").get<std::string>(), dir / it.at("image").get<std::string>(),
                       dir / it.at("truth").get<std::string>()});
    }
    return out;
}

/// Directories expand to their sorted files with the given extension.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs, const std::string& ext) {
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(in)) {
                if (e.path().extension() == ext) {
                    found.push_back(e.path());
                }
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.emplace_back(in);
        }
    }
    return out;
}

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

ojson pose_json(const PoseParams& p) {
    return {{"theta", p.theta}, {"s", p.s}, {"tau_x", p.tau_x}, {"tau_y", p.tau_y}};
}

ojson level_json(const LevelConfig& l) {
    const auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); };
    ojson j;
    j["width"] = l.width;
    j["height"] = l.height;
    j["median"] = l.median ? ojson({l.median->w, l.median->h}) : ojson(nullptr);
    j["iterations"] = l.iterations;
    j["c_t"] = opt(l.c_t);
    j["c_s"] = opt(l.c_s);
    j["c_x"] = opt(l.c_x);
    j["c_y"] = opt(l.c_y);
    j["c_b"] = opt(l.c_b);
    j["c_b2"] = opt(l.c_b2);
    j["phi"] = l.phi;
    j["psi"] = l.psi;
    j["mu"] = l.mu;
    j["gvf_iterations"] = l.gvf_iterations;
    j["gvf_tolerance"] = l.gvf_tolerance;
    j["d_max_factor"] = l.d_max_factor;
    return j;
}

struct SegmentArgs {
    std::string model;
    std::string image;
    std::string schedule;
    std::string channel = "luma";
    std::string out_contour;
    std::string out_mask;
    std::string manifest;
    int samples = 32;
};

ojson segment_manifest(const SegmentArgs& a, const Image& img, const ShapeModel& model,
                       const PyramidSchedule& sched, const SegmentOutcome& r) {
    ojson j;
    j["format"] = "aspl-run";
    j["version"] = 1;
    j["inputs"] = {{"model", a.model}, {"image", a.image}, {"schedule", a.schedule.empty() ? ojson(nullptr) : ojson(a.schedule)}};
    j["image"] = {{"width", img.width()}, {"height", img.height()}, {"channel", a.channel}};
    j["model"] = {{"dim", model.dim()},
                  {"g", model.g},
                  {"phi", model.phi},
                  {"training_count", model.training_count},
                  {"alpha", model.meta.alpha},
                  {"rho", model.meta.rho},
                  {"epsilon", model.meta.epsilon},
                  {"parts", model.meta.parts}};
    ojson levels = ojson::array();
    for (const auto& l : sched.levels) {
        levels.push_back(level_json(l));
    }
    ojson init_b = ojson::object();
    for (const auto& [l, c] : sched.init_b) {
        init_b[std::to_string(l)] = c;
    }
    j["schedule"] = {{"init_pose", pose_json(sched.init_pose)},
                     {"init_b", init_b},
                     {"tolerance", sched.tolerance},
                     {"single_level_early_exit", sched.levels.size() == 1},
                     {"levels", levels}};
    j["rendering"] = {{"samples_per_segment", a.samples}};
    ojson results = ojson::array();
    for (const auto& lr : r.fit.levels) {
        results.push_back({{"level", lr.level},
                           {"g", lr.g},
                           {"iterations_run", lr.iterations_run},
                           {"gvf_iterations_run", lr.gvf_iterations},
                           {"gvf_final_residual", lr.gvf_residual},
                           {"aborted", lr.aborted}});
    }
    j["levels"] = results;
    const FitState& f = r.fit.final_state;
    j["final"] = {{"pose", pose_json(f.pose)},
                  {"b", std::vector<double>(f.b.data(), f.b.data() + f.b.size())},
                  {"d_m", f.d_m},
                  {"d_max", f.d_max},
                  {"mask_pixels", r.mask.count()}};
    return j;
}

int cmd_train(const std::vector<std::string>& inputs, const std::string& corpus, const TrainOptions& opt,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
    std::vector<fs::path> files;
    if (!corpus.empty()) {
        for (const auto& e : read_corpus(corpus)) {
            if (e.split == "train") {
                files.push_back(e.shape);
            }
        }
    }
    const auto listed = expand_inputs(inputs, ".shape");
    files.insert(files.end(), listed.begin(), listed.end());
    if (files.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "training needs at least two shape files");
    }
    std::vector<ShapeRecord> shapes;
    for (const auto& f : files) {
        shapes.push_back(read_shape(f));
    }
    const TrainResult r = train_from_shapes(shapes, opt);
    write_model(out_path, r.model);
    out << "r " << r.model.training_count << "\n";
    out << "m " << r.model.meta.master_count() << " masters, " << r.model.dim() / 2 << " expanded points\n";
    out << "g " << r.model.g << " (phi " << format_number(r.model.phi) << ")\n";
    out << "alignment iterations " << r.aligned.iterations << "\n";
    out << "spectrum";
    for (Eigen::Index l = 0; l < r.model.nonzero_modes(); ++l) {
        out << " " << format_number(r.model.spectrum[l]);
    }
    out << "\n";
    if (r.model.nonzero_modes() == 0) {
        err << "warning: training shapes are identical after alignment; the spectrum is all zero\n";
    }
    return kExitOk;
}

int cmd_segment(const SegmentArgs& a, std::ostream& out) {
    const ShapeModel model = read_model(a.model);
    const Image img = read_image(a.image, parse_channel(a.channel));
    const PyramidSchedule sched = a.schedule.empty()
                                      ? single_level_schedule(img.width(), img.height(),
                                                              default_pose(img.width(), img.height()))
                                      : read_schedule(a.schedule);
    const SegmentOutcome r = segment_image(img, model, sched, a.samples);
    write_shape(a.out_contour, r.contour);
    if (!a.out_mask.empty()) {
        write_mask(a.out_mask, r.mask);
    }
    const std::string manifest = a.manifest.empty() ? a.out_contour + ".manifest.json" : a.manifest;
    write_file(manifest, segment_manifest(a, img, model, sched, r).dump(2) + "\n");
    out << "contour " << a.out_contour << "\n";
    out << "pixels " << r.mask.count() << "\n";
    return kExitOk;
}

BinaryMask load_prediction(const fs::path& p, int width, int height) {
    if (p.extension() == ".shape") {
        return rasterize_record(read_shape(p), width, height);
    }
    return read_mask(p);
}

int cmd_eval(std::vector<std::string> preds, std::vector<std::string> truths, const std::string& corpus,
             const std::string& pred_dir, const std::string& label, const std::string& report,
             std::ostream& out) {
    std::vector<std::string> names;
    if (!corpus.empty()) {
        if (pred_dir.empty()) {
            throw Error(ErrorCode::InvalidArgument, "--corpus needs --pred-dir");
        }
        for (const auto& e : read_corpus(corpus)) {
            if (e.split != "test") {
                continue;
            }
            const fs::path shape = fs::path(pred_dir) / (e.name + ".shape");
            const fs::path mask = fs::path(pred_dir) / (e.name + ".pbm");
            preds.push_back((fs::exists(mask) ? mask : shape).string());
            truths.push_back(e.truth.string());
        }
    }
    if (preds.size() != truths.size() || preds.empty()) {
        throw Error(ErrorCode::InvalidArgument, "give one --truth per --pred");
    }
    std::string text = "image theta tp fp fn\n";
    std::vector<double> thetas;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const BinaryMask truth = read_mask(truths[i]);
        const BinaryMask pred = load_prediction(preds[i], truth.width(), truth.height());
        const OverlapReport r = overlap(pred, truth);
        thetas.push_back(r.theta);
        text += fs::path(preds[i]).filename().string() + " " + format_number(r.theta) + " " + std::to_string(r.tp) +
                " " + std::to_string(r.fp) + " " + std::to_string(r.fn) + "\n";
    }
    const Summary s = summarize(thetas);
    text += "\nMethod Average Min Max\n";
    text += label + " " + fixed(s.mean) + "±" + fixed(s.sd) + " " + fixed(s.min) + " " + fixed(s.max) + "\n";
    text += "mean " + format_number(s.mean) + " sd " + format_number(s.sd) + " n " + std::to_string(s.n) + "\n";
    out << text;
    if (!report.empty()) {
        write_file(report, text);
    }
    return kExitOk;
}

int cmd_metrics(const std::string& log_path, std::ostream& out) {
    const EditSession s = parse_edit_log(read_file(log_path));
    const EditMetrics m = compute_metrics(s);
    out << "duration " << format_number(m.duration) << "\n";
    out << "moves " << m.moves << "\n";
    out << "manipulation " << format_number(m.manipulation) << "\n";
    out << "effort " << format_number(m.effort) << "\n";
    if (m.efficiency) {
        out << "efficiency " << format_number(*m.efficiency) << "\n";
    }
    return kExitOk;
}

int exit_code_for(const Error& e) {
    switch (classify(e.code())) {
    case ErrorClass::Input: return kExitInput;
    case ErrorClass::Numerical: return kExitNumerical;
    case ErrorClass::Schedule: return kExitSchedule;
    }
    return kExitInput;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Active spline model segmentation workbench", "aspl"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Train a shape model from shape files");
    std::vector<std::string> train_inputs;
    std::string train_corpus;
    std::string train_out;
    TrainOptions topt;
    train->add_option("shapes", train_inputs, "Shape files or directories of *.shape");
    train->add_option("--corpus", train_corpus, "Synthetic corpus directory; uses its training split");
    train->add_option("--phi", topt.phi, "Retained variance ratio")->capture_default_str();
    train->add_option("--epsilon", topt.epsilon, "Slave points per master gap")->capture_default_str();
    train->add_option("--alpha", topt.alpha, "Knot parameterization exponent")->capture_default_str();
    train->add_option("--rho", topt.rho, "Endpoint extension factor")->capture_default_str();
    train->add_option("-o,--out", train_out, "Model file to write")->required();

    auto* segment = app.add_subcommand("segment", "Fit a model to an image");
    SegmentArgs sa;
    segment->add_option("--model", sa.model)->required();
    segment->add_option("--image", sa.image)->required();
    segment->add_option("--schedule", sa.schedule, "Pyramid schedule; omitted fits one native level");
    segment->add_option("--channel", sa.channel, "luma, red, green or blue")->capture_default_str();
    segment->add_option("--out-contour", sa.out_contour)->required();
    segment->add_option("--out-mask", sa.out_mask);
    segment->add_option("--manifest", sa.manifest, "Run manifest (default: <contour>.manifest.json)");
    segment->add_option("--samples", sa.samples, "Curve samples per segment for the mask")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Overlap of predictions against truth masks");
    std::vector<std::string> preds;
    std::vector<std::string> truths;
    std::string eval_corpus;
    std::string pred_dir;
    std::string report;
    std::string label = "aspl";
    eval->add_option("--pred", preds, "Predicted mask (.pbm) or contour (.shape)");
    eval->add_option("--truth", truths, "Truth mask, paired with --pred in order");
    eval->add_option("--corpus", eval_corpus, "Evaluate the corpus test split");
    eval->add_option("--pred-dir", pred_dir, "Predictions named <item>.pbm or <item>.shape");
    eval->add_option("--label", label)->capture_default_str();
    eval->add_option("--report", report);

    auto* synth = app.add_subcommand("synth-corpus", "Generate a synthetic blob corpus");
    SynthOptions so;
    std::string synth_out;
    synth->add_option("--seed", so.seed)->capture_default_str();
    synth->add_option("--count", so.count)->capture_default_str();
    synth->add_option("--width", so.width)->capture_default_str();
    synth->add_option("--height", so.height)->capture_default_str();
    synth->add_option("--noise", so.noise)->capture_default_str();
    synth->add_option("-o,--out", synth_out)->required();

    auto* metrics = app.add_subcommand("metrics", "Recompute edit metrics from an exported log");
    std::string log_path;
    metrics->add_option("log", log_path)->required();

    auto* serve_cmd = app.add_subcommand("serve", "Run the editing session HTTP service");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string catalog_dir;
    if (const char* env = std::getenv("ASPL_CONFIG_DIR")) {
        catalog_dir = env;
    }
    serve_cmd->add_option("--host", host)->capture_default_str();
    serve_cmd->add_option("--port", port)->capture_default_str();
    serve_cmd->add_option("--catalog", catalog_dir, "Directory of *.model and *.schedule (env ASPL_CONFIG_DIR)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = e.get_exit_code();
        if (code == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (*train) {
            return cmd_train(train_inputs, train_corpus, topt, train_out, out, err);
        }
        if (*segment) {
            return cmd_segment(sa, out);
        }
        if (*eval) {
            return cmd_eval(preds, truths, eval_corpus, pred_dir, label, report, out);
        }
        if (*synth) {
            const auto items = synth_corpus(so);
            write_corpus(synth_out, items, so);
            out << "wrote " << items.size() << " items to " << synth_out << "\n";
            return kExitOk;
        }
        if (*metrics) {
            return cmd_metrics(log_path, out);
        }
        if (*serve_cmd) {
            auto catalog = std::make_shared<Catalog>();
            if (!catalog_dir.empty()) {
                catalog->load_directory(catalog_dir);
            }
            SessionStore store(catalog);
            out << "serving on " << host << ":" << port << "\n" << std::flush;
            serve(store, host, port);
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const nlohmann::json::exception& e) {
        err << "error: ParseError: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: IoError: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

} // namespace aspl
