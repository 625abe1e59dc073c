#include <aspl/pipeline.hpp>

#include <aspl/error.hpp>

namespace aspl {

TrainResult train_from_shapes(std::span<const ShapeRecord> shapes, const TrainOptions& options) {
    if (shapes.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "training needs at least two shapes");
    }
    if (options.epsilon < 0) {
        throw Error(ErrorCode::InvalidArgument, "epsilon must be nonnegative");
    }
    SplineMeta meta = shapes.front().meta;
    meta.alpha = options.alpha;
    meta.rho = options.rho;
    meta.epsilon = options.epsilon;
    spline_config(meta).validate();
    for (const ShapeRecord& s : shapes) {
        if (s.meta.parts != meta.parts || s.meta.topology != meta.topology) {
            throw Error(ErrorCode::DimensionMismatch,
                        "training shapes must share topology and master count per part");
        }
    }

    std::vector<FlatShape> expanded;
    expanded.reserve(shapes.size());
    for (const ShapeRecord& s : shapes) {
        const Normalized n = normalize(to_flat(s.masters));
        ShapeRecord rec{meta, to_points(n.shape)};
        expanded.push_back(expanded_flat(rec));
    }

    TrainResult out;
    out.aligned = align_set(expanded, options.align);
    out.model = train(out.aligned.aligned, options.phi);
    out.model.weights = out.aligned.weights;
    out.model.meta = meta;
    return out;
}

SegmentOutcome segment_image(const Image& img, const ShapeModel& model, const PyramidSchedule& sched,
                             int samples_per_segment) {
    SegmentOutcome out;
    out.fit = run_pyramid(img, model, sched);
    out.contour.meta = model.meta;
    out.contour.masters = fitted_masters(out.fit.contour, model.meta);
    out.mask = rasterize_record(out.contour, img.width(), img.height(), samples_per_segment);
    return out;
}

} // namespace aspl
