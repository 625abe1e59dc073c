#include "../support.hpp"
#include "expect_error.hpp"

#include <aspl/image.hpp>
#include <aspl/kernels.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace aspl;
using aspl::testing::Gen;

namespace {

Image random_image(Gen& gen, int w, int h) {
    Image img(w, h);
    for (double& v : img.data()) v = gen.uniform(0, 1);
    return img;
}

Image from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.begin()->size());
    Image img(w, h);
    int y = 0;
    for (const auto& r : rows) {
        int x = 0;
        for (double v : r) img.at(x++, y) = v;
        ++y;
    }
    return img;
}

} // namespace

TEST(ImageBasics, ConstructionAndClamping) {
    EXPECT_ASPL_ERROR(Image(0, 3), ErrorCode::InvalidArgument);
    const Image img = from_rows({{1, 2}, {3, 4}});
    EXPECT_EQ(img.clamped(-5, 0), 1.0);
    EXPECT_EQ(img.clamped(7, 9), 4.0);
    EXPECT_EQ(img.mean(), 2.5);
    EXPECT_EQ(invert(img).at(1, 1), -3.0);
}

TEST(Median, WindowAnchor) {
    EXPECT_EQ(window_anchor(1), 0);
    EXPECT_EQ(window_anchor(2), 0);
    EXPECT_EQ(window_anchor(3), 1);
    EXPECT_EQ(window_anchor(4), 1);
    EXPECT_EQ(window_anchor(5), 2);
}

TEST(Median, RemovesImpulse) {
    Image img(7, 7, 0.2);
    img.at(3, 3) = 1.0;
    const Image out = median_filter(img, 3, 3);
    for (double v : out.data()) EXPECT_EQ(v, 0.2);
}

TEST(Median, EvenWindowAveragesMiddle) {
    // 2x1 window starting at the output pixel: median of {x, x+1}.
    const Image img = from_rows({{0, 1, 5}});
    const Image out = median_filter(img, 2, 1);
    EXPECT_EQ(out.at(0, 0), 0.5);
    EXPECT_EQ(out.at(1, 0), 3.0);
    EXPECT_EQ(out.at(2, 0), 5.0);
}

TEST(Median, IdentityForUnitKernelAndErrors) {
    Gen gen(51);
    const Image img = random_image(gen, 9, 6);
    EXPECT_EQ(median_filter(img, 1, 1), img);
    EXPECT_ASPL_ERROR(median_filter(img, 0, 3), ErrorCode::InvalidArgument);
    EXPECT_ASPL_ERROR(median_filter(img, 3, 7), ErrorCode::KernelTooLarge);
}

// The median of a window lies between its minimum and maximum.
TEST(Median, BoundedByWindowExtremes) {
    Gen gen(52);
    for (int trial = 0; trial < 20; ++trial) {
        const int kw = gen.integer(1, 5);
        const int kh = gen.integer(1, 5);
        const Image img = random_image(gen, gen.integer(5, 20), gen.integer(5, 20));
        const Image out = median_filter(img, kw, kh);
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                double lo = 2, hi = -1;
                for (int j = 0; j < kh; ++j) {
                    for (int i = 0; i < kw; ++i) {
                        const double v =
                            img.clamped(x - window_anchor(kw) + i, y - window_anchor(kh) + j);
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                }
                EXPECT_GE(out.at(x, y), lo);
                EXPECT_LE(out.at(x, y), hi);
            }
        }
    }
}

TEST(EdgeMap, Step) {
    const Image img = from_rows({{0, 0, 1, 1}, {0, 0, 1, 1}, {0, 0, 1, 1}});
    const EdgeMap e = edge_map(img);
    for (int y = 0; y < 3; ++y) {
        EXPECT_EQ(e.at(0, y), 0.0);
        EXPECT_EQ(e.at(1, y), 0.5);
        EXPECT_EQ(e.at(2, y), 0.5);
        EXPECT_EQ(e.at(3, y), 0.0);
    }
}

TEST(EdgeMap, RampIsConstant) {
    Image img(8, 5);
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 8; ++x) img.at(x, y) = 0.1 * x;
    }
    const EdgeMap e = edge_map(img);
    for (double v : e.data()) EXPECT_NEAR(v, 0.1, 1e-15);
}

TEST(EdgeMap, ConstantAndMedianOption) {
    const Image img(6, 6, 0.4);
    const EdgeMap flat = edge_map(img);
    for (double v : flat.data()) EXPECT_EQ(v, 0.0);
    Image spike(6, 6, 0.4);
    spike.at(2, 2) = 1.0;
    const EdgeMap filtered = edge_map(spike, KernelSize{3, 3});
    for (double v : filtered.data()) EXPECT_EQ(v, 0.0);
}

TEST(Gvf, TimeStep) {
    EXPECT_EQ(gvf_time_step(0.25, 0.5), 0.5);
    EXPECT_EQ(gvf_time_step(0.25, 3.0), 0.25);
}

TEST(Gvf, ZeroMapGivesZeroField) {
    const VectorField f = gvf(EdgeMap(10, 8, 0.0));
    for (double v : f.u.data()) EXPECT_EQ(v, 0.0);
    for (double v : f.v.data()) EXPECT_EQ(v, 0.0);
    // A zero step change stops after one iteration.
    EXPECT_EQ(f.iterations_run, 1);
}

TEST(Gvf, Errors) {
    GvfOptions o;
    o.mu = 0;
    EXPECT_ASPL_ERROR(gvf(EdgeMap(4, 4), o), ErrorCode::InvalidArgument);
    o.mu = 0.1;
    o.max_iterations = -1;
    EXPECT_ASPL_ERROR(gvf(EdgeMap(4, 4), o), ErrorCode::InvalidArgument);
}

TEST(Gvf, EnergyNonIncreasingOnDisc) {
    const Image img = aspl::testing::disc_image(40, 40, {20, 20}, 10);
    GvfOptions o;
    o.mu = 0.2;
    o.max_iterations = 300;
    o.tolerance = 0;
    const VectorField f = gvf(edge_map(img), o);
    ASSERT_EQ(f.energy.size(), 301u);
    for (std::size_t i = 1; i < f.energy.size(); ++i) {
        EXPECT_LE(f.energy[i], f.energy[i - 1] * (1 + 1e-12));
    }
    const Gradient g = gradient(edge_map(img));
    EXPECT_NEAR(gvf_energy(f.u, f.v, g, o.mu), f.energy.back(), 1e-12 * f.energy.back());
}

// Far from the boundary the field points back toward it.
TEST(Gvf, PointsTowardDiscBoundary) {
    const Image img = aspl::testing::disc_image(48, 48, {24, 24}, 10);
    GvfOptions o;
    o.mu = 0.2;
    o.max_iterations = 400;
    const VectorField f = gvf(edge_map(img), o);
    EXPECT_LT(f.u.at(24 + 16, 24), 0.0);
    EXPECT_GT(f.u.at(24 - 16, 24), 0.0);
    EXPECT_LT(f.v.at(24, 24 + 16), 0.0);
    EXPECT_GT(f.v.at(24, 24 - 16), 0.0);
    EXPECT_GT(f.u.at(24 + 6, 24), 0.0);
}

TEST(Gvf, BilinearSample) {
    VectorField f;
    f.u = from_rows({{0, 1}, {2, 3}});
    f.v = from_rows({{0, 0}, {4, 4}});
    const Point2 mid = f.sample({0.5, 0.5});
    EXPECT_EQ(mid.x, 1.5);
    EXPECT_EQ(mid.y, 2.0);
    EXPECT_EQ(f.sample({1, 0}).x, 1.0);
    EXPECT_EQ(f.sample({-3, 9}).x, 2.0);
}

TEST(Pyramid, Sizes) {
    const ImagePyramid p = build_pyramid(Image(128, 100, 0.3), 3);
    ASSERT_EQ(p.levels.size(), 3u);
    EXPECT_EQ(p.levels[1].width(), 64);
    EXPECT_EQ(p.levels[2].width(), 32);
    EXPECT_EQ(p.levels[2].height(), 25);
    EXPECT_EQ(pyramid_reduce(Image(33, 9)).width(), 16);
    EXPECT_ASPL_ERROR(build_pyramid(Image(16, 16), 4), ErrorCode::TooManyLevels);
    EXPECT_ASPL_ERROR(build_pyramid(Image(16, 16), 0), ErrorCode::InvalidArgument);
}

TEST(Pyramid, ConstantPreservedAndImpulseSpread) {
    const Image c = pyramid_reduce(Image(20, 12, 0.7));
    for (double v : c.data()) EXPECT_NEAR(v, 0.7, 1e-15);
    Image imp(16, 16, 0.0);
    imp.at(8, 8) = 1.0;
    const Image r = pyramid_reduce(imp);
    // The impulse sits under tap 2 of output pixel 4 on each axis.
    EXPECT_NEAR(r.at(4, 4), 36.0 / 256, 1e-15);
    EXPECT_NEAR(r.at(3, 4), 6.0 / 256, 1e-15);
    double sum = 0;
    for (double v : r.data()) sum += v;
    EXPECT_NEAR(sum, 0.25, 1e-15);
}

TEST(Pyramid, MeanApproximatelyPreserved) {
    Gen gen(53);
    const Image img = random_image(gen, 64, 64);
    EXPECT_NEAR(pyramid_reduce(img).mean(), img.mean(), 0.01);
}

namespace {

struct Fields {
    Image u, v, fx, fy, b;
};

Fields random_fields(Gen& gen, int w, int h) {
    Fields f{random_image(gen, w, h), random_image(gen, w, h), random_image(gen, w, h),
             random_image(gen, w, h), Image(w, h)};
    for (std::size_t i = 0; i < f.b.size(); ++i) {
        f.b.data()[i] = f.fx.data()[i] * f.fx.data()[i] + f.fy.data()[i] * f.fy.data()[i];
    }
    return f;
}

} // namespace

TEST(KernelParity, MedianGradientReduceStep) {
    Gen gen(54);
    for (int trial = 0; trial < 10; ++trial) {
        const int w = gen.integer(5, 70);
        const int h = gen.integer(5, 70);
        const Image img = random_image(gen, w, h);
        const int kw = gen.integer(1, 5);
        const int kh = gen.integer(1, 5);
        Image a, b;
        kernels::median_filter(img, kw, kh, a);
        reference::median_filter(img, kw, kh, b);
        EXPECT_EQ(a, b);

        Image gxa, gya, gxb, gyb;
        kernels::gradient(img, gxa, gya);
        reference::gradient(img, gxb, gyb);
        EXPECT_EQ(gxa, gxb);
        EXPECT_EQ(gya, gyb);

        kernels::reduce(img, a);
        reference::reduce(img, b);
        ASSERT_TRUE(a.same_dims(b));
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(a.data()[i], b.data()[i], 1e-12);
        }

        const Fields f = random_fields(gen, w, h);
        Image ua, va, ub, vb;
        const double ca = kernels::gvf_step(f.u, f.v, f.fx, f.fy, f.b, 0.2, 0.3, ua, va);
        const double cb = reference::gvf_step(f.u, f.v, f.fx, f.fy, f.b, 0.2, 0.3, ub, vb);
        EXPECT_EQ(ca, cb);
        EXPECT_EQ(ua, ub);
        EXPECT_EQ(va, vb);

        const double ea = kernels::gvf_energy(f.u, f.v, f.fx, f.fy, f.b, 0.2);
        const double eb = reference::gvf_energy(f.u, f.v, f.fx, f.fy, f.b, 0.2);
        EXPECT_NEAR(ea, eb, 1e-12 * std::abs(eb));
    }
}
