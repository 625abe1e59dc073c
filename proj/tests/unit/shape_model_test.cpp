#include "../support.hpp"
#include "expect_error.hpp"

#include <aspl/shape_model.hpp>

#include <gtest/gtest.h>

using namespace aspl;
using aspl::testing::Gen;

namespace {

std::vector<FlatShape> random_set(Gen& gen, int r, int m) {
    std::vector<FlatShape> set;
    for (int k = 0; k < r; ++k) {
        FlatShape s(2 * m);
        for (auto& v : s) v = gen.uniform(-1, 1);
        set.push_back(s);
    }
    return set;
}

ShapeModel full_rank(std::span<const FlatShape> set) {
    ShapeModel model = train(set, 0.95);
    model.g = model.nonzero_modes();
    return model;
}

} // namespace

// Two shapes: deviations are +-d, so the covariance is d d^T.
TEST(Train, TwoShapeAnalytic) {
    FlatShape a(6), b(6);
    a << 0, 0, 2, 0, 1, 2;
    b << 0, 1, 2, 1, 1, 1;
    const std::vector<FlatShape> set{a, b};
    const ShapeModel model = train(set, 0.5);
    const FlatShape d = (a - b) / 2.0;
    EXPECT_LT((model.mean - (a + b) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(model.spectrum[0], d.squaredNorm(), 1e-14);
    for (Eigen::Index l = 1; l < model.spectrum.size(); ++l) {
        EXPECT_EQ(model.spectrum[l], 0.0);
    }
    EXPECT_EQ(model.g, 1);
    EXPECT_EQ(model.nonzero_modes(), 1);
    EXPECT_NEAR(std::abs(model.basis.col(0).dot(d.normalized())), 1.0, 1e-14);
}

TEST(Train, CovarianceMatchesOracle) {
    Gen gen(41);
    const auto set = random_set(gen, 7, 5);
    const ShapeModel model = train(set, 0.95);
    const auto oracle = aspl::testing::covariance_oracle(set);
    const Eigen::MatrixXd cov = shape_covariance(set, model.mean);
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < cov.cols(); ++j) {
            EXPECT_NEAR(cov(i, j), static_cast<double>(oracle[i][j]), 1e-14);
        }
    }
}

TEST(Train, OrthonormalSortedAndTracePreserving) {
    Gen gen(42);
    for (int trial = 0; trial < 30; ++trial) {
        const auto set = random_set(gen, gen.integer(2, 15), gen.integer(3, 12));
        const ShapeModel model = train(set, 0.9);
        const Eigen::Index n = model.dim();
        EXPECT_LT((model.basis.transpose() * model.basis - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(),
                  1e-12);
        for (Eigen::Index l = 1; l < n; ++l) {
            EXPECT_GE(model.spectrum[l - 1], model.spectrum[l]);
        }
        EXPECT_GE(model.spectrum.minCoeff(), 0.0);
        const double trace = shape_covariance(set, model.mean).trace();
        EXPECT_NEAR(model.spectrum.sum(), trace, 1e-12 * std::max(1.0, trace));
        EXPECT_LE(model.nonzero_modes(), static_cast<int>(set.size()) - 1);
    }
}

TEST(SelectModes, Examples) {
    Eigen::VectorXd s(4);
    s << 5, 3, 2, 0;
    EXPECT_EQ(select_mode_count(s, 0.4), 1);
    EXPECT_EQ(select_mode_count(s, 0.5), 2);
    EXPECT_EQ(select_mode_count(s, 0.8), 3);
    EXPECT_EQ(select_mode_count(s, 0.99), 3);
    EXPECT_EQ(select_mode_count(Eigen::VectorXd::Zero(3), 0.5), 0);
    EXPECT_ASPL_ERROR(select_mode_count(s, 0.0), ErrorCode::InvalidArgument);
    EXPECT_ASPL_ERROR(select_mode_count(s, 1.0), ErrorCode::InvalidArgument);
}

TEST(SelectModes, MonotoneInPhi) {
    Gen gen(43);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd s(gen.integer(1, 20));
        for (auto& v : s) v = gen.uniform(0, 1) < 0.2 ? 0.0 : gen.uniform(0, 10);
        std::sort(s.begin(), s.end(), std::greater<>());
        int previous = 0;
        for (double phi = 0.01; phi < 1.0; phi += 0.01) {
            const int g = select_mode_count(s, phi);
            EXPECT_GE(g, previous);
            EXPECT_LE(g, static_cast<int>((s.array() > 0).count()));
            previous = g;
        }
    }
}

TEST(Modes, ProjectionIsOrthogonal) {
    Gen gen(44);
    const auto set = random_set(gen, 9, 6);
    ShapeModel model = train(set, 0.8);
    FlatShape x(model.dim());
    for (auto& v : x) v = gen.uniform(-1, 1);
    const FlatShape residual = x - synthesize(model, project(model, x));
    EXPECT_LT((model.eigvecs().transpose() * residual).cwiseAbs().maxCoeff(), 1e-13);

    // Training shapes lie in the span of the nonzero modes.
    model = full_rank(set);
    for (const auto& s : set) {
        EXPECT_LT((synthesize(model, project(model, s)) - s).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Modes, DimensionChecks) {
    Gen gen(45);
    const auto set = random_set(gen, 5, 4);
    const ShapeModel model = train(set, 0.8);
    const ModeVector wrong = ModeVector::Zero(model.g + 1);
    EXPECT_ASPL_ERROR(synthesize(model, wrong), ErrorCode::DimensionMismatch);
    EXPECT_ASPL_ERROR(clamp_modes(model, wrong), ErrorCode::DimensionMismatch);
    EXPECT_ASPL_ERROR(mahalanobis(model, wrong), ErrorCode::DimensionMismatch);
    EXPECT_ASPL_ERROR(project(model, FlatShape::Zero(6)), ErrorCode::DimensionMismatch);
    EXPECT_ASPL_ERROR(rescale_modes(model, ModeVector::Zero(model.g), 0.0), ErrorCode::InvalidArgument);
    const std::vector<FlatShape> one{set[0]};
    EXPECT_ASPL_ERROR(train(one, 0.9), ErrorCode::InsufficientData);
}

namespace {

ShapeModel diagonal_model(std::initializer_list<double> eig) {
    ShapeModel m;
    const auto n = static_cast<Eigen::Index>(eig.size());
    m.mean = FlatShape::Zero(n);
    m.basis = Eigen::MatrixXd::Identity(n, n);
    m.spectrum.resize(n);
    Eigen::Index i = 0;
    for (double v : eig) m.spectrum[i++] = v;
    m.g = static_cast<int>(n);
    return m;
}

} // namespace

TEST(Clamp, Examples) {
    const ShapeModel m = diagonal_model({4, 1});
    ModeVector b(2);
    b << 5, -0.5;
    const ModeVector c = clamp_modes(m, b);
    EXPECT_EQ(c[0], 4.0);
    EXPECT_EQ(c[1], -0.5);
    b << -10, 3;
    EXPECT_EQ(clamp_modes(m, b), (ModeVector(2) << -4, 2).finished());
}

TEST(Rescale, Examples) {
    const ShapeModel m = diagonal_model({4, 1});
    ModeVector b(2);
    b << 6, 0;  // D_m = 3
    EXPECT_NEAR(mahalanobis(m, b), 3.0, 1e-15);
    const ModeVector r = rescale_modes(m, b, 1.5);
    EXPECT_NEAR(r[0], 3.0, 1e-15);
    EXPECT_NEAR(mahalanobis(m, r), 1.5, 1e-15);
    EXPECT_EQ(rescale_modes(m, b, 3.0), b);
}

TEST(ClampRescale, IdempotentAndBounded) {
    Gen gen(46);
    const ShapeModel m = diagonal_model({9, 4, 1, 0.25});
    for (int trial = 0; trial < 1000; ++trial) {
        ModeVector b(4);
        for (auto& v : b) v = gen.uniform(-10, 10);
        const ModeVector c = clamp_modes(m, b);
        EXPECT_EQ(clamp_modes(m, c), c);
        for (Eigen::Index l = 0; l < 4; ++l) {
            EXPECT_LE(std::abs(c[l]), 2.0 * std::sqrt(m.spectrum[l]));
        }
        // After the clamp, D_m never exceeds 2 sqrt(g).
        EXPECT_LE(mahalanobis(m, c), 2.0 * std::sqrt(4.0) + 1e-12);
        const double d_max = gen.uniform(0.1, 3);
        const ModeVector r = rescale_modes(m, c, d_max);
        EXPECT_LE(mahalanobis(m, r), d_max * (1 + 1e-12));
        const ModeVector rr = rescale_modes(m, r, d_max);
        EXPECT_LT((rr - r).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(WithPhi, ReselectsModes) {
    Gen gen(47);
    const auto set = random_set(gen, 12, 8);
    const ShapeModel model = train(set, 0.5);
    const ShapeModel wider = model.with_phi(0.99);
    EXPECT_GE(wider.g, model.g);
    EXPECT_EQ(wider.g, select_mode_count(model.spectrum, 0.99));
    EXPECT_EQ(wider.basis, model.basis);
}
