#include <aspl/shape_model.hpp>

#include <aspl/error.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <algorithm>
#include <numeric>

namespace aspl {

std::vector<int> SplineMeta::expanded_parts() const {
    std::vector<int> out;
    out.reserve(parts.size());
    for (int masters : parts) {
        out.push_back(topology == Topology::Closed ? masters * (epsilon + 1)
                                                   : (masters - 1) * (epsilon + 1) + 1);
    }
    return out;
}

int SplineMeta::master_count() const { return std::accumulate(parts.begin(), parts.end(), 0); }

int SplineMeta::expanded_count() const {
    const auto e = expanded_parts();
    return std::accumulate(e.begin(), e.end(), 0);
}

int ShapeModel::nonzero_modes() const {
    int n = 0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        n += spectrum[i] > 0.0 ? 1 : 0;
    }
    return n;
}

ShapeModel ShapeModel::with_phi(double ratio) const {
    ShapeModel out = *this;
    out.phi = ratio;
    out.g = select_mode_count(spectrum, ratio);
    return out;
}

int select_mode_count(const Eigen::VectorXd& spectrum, double phi) {
    if (!(phi > 0.0 && phi < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "retention ratio must lie in (0, 1)");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        total += spectrum[i] > 0.0 ? spectrum[i] : 0.0;
    }
    if (total <= 0.0) {
        return 0;
    }
    double running = 0.0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        if (!(spectrum[i] > 0.0)) {
            return static_cast<int>(i);
        }
        running += spectrum[i];
        if (running / total > phi) {
            return static_cast<int>(i + 1);
        }
    }
    return static_cast<int>(spectrum.size());
}

Eigen::MatrixXd shape_covariance(std::span<const FlatShape> aligned, const FlatShape& mean) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(mean.size(), mean.size());
    for (const auto& x : aligned) {
        const Eigen::VectorXd d = x - mean;
        cov.noalias() += d * d.transpose();
    }
    return cov / static_cast<double>(aligned.size());
}

ShapeModel train(std::span<const FlatShape> aligned, double phi) {
    if (aligned.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "training needs at least two shapes");
    }
    const Eigen::Index dim = aligned[0].size();
    for (const auto& s : aligned) {
        if (s.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "training shapes differ in length");
        }
    }
    ShapeModel model;
    model.training_count = static_cast<int>(aligned.size());
    model.mean = FlatShape::Zero(dim);
    for (const auto& s : aligned) {
        model.mean += s;
    }
    model.mean /= static_cast<double>(aligned.size());

    const Eigen::MatrixXd cov = shape_covariance(aligned, model.mean);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
    }
    // Eigen returns ascending order.
    model.spectrum = solver.eigenvalues().reverse();
    model.basis = solver.eigenvectors().rowwise().reverse();
    const double top = model.spectrum.size() > 0 ? model.spectrum[0] : 0.0;
    for (Eigen::Index l = 0; l < model.spectrum.size(); ++l) {
        if (!(top > 0.0) || model.spectrum[l] < kZeroEigenRatio * top) {
            model.spectrum[l] = 0.0;
        }
        Eigen::Index arg = 0;
        model.basis.col(l).cwiseAbs().maxCoeff(&arg);
        if (model.basis(arg, l) < 0.0) {
            model.basis.col(l) *= -1.0;
        }
    }
    model.phi = phi;
    model.g = select_mode_count(model.spectrum, phi);
    model.weights = uniform_weights(dim / 2);
    return model;
}

FlatShape synthesize(const ShapeModel& model, const ModeVector& b) {
    if (b.size() != model.g) {
        throw Error(ErrorCode::DimensionMismatch, "mode vector length differs from g");
    }
    return model.mean + model.eigvecs() * b;
}

ModeVector project(const ShapeModel& model, const FlatShape& shape) {
    if (shape.size() != model.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "shape length differs from the model");
    }
    return model.eigvecs().transpose() * (shape - model.mean);
}

ModeVector clamp_modes(const ShapeModel& model, const ModeVector& b) {
    if (b.size() != model.g) {
        throw Error(ErrorCode::DimensionMismatch, "mode vector length differs from g");
    }
    ModeVector out = b;
    for (Eigen::Index l = 0; l < b.size(); ++l) {
        const double bound = 2.0 * std::sqrt(model.spectrum[l]);
        out[l] = std::clamp(b[l], -bound, bound);
    }
    return out;
}

double mahalanobis(const ShapeModel& model, const ModeVector& b) {
    if (b.size() != model.g) {
        throw Error(ErrorCode::DimensionMismatch, "mode vector length differs from g");
    }
    double sum = 0.0;
    for (Eigen::Index l = 0; l < b.size(); ++l) {
        if (model.spectrum[l] > 0.0) {
            sum += b[l] * b[l] / model.spectrum[l];
        }
    }
    return std::sqrt(sum);
}

ModeVector rescale_modes(const ShapeModel& model, const ModeVector& b, double d_max) {
    if (!(d_max > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "D_max must be positive");
    }
    const double dm = mahalanobis(model, b);
    if (dm <= d_max) {
        return b;
    }
    return b * (d_max / dm);
}

} // namespace aspl
