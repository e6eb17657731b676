#include "shapefit/shape_model.hpp"

#include "shapefit/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace shapefit {

namespace {

// Eigenvalues below either bound are rounding noise, not shape variance.
constexpr double kAbsoluteVarianceFloor = 1e-18;
constexpr double kRelativeVarianceFloor = 1e-12;

std::uint64_t hash_corpus(const std::vector<Shape>& corpus, const std::vector<std::size_t>& order)
{
    // FNV-1a over the IEEE-754 bit patterns.
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t word) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (word >> (8 * byte)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(corpus.size());
    for (std::size_t idx : order) {
        const Shape& s = corpus[idx];
        mix(s.size());
        for (const auto& p : s) {
            mix(std::bit_cast<std::uint64_t>(p.x()));
            mix(std::bit_cast<std::uint64_t>(p.y()));
        }
    }
    return h;
}

void normalize_mode_sign(Eigen::Ref<Eigen::VectorXd> mode)
{
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < mode.size(); ++i) {
        if (std::abs(mode[i]) > best) {
            best = std::abs(mode[i]);
            arg = i;
        }
    }
    if (mode[arg] < 0.0) {
        mode = -mode;
    }
}

}  // namespace

ShapeModel principal_components(const PointDistributionMatrix& pdm, double variance_fraction,
                                Eigen::VectorXd* spectrum)
{
    if (!(variance_fraction > 0.0 && variance_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "variance fraction must lie in (0, 1]");
    }
    const Eigen::Index k = pdm.rows.rows();
    if (k < 2) {
        throw Error(ErrorCode::CorpusTooSmall, "need at least 2 shapes, got " + std::to_string(k));
    }

    ShapeModel model;
    model.variance_fraction = variance_fraction;
    model.mean = pdm.rows.colwise().mean().transpose();

    const Eigen::MatrixXd centered = pdm.rows.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd covariance = (centered.transpose() * centered) / static_cast<double>(k - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::DegenerateShape, "eigen-decomposition of the shape covariance failed");
    }
    // Ascending from Eigen; flip to non-increasing.
    const Eigen::VectorXd values = solver.eigenvalues().reverse();
    const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
    if (spectrum != nullptr) {
        *spectrum = values;
    }

    const double largest = values.size() > 0 ? values[0] : 0.0;
    const double floor = std::max(kAbsoluteVarianceFloor, kRelativeVarianceFloor * largest);
    Eigen::Index positive = 0;
    while (positive < values.size() && positive < k - 1 && values[positive] > floor) {
        ++positive;
    }

    const double total = values.head(positive).sum();
    Eigen::Index t = 0;
    double cumulative = 0.0;
    while (t < positive) {
        cumulative += values[t];
        ++t;
        if (cumulative >= variance_fraction * total) {
            break;
        }
    }

    model.eigenvalues = values.head(t);
    model.modes = vectors.leftCols(t);
    for (Eigen::Index j = 0; j < t; ++j) {
        normalize_mode_sign(model.modes.col(j));
    }
    return model;
}

BuildResult build_model_with_report(const std::vector<Shape>& corpus, const BuildOptions& options)
{
    if (corpus.size() < 2) {
        throw Error(ErrorCode::CorpusTooSmall, "build_model: need at least 2 shapes, got "
                                                   + std::to_string(corpus.size()));
    }

    BuildResult result;
    result.alignment = generalized_procrustes(corpus, options.procrustes);

    const Eigen::VectorXd reference = result.alignment.mean.flatten();
    const double reference_norm = reference.squaredNorm();
    const Eigen::Index cols = reference.size();

    result.pdm.rows.resize(static_cast<Eigen::Index>(corpus.size()), cols);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const Eigen::VectorXd row = result.alignment.aligned[i].flatten();
        // Tangent-space projection: rescale so that <row, mean> == |mean|^2.
        const double along = row.dot(reference);
        if (!(along > 0.0)) {
            throw Error(ErrorCode::DegenerateShape, "build_model: shape " + std::to_string(i)
                                                        + " is orthogonal to the Procrustes mean");
        }
        result.pdm.rows.row(static_cast<Eigen::Index>(i)) = (row * (reference_norm / along)).transpose();
    }

    // PCA sees the rows in canonical order so that reordering the corpus
    // cannot change the model, not even in the last bit.
    const std::vector<std::size_t> order = canonical_order(corpus);
    PointDistributionMatrix sorted;
    sorted.rows.resize(result.pdm.rows.rows(), cols);
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.rows.row(static_cast<Eigen::Index>(i)) = result.pdm.rows.row(static_cast<Eigen::Index>(order[i]));
    }
    result.model = principal_components(sorted, options.variance_fraction, &result.spectrum);
    result.model.corpus_hash = hash_corpus(corpus, order);
    return result;
}

ShapeModel build_model(const std::vector<Shape>& corpus, double variance_fraction)
{
    BuildOptions options;
    options.variance_fraction = variance_fraction;
    return build_model_with_report(corpus, options).model;
}

Shape reconstruct(const ShapeModel& model, const Eigen::VectorXd& b)
{
    if (b.size() != model.t()) {
        throw Error(ErrorCode::ShapeArity, "reconstruct: model has " + std::to_string(model.t())
                                               + " modes, weight vector has " + std::to_string(b.size()));
    }
    if (model.t() == 0) {
        return Shape::from_flat(model.mean);
    }
    return Shape::from_flat(model.mean + model.modes * b);
}

Eigen::VectorXd project(const ShapeModel& model, const Shape& aligned)
{
    if (aligned.size() != model.n_points()) {
        throw Error(ErrorCode::ShapeArity, "project: model has " + std::to_string(model.n_points())
                                               + " points, shape has " + std::to_string(aligned.size()));
    }
    if (model.t() == 0) {
        return Eigen::VectorXd(0);
    }
    return model.modes.transpose() * (aligned.flatten() - model.mean);
}

FitResult fit(const ShapeModel& model, const Shape& observed, const FitOptions& options)
{
    if (observed.size() != model.n_points()) {
        throw Error(ErrorCode::ShapeArity, "fit: model has " + std::to_string(model.n_points())
                                               + " points, observation has " + std::to_string(observed.size()));
    }
    require_finite(observed, "fit");
    if (!(observed.rms_radius() > 0.0)) {
        throw Error(ErrorCode::DegenerateShape, "fit: observed landmarks coincide");
    }

    const Eigen::VectorXd limit = options.clamp_sigmas * model.eigenvalues.cwiseSqrt();

    FitResult result;
    result.b = Eigen::VectorXd::Zero(model.t());

    SimilarityFit pose = solve_similarity(reconstruct(model, result.b), observed);
    result.objective.push_back(pose.residual);
    result.clamp_active.push_back(false);

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        const Shape in_model_space = apply_transform(pose.transform.inverse(), observed);
        Eigen::VectorXd b = project(model, in_model_space);
        bool clamped = false;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            const double lo = -limit[j];
            const double hi = limit[j];
            if (b[j] < lo || b[j] > hi) {
                b[j] = std::clamp(b[j], lo, hi);
                clamped = true;
            }
        }

        SimilarityFit next = solve_similarity(reconstruct(model, b), observed);
        const double decrease = pose.residual - next.residual;
        result.iterations = iter;

        // Each substep is a global minimiser, so an increase is rounding; keep the previous pair.
        if (decrease < 0.0) {
            result.converged = true;
            break;
        }
        result.objective.push_back(next.residual);
        result.clamp_active.push_back(clamped);
        result.b = std::move(b);
        pose = next;
        if (decrease < options.tol) {
            result.converged = true;
            break;
        }
    }

    result.pose = pose.transform;
    result.fitted_shape = apply_transform(result.pose, reconstruct(model, result.b));
    result.residual = squared_distance(result.fitted_shape, observed);
    for (Eigen::Index j = 0; j < result.b.size(); ++j) {
        if (std::abs(result.b[j]) >= limit[j]) {
            result.clamped = true;
        }
    }
    return result;
}

}  // namespace shapefit
