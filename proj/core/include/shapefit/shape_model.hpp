#pragma once

#include "shapefit/procrustes.hpp"
#include "shapefit/shape.hpp"
#include "shapefit/similarity.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace shapefit {

/// K x 2N matrix whose rows are flattened, Procrustes-aligned shapes.
struct PointDistributionMatrix {
    Eigen::MatrixXd rows;

    Eigen::Index shapes() const { return rows.rows(); }
    Eigen::Index points() const { return rows.cols() / 2; }
};

/// Linear point-distribution model: shape = mean + modes * b.
struct ShapeModel {
    Eigen::VectorXd mean;         ///< 2N
    Eigen::MatrixXd modes;        ///< 2N x t, orthonormal columns
    Eigen::VectorXd eigenvalues;  ///< t, non-increasing, > 0
    double variance_fraction = 0.98;
    std::uint64_t corpus_hash = 0;

    std::size_t n_points() const { return static_cast<std::size_t>(mean.size() / 2); }
    Eigen::Index t() const { return modes.cols(); }
    Shape mean_shape() const { return Shape::from_flat(mean); }
};

struct BuildOptions {
    double variance_fraction = 0.98;
    ProcrustesOptions procrustes;
};

struct BuildResult {
    ShapeModel model;
    ProcrustesResult alignment;
    PointDistributionMatrix pdm;
    Eigen::VectorXd spectrum;  ///< every eigenvalue of the sample covariance, non-increasing
};

/// Aligns the corpus, projects the aligned shapes into the tangent space of
/// the Procrustes mean, and keeps the smallest number of principal modes whose
/// cumulative variance reaches options.variance_fraction.
BuildResult build_model_with_report(const std::vector<Shape>& corpus, const BuildOptions& options = {});

ShapeModel build_model(const std::vector<Shape>& corpus, double variance_fraction = 0.98);

/// Eigen-decomposition of a PDM (sample covariance, divisor K-1). Exposed so
/// the PCA step can be exercised on hand-built matrices.
ShapeModel principal_components(const PointDistributionMatrix& pdm, double variance_fraction,
                                Eigen::VectorXd* spectrum = nullptr);

Shape reconstruct(const ShapeModel& model, const Eigen::VectorXd& b);

Eigen::VectorXd project(const ShapeModel& model, const Shape& aligned);

struct FitOptions {
    double tol = 1e-9;  ///< on the objective decrease between iterations
    int max_iter = 50;
    double clamp_sigmas = 3.0;
};

struct FitResult {
    SimilarityTransform pose;
    Eigen::VectorXd b;  ///< model-space units; |b_j| <= clamp_sigmas * sqrt(lambda_j)
    Shape fitted_shape;  ///< apply_transform(pose, reconstruct(model, b))
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool clamped = false;  ///< the final b sits on the box constraint
    std::vector<double> objective;  ///< one entry per pose solve
    std::vector<bool> clamp_active;  ///< per entry of objective: did the preceding shape step clamp
};

/// Alternating pose / shape minimisation of |observed - M(mean + P b)|^2.
FitResult fit(const ShapeModel& model, const Shape& observed, const FitOptions& options = {});

}  // namespace shapefit
