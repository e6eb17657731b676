#include "fixtures.hpp"
#include "oracles.hpp"

#include "shapefit/error.hpp"
#include "shapefit/procrustes.hpp"
#include "shapefit/shape_model.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace shapefit;

namespace {

double max_abs(const Eigen::VectorXd& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Directions a similarity can move a centred shape along: the two
/// translations, the scale direction and the rotation direction.
Eigen::MatrixXd similarity_directions(const Eigen::VectorXd& shape)
{
    const Eigen::Index n = shape.size() / 2;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(shape.size(), 4);
    for (Eigen::Index k = 0; k < n; ++k) {
        d(2 * k, 0) = 1.0;
        d(2 * k + 1, 1) = 1.0;
        d(2 * k, 3) = -shape[2 * k + 1];
        d(2 * k + 1, 3) = shape[2 * k];
    }
    d.col(2) = shape;
    return d;
}

const ShapeModel& corpus_model()
{
    static const ShapeModel model = build_model(fixture::mask17_corpus(21, 130, 25.0));
    return model;
}

}  // namespace

TEST_CASE("build_model: identical shapes give a mean-only model")
{
    const Shape s{{0, 0}, {2, 0.5}, {1, 3}, {-1, 2}};
    const auto model = build_model(std::vector<Shape>(6, s));
    CHECK(model.t() == 0);
    CHECK(model.eigenvalues.size() == 0);
    CHECK(max_coordinate_difference(model.mean_shape(), s.normalized()) <= 1e-12);
}

TEST_CASE("principal_components: two-row matrix")
{
    fixture::Rng rng(31);
    PointDistributionMatrix pdm;
    pdm.rows.resize(2, 10);
    for (Eigen::Index i = 0; i < pdm.rows.size(); ++i) {
        pdm.rows.data()[i] = rng.uniform(-1, 1);
    }
    Eigen::VectorXd spectrum;
    const auto model = principal_components(pdm, 0.98, &spectrum);
    const Eigen::VectorXd d = (pdm.rows.row(0) - pdm.rows.row(1)).transpose();

    REQUIRE(model.t() == 1);
    // One sample pair: covariance = d d^T / 2, so lambda = |d|^2 / 2 along d.
    CHECK(model.eigenvalues[0] == doctest::Approx(d.squaredNorm() / 2).epsilon(1e-12));
    CHECK(std::abs(std::abs(model.modes.col(0).dot(d.normalized())) - 1.0) <= 1e-12);
    CHECK(model.mean.isApprox(0.5 * (pdm.rows.row(0) + pdm.rows.row(1)).transpose(), 1e-15));
    CHECK(spectrum.size() == 10);
    CHECK(max_abs(spectrum.tail(9)) <= 1e-12);
}

TEST_CASE("build_model: two distinct shapes give one mode")
{
    const Shape a{{0, 0}, {2, 0}, {2, 1}, {0, 1}};
    const Shape b{{0, 0}, {2, 0.3}, {2.2, 1.1}, {-0.1, 0.9}};
    const auto report = build_model_with_report({a, b});
    REQUIRE(report.model.t() == 1);
    const Eigen::VectorXd d = (report.pdm.rows.row(0) - report.pdm.rows.row(1)).transpose();
    CHECK(report.model.eigenvalues[0] == doctest::Approx(d.squaredNorm() / 2).epsilon(1e-10));
    CHECK(std::abs(std::abs(report.model.modes.col(0).dot(d.normalized())) - 1.0) <= 1e-10);
}

TEST_CASE("build_model: generative round trip along one direction")
{
    fixture::Rng rng(32);
    const Shape base = fixture::random_shape(rng, 10).normalized();
    const Eigen::VectorXd mean = base.flatten();
    Eigen::VectorXd p(mean.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        p[i] = rng.normal();
    }
    p = oracle::orthogonal_to(similarity_directions(mean), p).normalized();

    std::vector<Shape> corpus;
    for (const double b : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        corpus.push_back(Shape::from_flat(mean + b * p));
    }
    const auto model = build_model(corpus);
    REQUIRE(model.t() == 1);
    CHECK(std::abs(std::abs(model.modes.col(0).dot(p)) - 1.0) <= 1e-8);
    // Sample variance of {-2, -1, 0, 1, 2} with divisor 4.
    CHECK(model.eigenvalues[0] == doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("build_model: model invariants on a generator corpus")
{
    const auto& model = corpus_model();
    REQUIRE(model.t() >= 1);
    const Eigen::MatrixXd gram = model.modes.transpose() * model.modes;
    CHECK((gram - Eigen::MatrixXd::Identity(model.t(), model.t())).cwiseAbs().maxCoeff() <= 1e-9);
    for (Eigen::Index j = 0; j < model.t(); ++j) {
        CHECK(model.eigenvalues[j] > 0.0);
        if (j > 0) {
            CHECK(model.eigenvalues[j] <= model.eigenvalues[j - 1]);
        }
        const Eigen::VectorXd mode = model.modes.col(j);
        Eigen::Index arg = 0;
        mode.cwiseAbs().maxCoeff(&arg);
        CHECK(mode[arg] > 0.0);
    }
    CHECK(model.t() <= std::min<Eigen::Index>(129, 34));
    CHECK(model.n_points() == 17);
}

TEST_CASE("build_model: three-mode generator keeps three modes")
{
    const auto model = build_model(fixture::mask17_corpus(7, 130, 0.0, 0.5, 3));
    CHECK(model.t() == 3);
}

TEST_CASE("build_model: reordering the corpus cannot change the model")
{
    auto corpus = fixture::mask17_corpus(33, 40, 20.0);
    const auto a = build_model(corpus);
    const auto again = build_model(corpus);
    CHECK(a.mean == again.mean);
    CHECK(a.modes == again.modes);
    CHECK(a.eigenvalues == again.eigenvalues);

    std::reverse(corpus.begin(), corpus.end());
    std::rotate(corpus.begin(), corpus.begin() + 7, corpus.end());
    const auto b = build_model(corpus);
    CHECK(a.mean == b.mean);
    CHECK(a.modes == b.modes);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.corpus_hash == b.corpus_hash);
}

TEST_CASE("build_model: variance fraction bounds and corpus size")
{
    const auto corpus = fixture::mask17_corpus(34, 20, 10.0);
    CHECK_THROWS_AS(build_model(corpus, 0.0), Error);
    CHECK_THROWS_AS(build_model(corpus, 1.5), Error);
    CHECK(build_model(corpus, 1.0).t() <= 19);
    try {
        build_model({corpus.front()});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorpusTooSmall);
    }
}

TEST_CASE("reconstruct and project")
{
    const auto& model = corpus_model();
    const Eigen::Index t = model.t();
    CHECK(reconstruct(model, Eigen::VectorXd::Zero(t)).flatten() == model.mean);
    for (Eigen::Index j = 0; j < t; ++j) {
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(t, j);
        CHECK((reconstruct(model, e).flatten() - (model.mean + model.modes.col(j))).cwiseAbs().maxCoeff() <= 1e-15);
    }
    CHECK(max_abs(project(model, model.mean_shape())) == 0.0);

    fixture::Rng rng(35);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd b0 = fixture::random_weights(rng, model, 3.0);
        CHECK(max_abs(project(model, reconstruct(model, b0)) - b0) <= 1e-10);
    }
    CHECK_THROWS_AS(reconstruct(model, Eigen::VectorXd::Zero(t + 1)), Error);
    CHECK_THROWS_AS(project(model, Shape(3)), Error);
}

TEST_CASE("project: reconstruction is an orthogonal projection")
{
    const auto& model = corpus_model();
    fixture::Rng rng(36);
    for (int trial = 0; trial < 50; ++trial) {
        Shape s = model.mean_shape();
        for (auto& p : s) {
            p += Point(rng.normal(0.05), rng.normal(0.05));
        }
        const Eigen::VectorXd r = s.flatten() - reconstruct(model, project(model, s)).flatten();
        CHECK(max_abs(model.modes.transpose() * r) <= 1e-9);
    }
}

TEST_CASE("project and fit: noise orthogonal to the model")
{
    const auto& model = corpus_model();
    fixture::Rng rng(37);
    Eigen::MatrixXd basis(model.mean.size(), model.t() + 4);
    basis << model.modes, similarity_directions(model.mean);
    Eigen::VectorXd v(model.mean.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = rng.normal(0.02);
    }
    v = oracle::orthogonal_to(basis, v);

    const Shape noisy = Shape::from_flat(model.mean + v);
    CHECK(max_abs(project(model, noisy)) <= 1e-12);
    const auto result = fit(model, noisy);
    CHECK(max_abs(result.b) <= 1e-9);
    CHECK(result.residual == doctest::Approx(v.squaredNorm()).epsilon(1e-9));
}

TEST_CASE("fit: generative round trip")
{
    const auto& model = corpus_model();
    fixture::Rng rng(38);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd b0 = fixture::random_weights(rng, model, 2.0);
        SimilarityTransform truth = fixture::random_transform(rng);
        truth.scale = rng.uniform(50, 150);
        const Shape observed = apply_transform(truth, reconstruct(model, b0));
        const auto r = fit(model, observed);
        CHECK(r.converged);
        CHECK(max_abs(r.b - b0) <= 1e-6);
        CHECK(std::abs(r.pose.scale / truth.scale - 1.0) <= 1e-6);
        CHECK(std::abs(wrap_angle(r.pose.rotation - truth.rotation)) <= 1e-6);
        CHECK((r.pose.translation - truth.translation).norm() <= 1e-6);
        CHECK(r.residual <= 1e-10);
        CHECK_FALSE(r.clamped);
    }
}

TEST_CASE("fit: posed mean is a fixed point")
{
    const auto& model = corpus_model();
    const SimilarityTransform truth{80.0, -0.3, Point(120, 90)};
    const auto r = fit(model, apply_transform(truth, model.mean_shape()));
    CHECK(max_abs(r.b) <= 1e-8);
    CHECK(r.pose.scale == doctest::Approx(80.0).epsilon(1e-9));
    CHECK(r.pose.rotation == doctest::Approx(-0.3).epsilon(1e-9));
}

TEST_CASE("fit: fitted shape is the posed reconstruction")
{
    const auto& model = corpus_model();
    fixture::Rng rng(39);
    Shape observed = apply_transform({100.0, 0.2, Point(128, 128)}, model.mean_shape());
    for (auto& p : observed) {
        p += Point(rng.normal(2.0), rng.normal(2.0));
    }
    const auto r = fit(model, observed);
    CHECK(r.fitted_shape == apply_transform(r.pose, reconstruct(model, r.b)));
    CHECK(r.residual == squared_distance(r.fitted_shape, observed));
    CHECK(r.objective.size() == r.clamp_active.size());
}

TEST_CASE("fit: far outlier is clamped onto the box")
{
    const auto& model = corpus_model();
    Shape observed = apply_transform({100.0, 0.0, Point(128, 128)}, model.mean_shape());
    observed[7] += Point(0.0, 400.0);
    const auto r = fit(model, observed);
    CHECK(r.residual > 0.0);
    for (Eigen::Index j = 0; j < model.t(); ++j) {
        CHECK(std::abs(r.b[j]) <= 3.0 * std::sqrt(model.eigenvalues[j]) * (1 + 1e-15));
    }
    CHECK(r.clamped);
    for (std::size_t i = 1; i < r.objective.size(); ++i) {
        CHECK(r.objective[i] <= r.objective[i - 1]);
    }
}

TEST_CASE("fit: objective never rises on noisy inputs")
{
    const auto& model = corpus_model();
    fixture::Rng rng(40);
    for (int trial = 0; trial < 40; ++trial) {
        Shape observed = apply_transform(fixture::random_transform(rng), reconstruct(model, fixture::random_weights(rng, model, 3.5)));
        const double spread = observed.rms_radius();
        for (auto& p : observed) {
            p += Point(rng.normal(0.05 * spread), rng.normal(0.05 * spread));
        }
        const auto r = fit(model, observed);
        for (std::size_t i = 1; i < r.objective.size(); ++i) {
            CHECK(r.objective[i] <= r.objective[i - 1]);
        }
    }
}

TEST_CASE("fit: pose invariance of the shape weights")
{
    const auto& model = corpus_model();
    fixture::Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        Shape observed = apply_transform({100.0, rng.uniform(-0.2, 0.2), Point(128, 128)},
                                         reconstruct(model, fixture::random_weights(rng, model, 2.0)));
        for (auto& p : observed) {
            p += Point(rng.normal(1.0), rng.normal(1.0));
        }
        const auto t = fixture::random_transform(rng);
        const auto a = fit(model, observed);
        const auto b = fit(model, apply_transform(t, observed));
        CHECK(max_abs(a.b - b.b) <= 1e-6);
        const auto composed = compose(t, a.pose);
        CHECK(std::abs(b.pose.scale / composed.scale - 1.0) <= 1e-6);
        CHECK(std::abs(wrap_angle(b.pose.rotation - composed.rotation)) <= 1e-6);
    }
}

TEST_CASE("fit: zero-mode model returns the posed mean")
{
    const Shape s{{0, 0}, {2, 0.5}, {1, 3}, {-1, 2}};
    const auto model = build_model(std::vector<Shape>(3, s));
    const SimilarityTransform truth{3.0, 0.7, Point(5, 6)};
    Shape observed = apply_transform(truth, s.normalized());
    observed[2] += Point(0.3, -0.2);
    const auto r = fit(model, observed);
    CHECK(r.b.size() == 0);
    CHECK(max_coordinate_difference(r.fitted_shape,
                                    apply_transform(solve_similarity(model.mean_shape(), observed).transform,
                                                    model.mean_shape()))
          <= 1e-12);
}

TEST_CASE("fit: errors")
{
    const auto& model = corpus_model();
    CHECK_THROWS_AS(fit(model, Shape(5)), Error);
    try {
        fit(model, Shape(17));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateShape);
    }
    Shape bad = model.mean_shape();
    bad[3].x() = std::nan("");
    try {
        fit(model, bad);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidShape);
    }
}

TEST_CASE("fit: iteration cap reports non-convergence")
{
    const auto& model = corpus_model();
    fixture::Rng rng(42);
    Shape observed = apply_transform({100.0, 0.0, Point(128, 128)}, model.mean_shape());
    for (auto& p : observed) {
        p += Point(rng.normal(3.0), rng.normal(3.0));
    }
    FitOptions options;
    options.max_iter = 1;
    options.tol = 0.0;
    const auto r = fit(model, observed, options);
    CHECK(r.iterations == 1);
    CHECK_FALSE(r.converged);
}
