#include "shapefit/procrustes.hpp"

#include "shapefit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace shapefit {

SimilarityFit solve_similarity(const Shape& src, const Shape& dst)
{
    require_same_size(src, dst, "solve_similarity");
    if (src.size() < 2) {
        throw Error(ErrorCode::ShapeArity, "solve_similarity: need at least 2 points");
    }
    require_finite(src, "solve_similarity");
    require_finite(dst, "solve_similarity");

    const Point src_mean = src.centroid();
    const Point dst_mean = dst.centroid();

    double src_norm = 0.0;
    double src_raw_norm = 0.0;
    double dot = 0.0;
    double cross = 0.0;
    for (std::size_t k = 0; k < src.size(); ++k) {
        const Point a = src[k] - src_mean;
        const Point b = dst[k] - dst_mean;
        src_norm += a.squaredNorm();
        src_raw_norm += src[k].squaredNorm();
        dot += a.x() * b.x() + a.y() * b.y();
        cross += a.x() * b.y() - a.y() * b.x();
    }
    if (src_norm <= 1e-24 * src_raw_norm || src_norm == 0.0) {
        throw Error(ErrorCode::DegenerateShape, "solve_similarity: source points coincide");
    }

    SimilarityFit fit;
    fit.transform.scale = std::hypot(dot, cross) / src_norm;
    if (!(fit.transform.scale > 0.0)) {
        throw Error(ErrorCode::DegenerateShape, "solve_similarity: optimal scale is zero (target collapses)");
    }
    fit.transform.rotation = wrap_angle(std::atan2(cross, dot));
    fit.transform.translation = dst_mean - fit.transform.linear() * src_mean;

    const Eigen::Matrix2d m = fit.transform.linear();
    for (std::size_t k = 0; k < src.size(); ++k) {
        fit.residual += (dst[k] - (m * src[k] + fit.transform.translation)).squaredNorm();
    }
    return fit;
}

std::vector<std::size_t> canonical_order(const std::vector<Shape>& corpus)
{
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t i, std::size_t j) {
        const Shape& a = corpus[i];
        const Shape& b = corpus[j];
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k].x() != b[k].x()) {
                return a[k].x() < b[k].x();
            }
            if (a[k].y() != b[k].y()) {
                return a[k].y() < b[k].y();
            }
        }
        return false;
    };
    std::stable_sort(order.begin(), order.end(), less);
    return order;
}

namespace {

double align_all(const std::vector<Shape>& corpus, const Shape& reference, std::vector<Shape>& aligned,
                 std::vector<SimilarityTransform>& transforms)
{
    double total = 0.0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        SimilarityFit fit = solve_similarity(corpus[k], reference);
        aligned[k] = apply_transform(fit.transform, corpus[k]);
        transforms[k] = fit.transform;
        total += fit.residual;
    }
    return total;
}

}  // namespace

ProcrustesResult generalized_procrustes(const std::vector<Shape>& corpus, const ProcrustesOptions& options)
{
    if (corpus.size() < 2) {
        throw Error(ErrorCode::CorpusTooSmall,
                    "generalized_procrustes: need at least 2 shapes, got " + std::to_string(corpus.size()));
    }
    const std::size_t n = corpus.front().size();
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        if (corpus[k].size() != n) {
            throw Error(ErrorCode::ShapeArity, "generalized_procrustes: shape " + std::to_string(k) + " has "
                                                   + std::to_string(corpus[k].size()) + " points, expected "
                                                   + std::to_string(n));
        }
        require_finite(corpus[k], "generalized_procrustes");
    }
    if (n < 3) {
        throw Error(ErrorCode::ShapeArity, "generalized_procrustes: shapes need at least 3 points");
    }

    const std::vector<std::size_t> order = canonical_order(corpus);

    ProcrustesResult result;
    result.aligned.resize(corpus.size());
    result.transforms.resize(corpus.size());
    result.mean = corpus[order.front()].normalized();

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        result.sum_of_squares.push_back(align_all(corpus, result.mean, result.aligned, result.transforms));
        result.iterations = iter;

        Shape average(n);
        for (std::size_t idx : order) {
            for (std::size_t i = 0; i < n; ++i) {
                average[i] += result.aligned[idx][i];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            average[i] /= static_cast<double>(corpus.size());
        }
        Shape next = average.normalized();
        const double movement = std::sqrt(squared_distance(next, result.mean));
        result.mean = std::move(next);
        if (movement < options.tol) {
            result.converged = true;
            break;
        }
    }

    result.sum_of_squares.push_back(align_all(corpus, result.mean, result.aligned, result.transforms));
    if (!result.converged) {
        result.warning = "generalized_procrustes: mean still moving after " + std::to_string(options.max_iter)
                         + " iterations";
    }
    return result;
}

}  // namespace shapefit
