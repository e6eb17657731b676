#pragma once

#include "shapefit/shape.hpp"
#include "shapefit/similarity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shapefit {

struct SimilarityFit {
    SimilarityTransform transform;
    double residual = 0.0;  ///< sum over k of |dst_k - transform(src_k)|^2
};

/// Closed-form least-squares similarity (no reflection) taking src onto dst.
SimilarityFit solve_similarity(const Shape& src, const Shape& dst);

/// Corpus indices sorted by lexicographic comparison of the coordinates
/// (stable for equal shapes).
std::vector<std::size_t> canonical_order(const std::vector<Shape>& corpus);

struct ProcrustesOptions {
    double tol = 1e-7;  ///< on the Frobenius displacement of the mean between iterations
    int max_iter = 100;
};

struct ProcrustesResult {
    std::vector<Shape> aligned;  ///< same order as the input corpus
    std::vector<SimilarityTransform> transforms;  ///< input shape k -> aligned[k]
    Shape mean;  ///< centroid at the origin, RMS radius 1
    int iterations = 0;
    bool converged = false;
    /// Total Procrustes sum of squares after each alignment pass; the last
    /// entry belongs to the final realignment against `mean`.
    std::vector<double> sum_of_squares;
    std::optional<std::string> warning;
};

/// Iterative alignment of a corpus to its evolving normalized mean.
///
/// Shapes are visited in a canonical (lexicographic) order when seeding the
/// reference and accumulating the mean, so the mean does not depend on the
/// order of the corpus.
ProcrustesResult generalized_procrustes(const std::vector<Shape>& corpus, const ProcrustesOptions& options = {});

}  // namespace shapefit
