#pragma once

#include "shapefit/shape.hpp"

#include <Eigen/Core>

namespace shapefit {

/// p -> scale * R(rotation) * p + translation, with
/// R(t) = [[cos t, -sin t], [sin t, cos t]].
struct SimilarityTransform {
    double scale = 1.0;
    double rotation = 0.0;  ///< radians, kept in (-pi, pi]
    Point translation = Point::Zero();

    static SimilarityTransform identity() { return {}; }

    /// scale * R(rotation)
    Eigen::Matrix2d linear() const;
    Point apply(const Point& p) const;
    SimilarityTransform inverse() const;

    bool valid() const;
};

/// a after b: compose(a, b).apply(p) == a.apply(b.apply(p)).
SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

/// Throws InvalidShape on non-finite input, InvalidArgument on scale <= 0.
Shape apply_transform(const SimilarityTransform& t, const Shape& s);

}  // namespace shapefit
