#include "shapefit/similarity.hpp"

#include "shapefit/error.hpp"

#include <cmath>
#include <numbers>

namespace shapefit {

double wrap_angle(double radians)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::remainder(radians, two_pi);  // [-pi, pi]
    if (a <= -std::numbers::pi) {
        a += two_pi;
    }
    return a;
}

Eigen::Matrix2d SimilarityTransform::linear() const
{
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    Eigen::Matrix2d m;
    m << c, -s, s, c;
    return scale * m;
}

Point SimilarityTransform::apply(const Point& p) const
{
    return linear() * p + translation;
}

SimilarityTransform SimilarityTransform::inverse() const
{
    SimilarityTransform inv;
    inv.scale = 1.0 / scale;
    inv.rotation = wrap_angle(-rotation);
    inv.translation = -(inv.linear() * translation);
    return inv;
}

bool SimilarityTransform::valid() const
{
    return std::isfinite(scale) && scale > 0.0 && std::isfinite(rotation) && translation.allFinite();
}

SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b)
{
    SimilarityTransform out;
    out.scale = a.scale * b.scale;
    out.rotation = wrap_angle(a.rotation + b.rotation);
    out.translation = a.linear() * b.translation + a.translation;
    return out;
}

Shape apply_transform(const SimilarityTransform& t, const Shape& s)
{
    require_finite(s, "apply_transform");
    if (!t.valid()) {
        throw Error(ErrorCode::InvalidArgument, "apply_transform: similarity needs finite parameters and scale > 0");
    }
    const Eigen::Matrix2d m = t.linear();
    Shape out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = m * s[i] + t.translation;
    }
    return out;
}

}  // namespace shapefit
