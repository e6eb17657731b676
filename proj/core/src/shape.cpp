#include "shapefit/shape.hpp"

#include "shapefit/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace shapefit {

Shape Shape::from_flat(const Eigen::VectorXd& flat)
{
    if (flat.size() % 2 != 0) {
        throw Error(ErrorCode::ShapeArity, "flattened shape has odd length " + std::to_string(flat.size()));
    }
    Shape s(static_cast<std::size_t>(flat.size() / 2));
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = Point(flat[2 * i], flat[2 * i + 1]);
    }
    return s;
}

Eigen::VectorXd Shape::flatten() const
{
    Eigen::VectorXd flat(2 * points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        flat[2 * i] = points_[i].x();
        flat[2 * i + 1] = points_[i].y();
    }
    return flat;
}

bool Shape::all_finite() const
{
    return std::all_of(points_.begin(), points_.end(), [](const Point& p) { return p.allFinite(); });
}

Point Shape::centroid() const
{
    Point sum = Point::Zero();
    for (const auto& p : points_) {
        sum += p;
    }
    return points_.empty() ? sum : Point(sum / static_cast<double>(points_.size()));
}

double Shape::rms_radius() const
{
    if (points_.empty()) {
        return 0.0;
    }
    const Point c = centroid();
    double sum = 0.0;
    for (const auto& p : points_) {
        sum += (p - c).squaredNorm();
    }
    return std::sqrt(sum / static_cast<double>(points_.size()));
}

Shape Shape::normalized() const
{
    const double r = rms_radius();
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw Error(ErrorCode::DegenerateShape, "cannot normalize a shape whose points coincide");
    }
    const Point c = centroid();
    Shape out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = (points_[i] - c) / r;
    }
    return out;
}

Shape Shape::translated(const Point& delta) const
{
    Shape out(*this);
    for (auto& p : out.points_) {
        p += delta;
    }
    return out;
}

Shape Shape::subset(std::span<const std::size_t> indices) const
{
    Shape out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= size()) {
            throw Error(ErrorCode::ShapeArity, "subset index " + std::to_string(indices[i]) + " out of range for "
                                                   + std::to_string(size()) + " points");
        }
        out[i] = points_[indices[i]];
    }
    return out;
}

double squared_distance(const Shape& a, const Shape& b)
{
    require_same_size(a, b, "squared_distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += (a[i] - b[i]).squaredNorm();
    }
    return sum;
}

double max_coordinate_difference(const Shape& a, const Shape& b)
{
    require_same_size(a, b, "max_coordinate_difference");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
    }
    return worst;
}

void require_finite(const Shape& s, const char* what)
{
    if (!s.all_finite()) {
        throw Error(ErrorCode::InvalidShape, std::string(what) + ": shape has non-finite coordinates");
    }
}

void require_same_size(const Shape& a, const Shape& b, const char* what)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::ShapeArity, std::string(what) + ": point counts differ (" + std::to_string(a.size())
                                               + " vs " + std::to_string(b.size()) + ")");
    }
}

}  // namespace shapefit
