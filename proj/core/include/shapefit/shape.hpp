#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace shapefit {

using Point = Eigen::Vector2d;

/// Ordered landmark set. Index k denotes the same anatomical landmark across
/// every shape of a corpus.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::size_t n) : points_(n, Point::Zero()) {}
    explicit Shape(std::vector<Point> points) : points_(std::move(points)) {}
    Shape(std::initializer_list<Point> points) : points_(points) {}

    /// Inverse of flatten(): (x1, y1, ..., xN, yN).
    static Shape from_flat(const Eigen::VectorXd& flat);

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    Point& operator[](std::size_t i) { return points_[i]; }
    const Point& operator[](std::size_t i) const { return points_[i]; }

    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }
    auto begin() noexcept { return points_.begin(); }
    auto end() noexcept { return points_.end(); }

    std::span<const Point> points() const noexcept { return points_; }

    Eigen::VectorXd flatten() const;

    bool all_finite() const;
    Point centroid() const;
    /// Root-mean-square distance of the points from their centroid.
    double rms_radius() const;
    /// Centroid at the origin, RMS radius 1. Throws DegenerateShape when all
    /// points coincide.
    Shape normalized() const;

    Shape translated(const Point& delta) const;

    /// Picks points by zero-based index.
    Shape subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const Shape& a, const Shape& b) { return a.points_ == b.points_; }

private:
    std::vector<Point> points_;
};

/// Sum of squared point distances. Sizes must match.
double squared_distance(const Shape& a, const Shape& b);

/// Largest absolute coordinate difference. Sizes must match.
double max_coordinate_difference(const Shape& a, const Shape& b);

/// Throws InvalidShape on non-finite coordinates.
void require_finite(const Shape& s, const char* what);

/// Throws ShapeArity unless both shapes have the same number of points.
void require_same_size(const Shape& a, const Shape& b, const char* what);

}  // namespace shapefit
