#pragma once

#include "shapefit/image.hpp"
#include "shapefit/landmarks.hpp"
#include "shapefit/shape.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shapefit {

/// Per-triangle affine correspondence between a source and a target landmark
/// set sharing one triangulation.
class PiecewiseAffineWarp {
public:
    PiecewiseAffineWarp(const Shape& source, const Shape& target, std::span<const Triangle> triangles);

    std::size_t triangle_count() const noexcept { return pieces_.size(); }
    bool degenerate(std::size_t tri) const { return pieces_.at(tri).degenerate; }
    std::size_t degenerate_count() const;

    /// Source -> target through triangle `tri`'s affine map.
    Point forward(std::size_t tri, const Point& source_point) const;
    /// Target -> source through triangle `tri`'s affine map.
    Point inverse(std::size_t tri, const Point& target_point) const;

    /// First non-degenerate triangle (in triangulation order) whose target
    /// triangle contains the point, edges included.
    std::optional<std::size_t> locate(const Point& target_point) const;

    /// Bounding box of the non-degenerate target triangles: min, max.
    std::pair<Point, Point> target_bounds() const;

private:
    struct Piece {
        Point source_origin;
        Point target_origin;
        Eigen::Matrix2d to_source;       ///< target offset -> source offset
        Eigen::Matrix2d to_target;       ///< source offset -> target offset
        Eigen::Matrix2d target_to_bary;  ///< target offset -> (u, v)
        Point target_min;
        Point target_max;
        bool degenerate = false;
    };

    std::vector<Piece> pieces_;
};

struct WarpedFragment {
    RgbaImage image;
    Eigen::Vector2i offset = Eigen::Vector2i::Zero();  ///< image pixel of fragment pixel (0, 0)
    std::vector<std::size_t> degenerate_triangles;
    std::vector<std::string> warnings;
};

/// Bilinear sample with edge-clamped addressing.
Rgba sample_bilinear(const RgbaImage& image, const Point& p);

/// Renders the template into the target frame, triangle by triangle. Pixels
/// outside every triangle carry alpha 0.
WarpedFragment warp_template(const MaskTemplate& mask, const Shape& target17);

/// Straight-alpha "over" of the fragment onto a copy of the face image. Pixels
/// outside the fragment, or under zero fragment alpha, are left untouched.
RgbaImage composite(const RgbaImage& face, const RgbaImage& fragment, const Eigen::Vector2i& offset);

/// The fragment's alpha placed into a zero raster of the given size.
GrayImage footprint(const WarpedFragment& fragment, int width, int height);

}  // namespace shapefit
