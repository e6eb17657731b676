#include "shapefit/warp.hpp"

#include "shapefit/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace shapefit {

namespace {

constexpr double kDegenerateArea = 1e-9;
constexpr double kEdgeEpsilon = 1e-9;
constexpr double kGridSnap = 1e-9;

Eigen::Matrix2d edge_matrix(const Point& a, const Point& b, const Point& c)
{
    Eigen::Matrix2d m;
    m.col(0) = b - a;
    m.col(1) = c - a;
    return m;
}

double snap(double v)
{
    const double r = std::round(v);
    return std::abs(v - r) < kGridSnap ? r : v;
}

}  // namespace

PiecewiseAffineWarp::PiecewiseAffineWarp(const Shape& source, const Shape& target, std::span<const Triangle> triangles)
{
    require_same_size(source, target, "PiecewiseAffineWarp");
    require_finite(source, "PiecewiseAffineWarp");
    require_finite(target, "PiecewiseAffineWarp");

    pieces_.reserve(triangles.size());
    for (const Triangle& tri : triangles) {
        for (int v : tri) {
            if (v < 0 || static_cast<std::size_t>(v) >= source.size()) {
                throw Error(ErrorCode::InvalidArgument, "triangle vertex index out of range");
            }
        }
        const Point& p0 = source[tri[0]];
        const Point& q0 = target[tri[0]];
        const Eigen::Matrix2d src_edges = edge_matrix(p0, source[tri[1]], source[tri[2]]);
        const Eigen::Matrix2d dst_edges = edge_matrix(q0, target[tri[1]], target[tri[2]]);

        Piece piece;
        piece.source_origin = p0;
        piece.target_origin = q0;
        piece.target_min = q0.cwiseMin(target[tri[1]]).cwiseMin(target[tri[2]]);
        piece.target_max = q0.cwiseMax(target[tri[1]]).cwiseMax(target[tri[2]]);
        piece.degenerate = std::abs(dst_edges.determinant()) <= kDegenerateArea
                           || std::abs(src_edges.determinant()) <= kDegenerateArea;
        if (!piece.degenerate) {
            piece.target_to_bary = dst_edges.inverse();
            piece.to_source = src_edges * piece.target_to_bary;
            piece.to_target = dst_edges * src_edges.inverse();
        }
        pieces_.push_back(piece);
    }
}

std::size_t PiecewiseAffineWarp::degenerate_count() const
{
    return static_cast<std::size_t>(std::count_if(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.degenerate; }));
}

Point PiecewiseAffineWarp::forward(std::size_t tri, const Point& source_point) const
{
    const Piece& piece = pieces_.at(tri);
    return piece.target_origin + piece.to_target * (source_point - piece.source_origin);
}

Point PiecewiseAffineWarp::inverse(std::size_t tri, const Point& target_point) const
{
    const Piece& piece = pieces_.at(tri);
    return piece.source_origin + piece.to_source * (target_point - piece.target_origin);
}

std::optional<std::size_t> PiecewiseAffineWarp::locate(const Point& target_point) const
{
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& piece = pieces_[i];
        if (piece.degenerate) {
            continue;
        }
        if (target_point.x() < piece.target_min.x() - kEdgeEpsilon || target_point.x() > piece.target_max.x() + kEdgeEpsilon
            || target_point.y() < piece.target_min.y() - kEdgeEpsilon
            || target_point.y() > piece.target_max.y() + kEdgeEpsilon) {
            continue;
        }
        const Eigen::Vector2d uv = piece.target_to_bary * (target_point - piece.target_origin);
        if (uv.x() >= -kEdgeEpsilon && uv.y() >= -kEdgeEpsilon && uv.x() + uv.y() <= 1.0 + kEdgeEpsilon) {
            return i;
        }
    }
    return std::nullopt;
}

std::pair<Point, Point> PiecewiseAffineWarp::target_bounds() const
{
    Point lo = Point::Constant(std::numeric_limits<double>::infinity());
    Point hi = Point::Constant(-std::numeric_limits<double>::infinity());
    for (const Piece& piece : pieces_) {
        if (!piece.degenerate) {
            lo = lo.cwiseMin(piece.target_min);
            hi = hi.cwiseMax(piece.target_max);
        }
    }
    return {lo, hi};
}

Rgba sample_bilinear(const RgbaImage& image, const Point& p)
{
    if (image.empty()) {
        return {};
    }
    const double x = snap(p.x());
    const double y = snap(p.y());
    const double fx0 = std::floor(x);
    const double fy0 = std::floor(y);
    const double wx = x - fx0;
    const double wy = y - fy0;

    auto clamp_x = [&](double v) { return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(image.width() - 1))); };
    auto clamp_y = [&](double v) { return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(image.height() - 1))); };
    const int x0 = clamp_x(fx0);
    const int x1 = clamp_x(fx0 + 1.0);
    const int y0 = clamp_y(fy0);
    const int y1 = clamp_y(fy0 + 1.0);

    const Rgba& c00 = image.at(x0, y0);
    const Rgba& c10 = image.at(x1, y0);
    const Rgba& c01 = image.at(x0, y1);
    const Rgba& c11 = image.at(x1, y1);

    auto mix = [&](float Rgba::*channel) {
        if (wx == 0.0 && wy == 0.0) {
            return c00.*channel;
        }
        const double top = (1.0 - wx) * (c00.*channel) + wx * (c10.*channel);
        const double bottom = (1.0 - wx) * (c01.*channel) + wx * (c11.*channel);
        return static_cast<float>((1.0 - wy) * top + wy * bottom);
    };
    return {mix(&Rgba::r), mix(&Rgba::g), mix(&Rgba::b), mix(&Rgba::a)};
}

WarpedFragment warp_template(const MaskTemplate& mask, const Shape& target17)
{
    if (target17.size() != kMaskLandmarkCount) {
        throw Error(ErrorCode::ShapeArity, "warp_template: need 17 target points, got "
                                               + std::to_string(target17.size()));
    }
    require_finite(target17, "warp_template");

    const PiecewiseAffineWarp warp(mask.landmarks, target17, mask.triangulation);

    WarpedFragment out;
    for (std::size_t i = 0; i < warp.triangle_count(); ++i) {
        if (warp.degenerate(i)) {
            out.degenerate_triangles.push_back(i);
            out.warnings.push_back("triangle " + std::to_string(i + 1) + " is degenerate on the target; left empty");
        }
    }
    if (out.degenerate_triangles.size() == warp.triangle_count()) {
        throw Error(ErrorCode::WarpDegenerate, "warp_template: every target triangle is degenerate");
    }

    const auto [lo, hi] = warp.target_bounds();
    const int x0 = static_cast<int>(std::floor(lo.x()));
    const int y0 = static_cast<int>(std::floor(lo.y()));
    const int x1 = static_cast<int>(std::ceil(hi.x()));
    const int y1 = static_cast<int>(std::ceil(hi.y()));

    out.offset = Eigen::Vector2i(x0, y0);
    out.image = RgbaImage(x1 - x0 + 1, y1 - y0 + 1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const Point q(static_cast<double>(x), static_cast<double>(y));
            const auto tri = warp.locate(q);
            if (!tri) {
                continue;
            }
            out.image.at(x - x0, y - y0) = sample_bilinear(mask.image, warp.inverse(*tri, q));
        }
    }
    return out;
}

RgbaImage composite(const RgbaImage& face, const RgbaImage& fragment, const Eigen::Vector2i& offset)
{
    RgbaImage out = face;
    for (int fy = 0; fy < fragment.height(); ++fy) {
        for (int fx = 0; fx < fragment.width(); ++fx) {
            const int x = fx + offset.x();
            const int y = fy + offset.y();
            if (!out.contains(x, y)) {
                continue;
            }
            const Rgba& src = fragment.at(fx, fy);
            if (src.a <= 0.0f) {
                continue;
            }
            Rgba& dst = out.at(x, y);
            if (src.a >= 1.0f) {
                dst = {src.r, src.g, src.b, 1.0f};
                continue;
            }
            const float keep = 1.0f - src.a;
            dst.r = src.a * src.r + keep * dst.r;
            dst.g = src.a * src.g + keep * dst.g;
            dst.b = src.a * src.b + keep * dst.b;
            dst.a = src.a + keep * dst.a;
        }
    }
    return out;
}

GrayImage footprint(const WarpedFragment& fragment, int width, int height)
{
    GrayImage out(width, height, 0.0);
    for (int fy = 0; fy < fragment.image.height(); ++fy) {
        for (int fx = 0; fx < fragment.image.width(); ++fx) {
            const int x = fx + fragment.offset.x();
            const int y = fy + fragment.offset.y();
            if (out.contains(x, y)) {
                out.at(x, y) = fragment.image.at(fx, fy).a;
            }
        }
    }
    return out;
}

}  // namespace shapefit
