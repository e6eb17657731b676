#pragma once

#include "shapefit/image.hpp"
#include "shapefit/shape.hpp"

#include <vector>

namespace shapefit {

/// Probability map or hard mask; every value in [0, 1].
using BinaryMap = GrayImage;

inline constexpr double kDiceSmoothing = 1e-7;
inline constexpr double kBceClip = 1e-7;

/// 1 - (2 sum(pred * gt) + eps) / (sum(pred) + sum(gt) + eps).
double dice_loss(const BinaryMap& pred, const BinaryMap& gt);

/// Mean binary cross-entropy with pred clipped to [eps, 1 - eps].
double bce_loss(const BinaryMap& pred, const BinaryMap& gt);

/// dice_loss + bce_loss.
double seg_loss(const BinaryMap& pred, const BinaryMap& gt);

inline constexpr int kSsimWindow = 8;

/// Mean SSIM over every 8x8 uniform window (stride 1), C1 = (0.01 L)^2,
/// C2 = (0.03 L)^2, window statistics with divisor 64.
double ssim(const GrayImage& a, const GrayImage& b, double dynamic_range = 255.0);

/// Colour images go through Rec.601 luma on [0, dynamic_range] first.
double ssim(const RgbaImage& a, const RgbaImage& b, double dynamic_range = 255.0);

/// mean |a - b| / L - ssim(a, b).
double reconstruction_loss(const GrayImage& a, const GrayImage& b, double dynamic_range = 255.0);

using Polyline = std::vector<Point>;

/// Lowest alpha > 0.5 crossing in every column x_min..x_max (inclusive) that
/// has footprint, refined linearly between the last inside pixel and the one
/// below it.
Polyline lower_boundary(const GrayImage& alpha, int x_min, int x_max);

/// Distance from p to the nearest point of the polyline.
double distance_to_polyline(const Point& p, const Polyline& line);

/// Mean over the jaw landmarks of the distance to the mask's lower boundary.
double chinline_deviation(const Polyline& mask_boundary, const Shape& face_jaw);

/// lower_boundary over the jaw's x-range followed by chinline_deviation.
double chinline_deviation(const GrayImage& mask_alpha, const Shape& face_jaw);

}  // namespace shapefit
