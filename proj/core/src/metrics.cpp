#include "shapefit/metrics.hpp"

#include "shapefit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shapefit {

namespace {

void require_binary(const BinaryMap& map, const char* what)
{
    for (double v : map.data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, std::string(what) + ": values must lie in [0, 1]");
        }
    }
}

}  // namespace

double dice_loss(const BinaryMap& pred, const BinaryMap& gt)
{
    require_same_dimensions(pred, gt, "dice_loss");
    require_binary(pred, "dice_loss");
    require_binary(gt, "dice_loss");
    double overlap = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < pred.data().size(); ++i) {
        overlap += pred.data()[i] * gt.data()[i];
        total += pred.data()[i] + gt.data()[i];
    }
    return 1.0 - (2.0 * overlap + kDiceSmoothing) / (total + kDiceSmoothing);
}

double bce_loss(const BinaryMap& pred, const BinaryMap& gt)
{
    require_same_dimensions(pred, gt, "bce_loss");
    require_binary(pred, "bce_loss");
    require_binary(gt, "bce_loss");
    if (pred.data().empty()) {
        throw Error(ErrorCode::DimensionMismatch, "bce_loss: empty maps");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.data().size(); ++i) {
        const double p = std::clamp(pred.data()[i], kBceClip, 1.0 - kBceClip);
        const double g = gt.data()[i];
        sum -= g * std::log(p) + (1.0 - g) * std::log(1.0 - p);
    }
    return sum / static_cast<double>(pred.data().size());
}

double seg_loss(const BinaryMap& pred, const BinaryMap& gt)
{
    return dice_loss(pred, gt) + bce_loss(pred, gt);
}

double ssim(const GrayImage& a, const GrayImage& b, double dynamic_range)
{
    require_same_dimensions(a, b, "ssim");
    if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
        throw Error(ErrorCode::DimensionMismatch, "ssim: image smaller than the 8x8 window");
    }
    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
    constexpr double n = kSsimWindow * kSsimWindow;

    double total = 0.0;
    const int nx = a.width() - kSsimWindow + 1;
    const int ny = a.height() - kSsimWindow + 1;
    for (int y0 = 0; y0 < ny; ++y0) {
        for (int x0 = 0; x0 < nx; ++x0) {
            double sa = 0.0;
            double sb = 0.0;
            for (int y = y0; y < y0 + kSsimWindow; ++y) {
                for (int x = x0; x < x0 + kSsimWindow; ++x) {
                    sa += a.at(x, y);
                    sb += b.at(x, y);
                }
            }
            const double mu_a = sa / n;
            const double mu_b = sb / n;
            double var_a = 0.0;
            double var_b = 0.0;
            double cov = 0.0;
            for (int y = y0; y < y0 + kSsimWindow; ++y) {
                for (int x = x0; x < x0 + kSsimWindow; ++x) {
                    const double da = a.at(x, y) - mu_a;
                    const double db = b.at(x, y) - mu_b;
                    var_a += da * da;
                    var_b += db * db;
                    cov += da * db;
                }
            }
            var_a /= n;
            var_b /= n;
            cov /= n;
            const double numerator = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double denominator = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += numerator / denominator;
        }
    }
    return total / (static_cast<double>(nx) * static_cast<double>(ny));
}

double ssim(const RgbaImage& a, const RgbaImage& b, double dynamic_range)
{
    return ssim(to_luma(a, dynamic_range), to_luma(b, dynamic_range), dynamic_range);
}

double reconstruction_loss(const GrayImage& a, const GrayImage& b, double dynamic_range)
{
    require_same_dimensions(a, b, "reconstruction_loss");
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        l1 += std::abs(a.data()[i] - b.data()[i]) / dynamic_range;
    }
    l1 /= static_cast<double>(a.data().size());
    return l1 - ssim(a, b, dynamic_range);
}

Polyline lower_boundary(const GrayImage& alpha, int x_min, int x_max)
{
    Polyline line;
    x_min = std::max(x_min, 0);
    x_max = std::min(x_max, alpha.width() - 1);
    for (int x = x_min; x <= x_max; ++x) {
        for (int y = alpha.height() - 1; y >= 0; --y) {
            const double inside = alpha.at(x, y);
            if (inside > 0.5) {
                const double below = y + 1 < alpha.height() ? alpha.at(x, y + 1) : 0.0;
                line.emplace_back(x, y + (inside - 0.5) / (inside - below));
                break;
            }
        }
    }
    return line;
}

double distance_to_polyline(const Point& p, const Polyline& line)
{
    if (line.empty()) {
        throw Error(ErrorCode::NoFootprint, "distance_to_polyline: empty polyline");
    }
    double best = (p - line.front()).norm();
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const Point seg = line[i + 1] - line[i];
        const double len2 = seg.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((p - line[i]).dot(seg) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (p - (line[i] + t * seg)).norm());
    }
    return best;
}

double chinline_deviation(const Polyline& mask_boundary, const Shape& face_jaw)
{
    if (mask_boundary.empty()) {
        throw Error(ErrorCode::NoFootprint, "chinline_deviation: the mask has no footprint along the jaw");
    }
    if (face_jaw.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "chinline_deviation: need at least 2 jaw points");
    }
    double sum = 0.0;
    for (const Point& p : face_jaw) {
        sum += distance_to_polyline(p, mask_boundary);
    }
    return sum / static_cast<double>(face_jaw.size());
}

double chinline_deviation(const GrayImage& mask_alpha, const Shape& face_jaw)
{
    if (face_jaw.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "chinline_deviation: need at least 2 jaw points");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Point& p : face_jaw) {
        lo = std::min(lo, p.x());
        hi = std::max(hi, p.x());
    }
    return chinline_deviation(lower_boundary(mask_alpha, static_cast<int>(std::ceil(lo)),
                                             static_cast<int>(std::floor(hi))),
                              face_jaw);
}

}  // namespace shapefit
