#pragma once

#include "shapefit/image.hpp"
#include "shapefit/landmarks.hpp"
#include "shapefit/shape.hpp"
#include "shapefit/similarity.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace shapefit::synth {

/// Seeded source of uniforms and normals. The transforms from raw engine
/// output are spelled out so identical seeds give identical corpora with any
/// standard library.
class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    double uniform();  ///< [0, 1)
    double uniform(double lo, double hi);
    double normal();  ///< standard normal, Box-Muller
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline constexpr int kMaxModes = 6;
inline constexpr double kMaxYawDegrees = 36.0;

struct GeneratorOptions {
    int modes = 3;
    double noise = 0.0;       ///< landmark noise std-dev, pixels
    double yaw_min = 0.0;     ///< |yaw| lower bound, degrees
    double yaw_max = 0.0;     ///< |yaw| upper bound, degrees
    double scale_min = 90.0;  ///< pixels per face unit
    double scale_max = 110.0;
    double roll_max = 8.0;    ///< degrees
    Point center = Point(128.0, 120.0);
    double center_jitter = 8.0;
    double weight_clip = 2.5;  ///< mode weights are N(0, 1) truncated to this

    /// Throws InvalidArgument on out-of-range parameters.
    void validate() const;
};

struct SyntheticFace {
    Shape truth;     ///< 68 noise-free landmarks, pixels
    Shape observed;  ///< truth plus landmark noise
    double yaw = 0.0;  ///< radians
    Eigen::VectorXd weights;
    SimilarityTransform pose;
};

/// Parametric 3-D face: a base landmark layout, a set of deformation modes,
/// head yaw about the vertical axis, orthographic projection, then an image
/// similarity.
class FaceGenerator {
public:
    explicit FaceGenerator(GeneratorOptions options);

    const GeneratorOptions& options() const noexcept { return options_; }

    /// Frontal-space 2-D landmarks (face units) for given weights and yaw.
    Shape project(const Eigen::VectorXd& weights, double yaw) const;

    SyntheticFace sample(Random& rng) const;

    std::vector<SyntheticFace> sample(Random& rng, int count) const;

private:
    using Layout = std::array<Eigen::Vector3d, kFaceLandmarkCount>;

    GeneratorOptions options_;
    Layout base_;
    std::array<Layout, kMaxModes> modes_;
};

/// Flat-shaded face raster: background, skin inside the jaw-and-forehead
/// outline, darker eyes, nose and mouth.
RgbaImage render_face(const Shape& landmarks68, int width, int height);

/// Front, left-profile and right-profile mask templates drawn over the base
/// face, with the shared fan triangulation.
std::vector<MaskTemplate> make_mask_templates(double profile_yaw_degrees = 26.0);

/// Coverage-antialiased polygon fill; `paint` receives (x, y, coverage).
template <typename Paint>
void fill_polygon(int width, int height, const std::vector<Point>& polygon, Paint&& paint);

bool point_in_polygon(const Point& p, const std::vector<Point>& polygon);

template <typename Paint>
void fill_polygon(int width, int height, const std::vector<Point>& polygon, Paint&& paint)
{
    if (polygon.size() < 3) {
        return;
    }
    double lo_x = polygon[0].x(), hi_x = lo_x, lo_y = polygon[0].y(), hi_y = lo_y;
    for (const Point& p : polygon) {
        lo_x = std::min(lo_x, p.x());
        hi_x = std::max(hi_x, p.x());
        lo_y = std::min(lo_y, p.y());
        hi_y = std::max(hi_y, p.y());
    }
    constexpr int kSub = 4;
    const int x0 = std::max(0, static_cast<int>(std::floor(lo_x)) - 1);
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(hi_x)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(lo_y)) - 1);
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(hi_y)) + 1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            int hits = 0;
            for (int sy = 0; sy < kSub; ++sy) {
                for (int sx = 0; sx < kSub; ++sx) {
                    const Point s(x - 0.5 + (sx + 0.5) / kSub, y - 0.5 + (sy + 0.5) / kSub);
                    hits += point_in_polygon(s, polygon) ? 1 : 0;
                }
            }
            if (hits > 0) {
                paint(x, y, static_cast<float>(hits) / (kSub * kSub));
            }
        }
    }
}

}  // namespace shapefit::synth
