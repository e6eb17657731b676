#include "shapefit/synthetic.hpp"

#include "shapefit/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace shapefit::synth {

double Random::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Random::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double Random::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    do {
        u = uniform();
    } while (u <= 0.0);
    const double v = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * std::numbers::pi * v;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void GeneratorOptions::validate() const
{
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
    if (modes < 0 || modes > kMaxModes) {
        bad("modes must lie in 0.." + std::to_string(kMaxModes));
    }
    if (!(noise >= 0.0)) {
        bad("noise must be non-negative");
    }
    if (!(yaw_min >= 0.0 && yaw_min <= yaw_max && yaw_max <= kMaxYawDegrees)) {
        bad("yaw range must satisfy 0 <= min <= max <= " + std::to_string(static_cast<int>(kMaxYawDegrees)));
    }
    if (!(scale_min > 0.0 && scale_min <= scale_max)) {
        bad("scale range must satisfy 0 < min <= max");
    }
    if (!(roll_max >= 0.0 && roll_max < 90.0)) {
        bad("roll must lie in [0, 90)");
    }
    if (!(center_jitter >= 0.0) || !(weight_clip > 0.0)) {
        bad("center jitter must be non-negative and the weight clip positive");
    }
}

namespace {

using Vec3 = Eigen::Vector3d;

constexpr double kPi = std::numbers::pi;

double jaw_angle(int k)
{
    return kPi * (0.1 + 0.8 * k / 16.0);
}

}  // namespace

FaceGenerator::FaceGenerator(GeneratorOptions options) : options_(options)
{
    options_.validate();

    for (auto& mode : modes_) {
        mode.fill(Vec3::Zero());
    }

    // Jaw, 1..17, subject's right (image left) to subject's left.
    for (int k = 0; k < 17; ++k) {
        const double phi = jaw_angle(k);
        const double s = std::sin(phi);
        const double c = std::cos(phi);
        base_[ibug(1 + k)] = Vec3(-c, -0.45 + 1.35 * s, -0.8 + 0.6 * s);
        modes_[0][ibug(1 + k)] = Vec3(0.0, 0.22 * s * s * s * s, 0.0);            // chin length
        modes_[1][ibug(1 + k)] = Vec3(-0.16 * c * s * s, 0.0, 0.0);               // lower jaw width
        modes_[2][ibug(1 + k)] = Vec3(0.0, -0.12 * c * s, 0.0);                   // jaw tilt
        modes_[4][ibug(1 + k)] = Vec3(0.0, 0.12 * std::pow(std::sin(2.0 * phi), 2), 0.0);  // squareness
    }
    // Brows, 18..27.
    for (int k = 0; k < 5; ++k) {
        const double t = k / 4.0;
        const double lift = -0.62 - 0.08 * std::sin(kPi * t);
        base_[ibug(18 + k)] = Vec3(-0.8 + 0.6 * t, lift, 0.0);
        base_[ibug(23 + k)] = Vec3(0.2 + 0.6 * t, -0.62 - 0.08 * std::sin(kPi * t), 0.0);
        modes_[5][ibug(18 + k)] = Vec3(0.0, -0.06, 0.0);
        modes_[5][ibug(23 + k)] = Vec3(0.0, -0.06, 0.0);
    }
    // Nose bridge 28..31 and nostrils 32..36.
    for (int k = 0; k < 4; ++k) {
        base_[ibug(28 + k)] = Vec3(0.0, -0.45 + 0.15 * k, 0.12 + 0.1 * k);
        modes_[3][ibug(28 + k)] = Vec3(0.0, 0.025 * k, 0.0);
        modes_[2][ibug(28 + k)] = Vec3(0.01 * k, 0.0, 0.0);
    }
    const std::array<double, 5> nostril_x = {-0.18, -0.09, 0.0, 0.09, 0.18};
    const std::array<double, 5> nostril_y = {0.10, 0.12, 0.13, 0.12, 0.10};
    const std::array<double, 5> nostril_z = {0.20, 0.26, 0.30, 0.26, 0.20};
    for (int k = 0; k < 5; ++k) {
        base_[ibug(32 + k)] = Vec3(nostril_x[k], nostril_y[k], nostril_z[k]);
        modes_[3][ibug(32 + k)] = Vec3(0.0, 0.08, 0.0);
    }
    // Eyes 37..42 and 43..48: outer/inner corner, two upper, two lower.
    const std::array<Eigen::Vector2d, 6> eye = {Eigen::Vector2d(-0.16, 0.0), Eigen::Vector2d(-0.06, -0.06),
                                                Eigen::Vector2d(0.06, -0.06),  Eigen::Vector2d(0.16, 0.0),
                                                Eigen::Vector2d(0.06, 0.05),   Eigen::Vector2d(-0.06, 0.05)};
    for (int k = 0; k < 6; ++k) {
        base_[ibug(37 + k)] = Vec3(-0.4 + eye[k].x(), -0.42 + eye[k].y(), -0.02);
        base_[ibug(43 + k)] = Vec3(0.4 + eye[k].x(), -0.42 + eye[k].y(), -0.02);
        modes_[5][ibug(37 + k)] = Vec3(-0.05, 0.0, 0.0);
        modes_[5][ibug(43 + k)] = Vec3(0.05, 0.0, 0.0);
    }
    // Mouth: outer 49..60, inner 61..68, starting at the image-left corner over the top.
    for (int k = 0; k < 12; ++k) {
        const double theta = kPi - k * (2.0 * kPi / 12.0);
        const double s = std::sin(theta);
        base_[ibug(49 + k)] = Vec3(0.28 * std::cos(theta), 0.45 - (s > 0.0 ? 0.09 : 0.11) * s, 0.18);
        modes_[0][ibug(49 + k)] = Vec3(0.0, 0.08, 0.0);
        modes_[1][ibug(49 + k)] = Vec3(0.04 * std::cos(theta), 0.0, 0.0);
    }
    for (int k = 0; k < 8; ++k) {
        const double theta = kPi - k * (2.0 * kPi / 8.0);
        base_[ibug(61 + k)] = Vec3(0.2 * std::cos(theta), 0.45 - 0.03 * std::sin(theta), 0.18);
        modes_[0][ibug(61 + k)] = Vec3(0.0, 0.08, 0.0);
        modes_[1][ibug(61 + k)] = Vec3(0.03 * std::cos(theta), 0.0, 0.0);
    }
}

Shape FaceGenerator::project(const Eigen::VectorXd& weights, double yaw) const
{
    if (weights.size() > kMaxModes) {
        throw Error(ErrorCode::InvalidArgument, "too many mode weights");
    }
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    Shape out(kFaceLandmarkCount);
    for (std::size_t i = 0; i < kFaceLandmarkCount; ++i) {
        Vec3 p = base_[i];
        for (Eigen::Index m = 0; m < weights.size(); ++m) {
            p += weights[m] * modes_[static_cast<std::size_t>(m)][i];
        }
        out[i] = Point(c * p.x() + s * p.z(), p.y());
    }
    return out;
}

SyntheticFace FaceGenerator::sample(Random& rng) const
{
    const GeneratorOptions& o = options_;
    SyntheticFace face;
    face.weights.resize(o.modes);
    for (int m = 0; m < o.modes; ++m) {
        face.weights[m] = std::clamp(rng.normal(), -o.weight_clip, o.weight_clip);
    }
    const double magnitude = rng.uniform(o.yaw_min, o.yaw_max);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    face.yaw = sign * magnitude * kPi / 180.0;

    face.pose.scale = rng.uniform(o.scale_min, o.scale_max);
    face.pose.rotation = rng.uniform(-o.roll_max, o.roll_max) * kPi / 180.0;
    face.pose.translation = o.center + Point(rng.uniform(-o.center_jitter, o.center_jitter),
                                             rng.uniform(-o.center_jitter, o.center_jitter));

    face.truth = apply_transform(face.pose, project(face.weights, face.yaw));
    face.observed = face.truth;
    if (o.noise > 0.0) {
        for (auto& p : face.observed) {
            const double dx = rng.normal();
            const double dy = rng.normal();
            p += o.noise * Point(dx, dy);
        }
    }
    return face;
}

std::vector<SyntheticFace> FaceGenerator::sample(Random& rng, int count) const
{
    std::vector<SyntheticFace> faces;
    faces.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        faces.push_back(sample(rng));
    }
    return faces;
}

bool point_in_polygon(const Point& p, const std::vector<Point>& polygon)
{
    bool inside = false;
    for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
        const Point& a = polygon[i];
        const Point& b = polygon[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

namespace {

void paint_over(RgbaImage& image, const std::vector<Point>& polygon, const Rgba& color)
{
    fill_polygon(image.width(), image.height(), polygon, [&](int x, int y, float coverage) {
        Rgba& dst = image.at(x, y);
        dst.r = coverage * color.r + (1.0f - coverage) * dst.r;
        dst.g = coverage * color.g + (1.0f - coverage) * dst.g;
        dst.b = coverage * color.b + (1.0f - coverage) * dst.b;
        dst.a = 1.0f;
    });
}

std::vector<Point> range(const Shape& s, int first, int last)
{
    std::vector<Point> out;
    for (int i = first; i <= last; ++i) {
        out.push_back(s[ibug(i)]);
    }
    return out;
}

}  // namespace

RgbaImage render_face(const Shape& landmarks68, int width, int height)
{
    if (landmarks68.size() != kFaceLandmarkCount) {
        throw Error(ErrorCode::ShapeArity, "render_face: need 68 landmarks");
    }
    RgbaImage image(width, height, Rgba{0.30f, 0.34f, 0.40f, 1.0f});
    const Shape& s = landmarks68;

    std::vector<Point> outline = range(s, 1, 17);
    const Point left = s[ibug(1)];
    const Point right = s[ibug(17)];
    const Point centre = 0.5 * (left + right);
    const Point across = (right - left) / (right - left).norm();
    const Point up = (s[ibug(28)] - s[ibug(9)]).normalized();
    const double half_width = 0.5 * (right - left).norm();
    const double rise = 0.85 * (s[ibug(9)] - centre).norm();
    for (int i = 1; i < 16; ++i) {
        const double theta = i * kPi / 16.0;
        outline.push_back(centre + across * half_width * std::cos(theta) + up * rise * std::sin(theta));
    }
    paint_over(image, outline, {0.87f, 0.70f, 0.58f, 1.0f});

    const Rgba feature{0.16f, 0.12f, 0.10f, 1.0f};
    paint_over(image, range(s, 37, 42), feature);
    paint_over(image, range(s, 43, 48), feature);
    for (int first : {18, 23}) {
        std::vector<Point> brow = range(s, first, first + 4);
        for (int i = first + 4; i >= first; --i) {
            brow.push_back(s[ibug(i)] - 0.04 * rise * up);
        }
        paint_over(image, brow, {0.35f, 0.25f, 0.18f, 1.0f});
    }
    std::vector<Point> nose = range(s, 32, 36);
    nose.push_back(s[ibug(31)]);
    paint_over(image, nose, {0.74f, 0.56f, 0.46f, 1.0f});
    paint_over(image, range(s, 49, 60), {0.70f, 0.35f, 0.35f, 1.0f});
    paint_over(image, range(s, 61, 68), {0.35f, 0.15f, 0.15f, 1.0f});
    return image;
}

std::vector<MaskTemplate> make_mask_templates(double profile_yaw_degrees)
{
    GeneratorOptions options;
    options.modes = 0;
    const FaceGenerator generator(options);

    constexpr int kSize = 256;
    constexpr double kScale = 100.0;
    const Point origin(128.0, 100.0);

    struct Layout {
        const char* name;
        View view;
        double yaw;
    };
    const std::array<Layout, 3> layouts = {Layout{"mask_front", View::Front, 0.0},
                                           Layout{"mask_left", View::LeftProfile, -profile_yaw_degrees},
                                           Layout{"mask_right", View::RightProfile, profile_yaw_degrees}};

    std::vector<MaskTemplate> templates;
    for (const Layout& layout : layouts) {
        Shape face = generator.project(Eigen::VectorXd(0), layout.yaw * kPi / 180.0);
        for (auto& p : face) {
            p = origin + kScale * p;
        }

        MaskTemplate mask;
        mask.name = layout.name;
        mask.view = layout.view;
        mask.landmarks = select_landmarks_17(face);
        mask.triangulation = default_mask_triangulation();

        const Rgba cloth{0.62f, 0.80f, 0.92f, 0.0f};
        mask.image = RgbaImage(kSize, kSize, cloth);
        std::vector<Point> outline;
        for (std::size_t i = 0; i <= kMaskNoseBridge; ++i) {
            outline.push_back(mask.landmarks[i]);
        }
        fill_polygon(kSize, kSize, outline, [&](int x, int y, float coverage) {
            const float pleat = 0.9f + 0.1f * static_cast<float>(std::cos(2.0 * kPi * y / 12.0));
            mask.image.at(x, y) = {cloth.r * pleat, cloth.g * pleat, cloth.b * pleat, coverage};
        });
        validate(mask);
        templates.push_back(std::move(mask));
    }
    return templates;
}

}  // namespace shapefit::synth
