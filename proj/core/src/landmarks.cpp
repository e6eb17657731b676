#include "shapefit/landmarks.hpp"

#include "shapefit/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace shapefit {

std::string_view to_string(ClassLabel label)
{
    switch (label) {
    case ClassLabel::Correct: return "correct";
    case ClassLabel::Incorrect: return "incorrect";
    case ClassLabel::None: return "none";
    }
    return "none";
}

ClassLabel parse_class_label(std::string_view text)
{
    if (text == "correct") return ClassLabel::Correct;
    if (text == "incorrect") return ClassLabel::Incorrect;
    if (text == "none") return ClassLabel::None;
    throw Error(ErrorCode::Parse, "unknown class label '" + std::string(text) + "'");
}

std::string_view to_string(View view)
{
    switch (view) {
    case View::Front: return "front";
    case View::LeftProfile: return "left_profile";
    case View::RightProfile: return "right_profile";
    }
    return "front";
}

View parse_view(std::string_view text)
{
    if (text == "front") return View::Front;
    if (text == "left_profile") return View::LeftProfile;
    if (text == "right_profile") return View::RightProfile;
    throw Error(ErrorCode::Parse, "unknown template view '" + std::string(text) + "'");
}

void validate(const FaceAnnotation& face)
{
    if (face.landmarks.size() != kFaceLandmarkCount) {
        throw Error(ErrorCode::ShapeArity, "face annotation needs 68 landmarks, got "
                                               + std::to_string(face.landmarks.size()));
    }
    require_finite(face.landmarks, "face annotation");
}

namespace {

double doubled_area(const Point& a, const Point& b, const Point& c)
{
    const Point u = b - a;
    const Point v = c - a;
    return u.x() * v.y() - u.y() * v.x();
}

}  // namespace

void validate(const MaskTemplate& mask)
{
    const std::string who = "template '" + mask.name + "'";
    if (mask.landmarks.size() != kMaskLandmarkCount) {
        throw Error(ErrorCode::ShapeArity,
                    who + ": needs 17 landmarks, got " + std::to_string(mask.landmarks.size()));
    }
    require_finite(mask.landmarks, "mask template");
    for (std::size_t i = 0; i < mask.landmarks.size(); ++i) {
        const Point& p = mask.landmarks[i];
        if (p.x() < 0.0 || p.y() < 0.0 || p.x() > mask.image.width() - 1 || p.y() > mask.image.height() - 1) {
            throw Error(ErrorCode::InvalidArgument,
                        who + ": landmark " + std::to_string(i + 1) + " lies outside the image");
        }
    }
    if (mask.triangulation.empty()) {
        throw Error(ErrorCode::InvalidArgument, who + ": empty triangulation");
    }
    for (std::size_t t = 0; t < mask.triangulation.size(); ++t) {
        const Triangle& tri = mask.triangulation[t];
        for (int v : tri) {
            if (v < 0 || v >= static_cast<int>(kMaskLandmarkCount)) {
                throw Error(ErrorCode::InvalidArgument,
                            who + ": triangle " + std::to_string(t + 1) + " has a vertex outside 1..17");
            }
        }
        const double area = doubled_area(mask.landmarks[tri[0]], mask.landmarks[tri[1]], mask.landmarks[tri[2]]);
        if (std::abs(area) <= 1e-9) {
            throw Error(ErrorCode::InvalidArgument,
                        who + ": triangle " + std::to_string(t + 1) + " is degenerate on the template landmarks");
        }
    }
}

std::vector<Triangle> default_mask_triangulation()
{
    std::vector<Triangle> tris;
    const int bottom = static_cast<int>(kMaskNoseBottom);
    const int bridge = static_cast<int>(kMaskNoseBridge);
    for (int j = 0; j + 1 < 15; ++j) {
        tris.push_back({j, j + 1, bottom});
    }
    tris.push_back({0, bottom, bridge});
    tris.push_back({bottom, 14, bridge});
    return tris;
}

Shape select_landmarks_17(const Shape& landmarks68)
{
    if (landmarks68.size() != kFaceLandmarkCount) {
        throw Error(ErrorCode::ShapeArity, "select_landmarks_17: need 68 landmarks, got "
                                               + std::to_string(landmarks68.size()));
    }
    Shape out(kMaskLandmarkCount);
    for (std::size_t i = 0; i < kMaskLandmarkCount; ++i) {
        out[i] = landmarks68[ibug(kMaskFaceIndices[i])];
    }
    return out;
}

Shape select_landmarks_17(const FaceAnnotation& face)
{
    return select_landmarks_17(face.landmarks);
}

double yaw_proxy(const Shape& landmarks68)
{
    if (landmarks68.size() != kFaceLandmarkCount) {
        throw Error(ErrorCode::ShapeArity, "yaw_proxy: need 68 landmarks");
    }
    const Point& bridge = landmarks68[ibug(28)];
    const double left = (bridge - landmarks68[ibug(1)]).norm();
    const double right = (bridge - landmarks68[ibug(17)]).norm();
    if (!(left + right > 0.0)) {
        throw Error(ErrorCode::DegenerateShape, "yaw_proxy: jaw ends coincide with the nose bridge");
    }
    return (left - right) / (left + right);
}

View select_view(double yaw, double threshold)
{
    if (std::abs(yaw) <= threshold) {
        return View::Front;
    }
    return yaw > 0.0 ? View::RightProfile : View::LeftProfile;
}

const MaskTemplate& select_template(const FaceAnnotation& face, const std::vector<MaskTemplate>& registry,
                                    double threshold)
{
    for (View v : {View::Front, View::LeftProfile, View::RightProfile}) {
        const bool present = std::any_of(registry.begin(), registry.end(),
                                         [v](const MaskTemplate& m) { return m.view == v; });
        if (!present) {
            throw Error(ErrorCode::RegistryIncomplete,
                        "no template registered for view '" + std::string(to_string(v)) + "'");
        }
    }
    const View wanted = select_view(yaw_proxy(face.landmarks), threshold);
    return *std::find_if(registry.begin(), registry.end(), [wanted](const MaskTemplate& m) { return m.view == wanted; });
}

}  // namespace shapefit
