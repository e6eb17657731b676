#pragma once

#include "shapefit/image.hpp"
#include "shapefit/shape.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shapefit {

inline constexpr std::size_t kFaceLandmarkCount = 68;
inline constexpr std::size_t kMaskLandmarkCount = 17;

/// 1-based iBUG indices of the mask correspondences: jaw 2..16, then the
/// nose-bridge point 30 and the nose-bottom point 34.
inline constexpr std::array<int, kMaskLandmarkCount> kMaskFaceIndices = {
    2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 30, 34};

/// Positions within the 17-point mask convention.
inline constexpr std::size_t kMaskNoseBridge = 15;
inline constexpr std::size_t kMaskNoseBottom = 16;

/// Converts a 1-based iBUG index to a zero-based vector index.
constexpr std::size_t ibug(int one_based) { return static_cast<std::size_t>(one_based - 1); }

enum class ClassLabel { Correct, Incorrect, None };

std::string_view to_string(ClassLabel label);
ClassLabel parse_class_label(std::string_view text);

enum class View { Front, LeftProfile, RightProfile };

std::string_view to_string(View view);
View parse_view(std::string_view text);

/// Detector output for one face: 68 landmarks in pixels, iBUG order.
struct FaceAnnotation {
    std::string image_ref;
    Shape landmarks;
    ClassLabel label = ClassLabel::None;
};

/// Throws ShapeArity / InvalidShape unless the annotation has 68 finite points.
void validate(const FaceAnnotation& face);

/// Zero-based vertex indices into the 17 mask landmarks.
using Triangle = std::array<int, 3>;

struct MaskTemplate {
    std::string name;
    View view = View::Front;
    RgbaImage image;
    Shape landmarks;  ///< 17 points, template pixel coordinates
    std::vector<Triangle> triangulation;
};

/// Throws unless the template has 17 in-bounds landmarks and a triangulation
/// whose triangles are non-degenerate on those landmarks.
void validate(const MaskTemplate& mask);

/// Fan triangulation shared by every shipped template: the jaw chain fanned
/// around the nose-bottom point, closed over the nose bridge.
std::vector<Triangle> default_mask_triangulation();

Shape select_landmarks_17(const FaceAnnotation& face);
Shape select_landmarks_17(const Shape& landmarks68);

/// (d_L - d_R) / (d_L + d_R) with d_L, d_R the distances from the nose bridge
/// (28) to the jaw ends (1 and 17). Positive when the nose sits nearer the
/// image-right end of the jaw.
double yaw_proxy(const Shape& landmarks68);

/// |r| <= threshold picks the front template; r > threshold the right
/// profile; r < -threshold the left profile.
const MaskTemplate& select_template(const FaceAnnotation& face, const std::vector<MaskTemplate>& registry,
                                    double threshold = 0.25);

View select_view(double yaw, double threshold = 0.25);

}  // namespace shapefit
