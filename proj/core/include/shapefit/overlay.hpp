#pragma once

#include "shapefit/image.hpp"
#include "shapefit/landmarks.hpp"
#include "shapefit/shape_model.hpp"
#include "shapefit/warp.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shapefit {

enum class OverlayMethod { SLA, DLA, DLA_SSA };

std::string_view to_string(OverlayMethod method);
OverlayMethod parse_overlay_method(std::string_view text);

/// Which landmarks the shape model was trained on.
enum class LandmarkSubset { Mask17, Full68 };

std::string_view to_string(LandmarkSubset subset);
LandmarkSubset parse_landmark_subset(std::string_view text);

struct RegularizeOptions {
    LandmarkSubset subset = LandmarkSubset::Mask17;
    FitOptions fit;
};

struct Regularized {
    Shape landmarks17;
    FitResult fit;
};

/// Fits the shape model to the face's landmarks and returns the model's
/// reconstruction of the 17 mask correspondences in image space.
Regularized regularize_landmarks_with_fit(const FaceAnnotation& face, const ShapeModel& model,
                                          const RegularizeOptions& options = {});

Shape regularize_landmarks(const FaceAnnotation& face, const ShapeModel& model, const RegularizeOptions& options = {});

/// 1-based iBUG face indices of the sparse baseline correspondences:
/// nose bridge, the two cheeks, and three chin points.
inline constexpr std::array<int, 6> kSparseFaceIndices = {28, 2, 16, 8, 9, 10};
/// Matching positions in the 17-point mask convention.
inline constexpr std::array<std::size_t, 6> kSparseMaskPositions = {kMaskNoseBridge, 0, 14, 6, 7, 8};

/// Least-squares affine map (2x3, [A | t]) taking `from` onto `to`.
Eigen::Matrix<double, 2, 3> solve_affine(const Shape& from, const Shape& to);

/// The sparse baseline: one affine map fitted to the six correspondences,
/// applied to all 17 template landmarks.
Shape sparse_alignment_target(const MaskTemplate& mask, const Shape& landmarks68);

struct OverlayJob {
    RgbaImage image;
    FaceAnnotation face;
};

struct OverlayOptions {
    double view_threshold = 0.25;
    RegularizeOptions regularize;
};

struct OverlayResult {
    RgbaImage image;
    Shape used_landmarks;  ///< 17 target points (empty on bypass)
    std::string template_used;
    std::optional<OverlayMethod> method;  ///< nullopt: bypassed for a correctly worn mask
    GrayImage footprint;  ///< mask alpha in image coordinates
    std::optional<FitResult> fit;
    std::vector<std::string> warnings;

    bool bypassed() const { return !method.has_value(); }
};

/// `model` may be null unless method == DLA_SSA.
OverlayResult overlay_pipeline(const OverlayJob& job, const ShapeModel* model, const std::vector<MaskTemplate>& registry,
                               OverlayMethod method, const OverlayOptions& options = {});

}  // namespace shapefit
