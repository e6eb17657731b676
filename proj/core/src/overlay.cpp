#include "shapefit/overlay.hpp"

#include "shapefit/error.hpp"

#include <Eigen/QR>

#include <string>

namespace shapefit {

std::string_view to_string(OverlayMethod method)
{
    switch (method) {
    case OverlayMethod::SLA: return "sla";
    case OverlayMethod::DLA: return "dla";
    case OverlayMethod::DLA_SSA: return "dla_ssa";
    }
    return "dla_ssa";
}

OverlayMethod parse_overlay_method(std::string_view text)
{
    if (text == "sla") return OverlayMethod::SLA;
    if (text == "dla") return OverlayMethod::DLA;
    if (text == "dla_ssa") return OverlayMethod::DLA_SSA;
    throw Error(ErrorCode::Parse, "unknown overlay method '" + std::string(text) + "'");
}

std::string_view to_string(LandmarkSubset subset)
{
    return subset == LandmarkSubset::Mask17 ? "mask17" : "ibug68";
}

LandmarkSubset parse_landmark_subset(std::string_view text)
{
    if (text == "mask17") return LandmarkSubset::Mask17;
    if (text == "ibug68" || text == "full68") return LandmarkSubset::Full68;
    throw Error(ErrorCode::Parse, "unknown landmark subset '" + std::string(text) + "'");
}

Regularized regularize_landmarks_with_fit(const FaceAnnotation& face, const ShapeModel& model,
                                          const RegularizeOptions& options)
{
    validate(face);
    Regularized out;
    if (options.subset == LandmarkSubset::Mask17) {
        if (model.n_points() != kMaskLandmarkCount) {
            throw Error(ErrorCode::ShapeArity, "regularize_landmarks: mask17 subset needs a 17-point model, got "
                                                   + std::to_string(model.n_points()));
        }
        out.fit = fit(model, select_landmarks_17(face), options.fit);
        out.landmarks17 = out.fit.fitted_shape;
    } else {
        if (model.n_points() != kFaceLandmarkCount) {
            throw Error(ErrorCode::ShapeArity, "regularize_landmarks: ibug68 subset needs a 68-point model, got "
                                                   + std::to_string(model.n_points()));
        }
        out.fit = fit(model, face.landmarks, options.fit);
        out.landmarks17 = select_landmarks_17(out.fit.fitted_shape);
    }
    return out;
}

Shape regularize_landmarks(const FaceAnnotation& face, const ShapeModel& model, const RegularizeOptions& options)
{
    return regularize_landmarks_with_fit(face, model, options).landmarks17;
}

Eigen::Matrix<double, 2, 3> solve_affine(const Shape& from, const Shape& to)
{
    require_same_size(from, to, "solve_affine");
    if (from.size() < 3) {
        throw Error(ErrorCode::ShapeArity, "solve_affine: need at least 3 correspondences");
    }
    // Centre both sides for conditioning, then solve the 2x2 linear part.
    const Point from_mean = from.centroid();
    const Point to_mean = to.centroid();
    const auto n = static_cast<Eigen::Index>(from.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::MatrixXd rhs(n, 2);
    for (Eigen::Index k = 0; k < n; ++k) {
        design.row(k) = (from[static_cast<std::size_t>(k)] - from_mean).transpose();
        rhs.row(k) = (to[static_cast<std::size_t>(k)] - to_mean).transpose();
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 2) {
        throw Error(ErrorCode::DegenerateShape, "solve_affine: correspondences are collinear");
    }
    const Eigen::Matrix2d linear = qr.solve(rhs).transpose();

    Eigen::Matrix<double, 2, 3> affine;
    affine.leftCols<2>() = linear;
    affine.col(2) = to_mean - linear * from_mean;
    return affine;
}

Shape sparse_alignment_target(const MaskTemplate& mask, const Shape& landmarks68)
{
    Shape from(kSparseFaceIndices.size());
    Shape to(kSparseFaceIndices.size());
    for (std::size_t i = 0; i < kSparseFaceIndices.size(); ++i) {
        from[i] = mask.landmarks[kSparseMaskPositions[i]];
        to[i] = landmarks68[ibug(kSparseFaceIndices[i])];
    }
    const Eigen::Matrix<double, 2, 3> affine = solve_affine(from, to);
    Shape target(mask.landmarks.size());
    for (std::size_t i = 0; i < mask.landmarks.size(); ++i) {
        target[i] = affine.leftCols<2>() * mask.landmarks[i] + affine.col(2);
    }
    return target;
}

OverlayResult overlay_pipeline(const OverlayJob& job, const ShapeModel* model, const std::vector<MaskTemplate>& registry,
                               OverlayMethod method, const OverlayOptions& options)
{
    validate(job.face);

    OverlayResult result;
    if (job.face.label == ClassLabel::Correct) {
        result.image = job.image;
        result.footprint = GrayImage(job.image.width(), job.image.height(), 0.0);
        result.warnings.push_back("bypass: mask already worn correctly");
        return result;
    }

    const MaskTemplate& mask = select_template(job.face, registry, options.view_threshold);
    result.template_used = mask.name;
    result.method = method;

    switch (method) {
    case OverlayMethod::SLA:
        result.used_landmarks = sparse_alignment_target(mask, job.face.landmarks);
        break;
    case OverlayMethod::DLA:
        result.used_landmarks = select_landmarks_17(job.face);
        break;
    case OverlayMethod::DLA_SSA: {
        if (model == nullptr) {
            throw Error(ErrorCode::InvalidArgument, "overlay_pipeline: dla_ssa needs a shape model");
        }
        Regularized reg = regularize_landmarks_with_fit(job.face, *model, options.regularize);
        result.used_landmarks = std::move(reg.landmarks17);
        if (!reg.fit.converged) {
            result.warnings.push_back("shape fit stopped at the iteration limit");
        }
        result.fit = std::move(reg.fit);
        break;
    }
    }

    WarpedFragment fragment = warp_template(mask, result.used_landmarks);
    result.image = composite(job.image, fragment.image, fragment.offset);
    result.footprint = footprint(fragment, job.image.width(), job.image.height());
    for (auto& w : fragment.warnings) {
        result.warnings.push_back(std::move(w));
    }
    return result;
}

}  // namespace shapefit
