#pragma once

#include "shapefit/image.hpp"
#include "shapefit/landmarks.hpp"
#include "shapefit/overlay.hpp"
#include "shapefit/shape_model.hpp"
#include "shapefit/synthetic.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace shapefit::eval {

/// One evaluation case: an image, the detector's landmarks, and the
/// ground-truth landmarks whose jaw the mask should follow.
struct EvalCase {
    std::string name;
    RgbaImage image;
    FaceAnnotation face;
    Shape truth;  ///< 68 points
};

/// Case directory layout: <dir>/<case>/{face.png, landmarks.json, truth.json}.
std::vector<EvalCase> load_cases(const std::filesystem::path& dir);
void save_case(const std::filesystem::path& dir, const EvalCase& c);

/// Cases rendered from generator samples; names are "<prefix>_NNN".
std::vector<EvalCase> make_cases(const synth::FaceGenerator& generator, synth::Random& rng, int count,
                                 int width, int height, const std::string& prefix = "case");

/// Jaw points 2..16 of a 68-point shape.
Shape jaw_points(const Shape& landmarks68);

inline constexpr std::array<OverlayMethod, 3> kMethods = {OverlayMethod::SLA, OverlayMethod::DLA,
                                                          OverlayMethod::DLA_SSA};

struct EvalRow {
    std::string case_name;
    OverlayMethod method = OverlayMethod::DLA_SSA;
    std::string template_used;
    double deviation = 0.0;     ///< chin-line deviation, px
    double fit_residual = 0.0;  ///< dla_ssa only; 0 otherwise
};

struct MethodSummary {
    OverlayMethod method = OverlayMethod::DLA_SSA;
    std::size_t cases = 0;
    double mean_deviation = 0.0;
    double max_deviation = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;  ///< case name order, then method order
    std::array<MethodSummary, 3> summary;

    const MethodSummary& of(OverlayMethod method) const;
};

struct EvalOptions {
    OverlayOptions overlay;
    unsigned jobs = 1;
};

EvalReport evaluate(const std::vector<EvalCase>& cases, const ShapeModel& model,
                    const std::vector<MaskTemplate>& registry, const EvalOptions& options = {});

/// case,method,template,deviation_px,fit_residual
std::string format_csv(const EvalReport& report);
std::string format_summary(const EvalReport& report);

}  // namespace shapefit::eval
