#include "shapefit/evaluation.hpp"

#include "shapefit/error.hpp"
#include "shapefit/io.hpp"
#include "shapefit/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <sstream>

namespace shapefit::eval {

namespace fs = std::filesystem;

Shape jaw_points(const Shape& landmarks68)
{
    if (landmarks68.size() != kFaceLandmarkCount) {
        throw Error(ErrorCode::ShapeArity, "jaw_points: need 68 landmarks");
    }
    Shape jaw(15);
    for (int i = 0; i < 15; ++i) {
        jaw[static_cast<std::size_t>(i)] = landmarks68[ibug(2 + i)];
    }
    return jaw;
}

namespace {

Shape single_entry(const fs::path& path, std::optional<ClassLabel>* label)
{
    const io::LandmarkFile file = io::read_landmark_file(path);
    if (file.convention != io::Convention::Ibug68 || file.entries.size() != 1) {
        throw Error(ErrorCode::Parse, path.string() + ": expected exactly one ibug68 entry");
    }
    if (label != nullptr) {
        *label = file.entries.front().class_label;
    }
    return file.entries.front().points;
}

}  // namespace

std::vector<EvalCase> load_cases(const fs::path& dir)
{
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::Io, "case directory '" + dir.string() + "' does not exist");
    }
    std::vector<fs::path> case_dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && fs::exists(entry.path() / "landmarks.json")) {
            case_dirs.push_back(entry.path());
        }
    }
    if (case_dirs.empty()) {
        throw Error(ErrorCode::InvalidArgument, "case directory '" + dir.string() + "' holds no cases");
    }
    std::sort(case_dirs.begin(), case_dirs.end());

    std::vector<EvalCase> cases;
    for (const auto& path : case_dirs) {
        EvalCase c;
        c.name = path.filename().string();
        std::optional<ClassLabel> label;
        c.face.landmarks = single_entry(path / "landmarks.json", &label);
        c.face.label = label.value_or(ClassLabel::None);
        c.face.image_ref = (path / "face.png").string();
        c.truth = single_entry(path / "truth.json", nullptr);
        c.image = io::read_png(path / "face.png");
        cases.push_back(std::move(c));
    }
    return cases;
}

void save_case(const fs::path& dir, const EvalCase& c)
{
    const fs::path root = dir / c.name;
    io::write_png(root / "face.png", c.image);

    io::LandmarkFile observed;
    observed.entries.push_back({"face.png", c.face.landmarks, c.face.label});
    io::write_landmark_file(root / "landmarks.json", observed);

    io::LandmarkFile truth;
    truth.entries.push_back({"face.png", c.truth, std::nullopt});
    io::write_landmark_file(root / "truth.json", truth);
}

std::vector<EvalCase> make_cases(const synth::FaceGenerator& generator, synth::Random& rng, int count, int width,
                                 int height, const std::string& prefix)
{
    std::vector<EvalCase> cases;
    for (int i = 0; i < count; ++i) {
        const synth::SyntheticFace face = generator.sample(rng);
        EvalCase c;
        char name[64];
        std::snprintf(name, sizeof name, "%s_%03d", prefix.c_str(), i);
        c.name = name;
        c.image = synth::render_face(face.truth, width, height);
        c.face.image_ref = "face.png";
        c.face.landmarks = face.observed;
        c.face.label = ClassLabel::None;
        c.truth = face.truth;
        cases.push_back(std::move(c));
    }
    return cases;
}

const MethodSummary& EvalReport::of(OverlayMethod method) const
{
    return *std::find_if(summary.begin(), summary.end(), [method](const MethodSummary& s) { return s.method == method; });
}

namespace {

std::array<EvalRow, 3> evaluate_case(const EvalCase& c, const ShapeModel& model,
                                     const std::vector<MaskTemplate>& registry, const OverlayOptions& options)
{
    OverlayJob job{c.image, c.face};
    job.face.label = ClassLabel::None;
    const Shape jaw = jaw_points(c.truth);

    std::array<EvalRow, 3> rows;
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
        const OverlayResult result = overlay_pipeline(job, &model, registry, kMethods[m], options);
        EvalRow& row = rows[m];
        row.case_name = c.name;
        row.method = kMethods[m];
        row.template_used = result.template_used;
        row.deviation = chinline_deviation(result.footprint, jaw);
        row.fit_residual = result.fit ? result.fit->residual : 0.0;
    }
    return rows;
}

}  // namespace

EvalReport evaluate(const std::vector<EvalCase>& cases, const ShapeModel& model,
                    const std::vector<MaskTemplate>& registry, const EvalOptions& options)
{
    if (cases.empty()) {
        throw Error(ErrorCode::InvalidArgument, "evaluate: no cases");
    }
    std::vector<std::size_t> order(cases.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cases[a].name < cases[b].name; });

    std::vector<std::array<EvalRow, 3>> per_case(cases.size());
    const unsigned jobs = std::max(1u, options.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < cases.size(); ++i) {
            per_case[i] = evaluate_case(cases[order[i]], model, registry, options.overlay);
        }
    } else {
        std::vector<std::future<void>> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < cases.size(); i += jobs) {
                    per_case[i] = evaluate_case(cases[order[i]], model, registry, options.overlay);
                }
            }));
        }
        for (auto& f : workers) {
            f.get();
        }
    }

    EvalReport report;
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
        report.summary[m].method = kMethods[m];
    }
    for (const auto& rows : per_case) {
        for (std::size_t m = 0; m < rows.size(); ++m) {
            MethodSummary& s = report.summary[m];
            s.cases += 1;
            s.mean_deviation += rows[m].deviation;
            s.max_deviation = std::max(s.max_deviation, rows[m].deviation);
            report.rows.push_back(rows[m]);
        }
    }
    for (auto& s : report.summary) {
        s.mean_deviation /= static_cast<double>(s.cases);
    }
    return report;
}

std::string format_csv(const EvalReport& report)
{
    std::ostringstream out;
    out << "case,method,template,deviation_px,fit_residual\n";
    char buffer[256];
    for (const auto& row : report.rows) {
        std::snprintf(buffer, sizeof buffer, "%s,%s,%s,%.6f,%.6f\n", row.case_name.c_str(),
                      std::string(to_string(row.method)).c_str(), row.template_used.c_str(), row.deviation,
                      row.fit_residual);
        out << buffer;
    }
    return out.str();
}

std::string format_summary(const EvalReport& report)
{
    std::ostringstream out;
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, "chin-line deviation over %zu cases (px)\n", report.summary[0].cases);
    out << buffer;
    for (const auto& s : report.summary) {
        std::snprintf(buffer, sizeof buffer, "  %-8s mean %8.4f   max %8.4f\n", std::string(to_string(s.method)).c_str(),
                      s.mean_deviation, s.max_deviation);
        out << buffer;
    }
    const bool ordered = report.of(OverlayMethod::DLA_SSA).mean_deviation < report.of(OverlayMethod::DLA).mean_deviation
                         && report.of(OverlayMethod::DLA).mean_deviation < report.of(OverlayMethod::SLA).mean_deviation;
    out << "  ordering dla_ssa < dla < sla: " << (ordered ? "yes" : "no") << "\n";
    return out.str();
}

}  // namespace shapefit::eval
