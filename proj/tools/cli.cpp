#include "cli.hpp"

#include "shapefit/error.hpp"
#include "shapefit/evaluation.hpp"
#include "shapefit/io.hpp"
#include "shapefit/overlay.hpp"
#include "shapefit/shape_model.hpp"
#include "shapefit/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace shapefit::cli {

namespace fs = std::filesystem;

namespace {

std::string format_number(double v)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.6g", v);
    return buffer;
}

struct BuildArgs {
    std::string landmarks;
    std::string out;
    double variance = 0.98;
    std::string subset = "mask17";
    std::string match;
    double tol = 1e-7;
    int max_iter = 100;
};

int build_model_command(const BuildArgs& args, std::ostream& out, std::ostream& err)
{
    const io::LandmarkFile file = io::read_landmark_file(args.landmarks);
    const LandmarkSubset subset = parse_landmark_subset(args.subset);
    if (subset == LandmarkSubset::Full68 && file.convention != io::Convention::Ibug68) {
        throw Error(ErrorCode::InvalidArgument, "--subset ibug68 needs an ibug68-1based landmark file");
    }

    std::vector<Shape> corpus;
    for (const auto& entry : file.entries) {
        if (!args.match.empty() && entry.image_path.find(args.match) == std::string::npos) {
            continue;
        }
        const bool pick17 = subset == LandmarkSubset::Mask17 && file.convention == io::Convention::Ibug68;
        corpus.push_back(pick17 ? select_landmarks_17(entry.points) : entry.points);
    }
    if (corpus.size() < 2) {
        throw Error(ErrorCode::CorpusTooSmall, "need at least 2 shapes to build a model, got "
                                                   + std::to_string(corpus.size()));
    }

    BuildOptions options;
    options.variance_fraction = args.variance;
    options.procrustes.tol = args.tol;
    options.procrustes.max_iter = args.max_iter;
    const BuildResult result = build_model_with_report(corpus, options);
    if (result.alignment.warning) {
        err << "warning: " << *result.alignment.warning << "\n";
    }

    io::write_model_file(args.out, {result.model, subset});

    out << "shapes: " << corpus.size() << "\n";
    out << "points: " << result.model.n_points() << " (" << to_string(subset) << ")\n";
    out << "procrustes iterations: " << result.alignment.iterations
        << (result.alignment.converged ? "" : " (not converged)") << "\n";
    out << "t: " << result.model.t() << "\n";
    const double total = result.spectrum.sum();
    out << "eigenvalues:";
    const Eigen::Index shown = std::min<Eigen::Index>(result.spectrum.size(), std::max<Eigen::Index>(result.model.t() + 2, 5));
    for (Eigen::Index i = 0; i < shown; ++i) {
        out << " " << format_number(result.spectrum[i]);
    }
    out << "\n";
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < result.model.t(); ++i) {
        cumulative += result.spectrum[i];
    }
    out << "retained variance: " << format_number(total > 0.0 ? cumulative / total : 0.0) << "\n";
    return kSuccess;
}

struct OverlayArgs {
    std::string image;
    std::string landmarks;
    std::string model;
    std::string templates;
    std::string method = "dla_ssa";
    std::string label;
    std::string out;
    int entry = 1;
    double view_threshold = 0.25;
};

int overlay_command(const OverlayArgs& args, std::ostream& out, std::ostream& err)
{
    const io::LandmarkFile file = io::read_landmark_file(args.landmarks);
    if (file.convention != io::Convention::Ibug68) {
        throw Error(ErrorCode::InvalidArgument, "overlay needs an ibug68-1based landmark file");
    }
    if (args.entry < 1 || static_cast<std::size_t>(args.entry) > file.entries.size()) {
        throw Error(ErrorCode::InvalidArgument, "--entry " + std::to_string(args.entry) + " is out of range");
    }
    const io::LandmarkEntry& entry = file.entries[static_cast<std::size_t>(args.entry - 1)];

    OverlayJob job;
    job.face.image_ref = args.image;
    job.face.landmarks = entry.points;
    job.face.label = args.label.empty() ? entry.class_label.value_or(ClassLabel::None) : parse_class_label(args.label);
    const OverlayMethod method = parse_overlay_method(args.method);

    if (job.face.label == ClassLabel::Correct) {
        err << "warning: bypass: label 'correct', writing the input unchanged\n";
        fs::copy_file(args.image, args.out, fs::copy_options::overwrite_existing);
        out << "method: bypass\n";
        return kSuccess;
    }

    job.image = io::read_png(args.image);
    const std::vector<MaskTemplate> registry = io::load_templates(args.templates);

    std::optional<io::ModelFile> model;
    OverlayOptions options;
    options.view_threshold = args.view_threshold;
    if (!args.model.empty()) {
        model = io::read_model_file(args.model);
        options.regularize.subset = model->subset;
    } else if (method == OverlayMethod::DLA_SSA) {
        throw Error(ErrorCode::InvalidArgument, "--model is required for --method dla_ssa");
    }

    const OverlayResult result =
        overlay_pipeline(job, model ? &model->model : nullptr, registry, method, options);
    for (const auto& w : result.warnings) {
        err << "warning: " << w << "\n";
    }
    io::write_png(args.out, result.image);

    out << "method: " << to_string(method) << "\n";
    out << "template: " << result.template_used << "\n";
    if (result.fit) {
        out << "fit residual: " << format_number(result.fit->residual) << "\n";
        out << "fit iterations: " << result.fit->iterations << "\n";
        out << "b:";
        for (Eigen::Index j = 0; j < result.fit->b.size(); ++j) {
            out << " " << format_number(result.fit->b[j]);
        }
        out << "\n";
    }
    return kSuccess;
}

struct EvalArgs {
    std::string cases;
    std::string model;
    std::string templates;
    std::string out;
    unsigned jobs = 1;
};

int eval_command(const EvalArgs& args, std::ostream& out, std::ostream&)
{
    const std::vector<eval::EvalCase> cases = eval::load_cases(args.cases);
    const io::ModelFile model = io::read_model_file(args.model);
    const std::vector<MaskTemplate> registry = io::load_templates(args.templates);

    eval::EvalOptions options;
    options.jobs = args.jobs;
    options.overlay.regularize.subset = model.subset;
    const eval::EvalReport report = eval::evaluate(cases, model.model, registry, options);

    const std::string summary = eval::format_summary(report);
    io::write_text(args.out, eval::format_csv(report));
    io::write_text(args.out + ".summary.txt", summary);
    out << summary;
    return kSuccess;
}

struct GenArgs {
    int n = 130;
    int modes = 3;
    double noise = 0.0;
    double yaw_range = 0.0;
    std::optional<std::uint64_t> seed;
    std::string out;
    int cases = 0;
    std::optional<double> case_noise;
    double case_yaw_min = 0.0;
    std::optional<double> case_yaw_max;
    int width = 256;
    int height = 256;
    double profile_yaw = 26.0;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag)
{
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("SHAPEFIT_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != nullptr && *end == '\0') {
            return v;
        }
        throw CLI::ValidationError("SHAPEFIT_SEED", "must be an unsigned integer");
    }
    throw CLI::RequiredError("--seed (or SHAPEFIT_SEED)");
}

int gen_synthetic_command(const GenArgs& args, std::ostream& out, std::ostream&)
{
    const std::uint64_t seed = resolve_seed(args.seed);
    if (args.n < 0 || args.cases < 0 || args.width < 16 || args.height < 16) {
        throw Error(ErrorCode::InvalidArgument, "--n and --cases must be non-negative, images at least 16x16");
    }

    synth::GeneratorOptions corpus_options;
    corpus_options.modes = args.modes;
    corpus_options.noise = args.noise;
    corpus_options.yaw_max = args.yaw_range;
    corpus_options.center = Point(args.width / 2.0, args.height * 0.47);
    corpus_options.scale_min = 0.35 * std::min(args.width, args.height);
    corpus_options.scale_max = 0.43 * std::min(args.width, args.height);
    const synth::FaceGenerator corpus_generator(corpus_options);

    synth::GeneratorOptions case_options = corpus_options;
    case_options.noise = args.case_noise.value_or(args.noise);
    case_options.yaw_min = args.case_yaw_min;
    case_options.yaw_max = args.case_yaw_max.value_or(std::max(args.yaw_range, args.case_yaw_min));
    const synth::FaceGenerator case_generator(case_options);

    const fs::path dir = args.out;
    synth::Random corpus_rng(seed);
    io::LandmarkFile corpus;
    for (int i = 0; i < args.n; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "synthetic_%04d", i);
        corpus.entries.push_back({name, corpus_generator.sample(corpus_rng).observed, ClassLabel::None});
    }
    io::write_landmark_file(dir / "corpus.json", corpus);

    io::save_templates(dir / "templates" / "manifest.json", synth::make_mask_templates(args.profile_yaw));

    synth::Random case_rng(seed ^ 0x9e3779b97f4a7c15ull);
    const std::vector<eval::EvalCase> cases =
        eval::make_cases(case_generator, case_rng, args.cases, args.width, args.height);
    for (const auto& c : cases) {
        eval::save_case(dir / "cases", c);
    }

    out << "corpus: " << args.n << " shapes -> " << (dir / "corpus.json").string() << "\n";
    out << "templates: " << (dir / "templates" / "manifest.json").string() << "\n";
    out << "cases: " << cases.size() << (cases.empty() ? "" : " -> " + (dir / "cases").string()) << "\n";
    return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"shapefit: statistical face-shape models and mask overlay"};
    app.require_subcommand(1);

    BuildArgs build_args;
    auto* build = app.add_subcommand("build-model", "Build a shape model from a landmark corpus");
    build->add_option("--landmarks", build_args.landmarks, "Landmark file")->required();
    build->add_option("--out", build_args.out, "Model file to write")->required();
    build->add_option("--variance", build_args.variance, "Retained variance fraction")->check(CLI::Range(0.0, 1.0));
    build->add_option("--subset", build_args.subset, "mask17 or ibug68")->check(CLI::IsMember({"mask17", "ibug68"}));
    build->add_option("--match", build_args.match, "Keep only entries whose image_path contains this text");
    build->add_option("--tol", build_args.tol, "Procrustes tolerance on mean movement");
    build->add_option("--max-iter", build_args.max_iter, "Procrustes iteration limit")->check(CLI::PositiveNumber);

    OverlayArgs overlay_args;
    auto* overlay = app.add_subcommand("overlay", "Put a mask on one face image");
    overlay->add_option("--image", overlay_args.image, "Face image (PNG)")->required();
    overlay->add_option("--landmarks", overlay_args.landmarks, "ibug68 landmark file")->required();
    overlay->add_option("--model", overlay_args.model, "Shape model (required for dla_ssa)");
    overlay->add_option("--templates", overlay_args.templates, "Template manifest")->required();
    overlay->add_option("--method", overlay_args.method, "dla_ssa, dla or sla")
        ->check(CLI::IsMember({"dla_ssa", "dla", "sla"}));
    overlay->add_option("--label", overlay_args.label, "none, incorrect or correct")
        ->check(CLI::IsMember({"none", "incorrect", "correct"}));
    overlay->add_option("--entry", overlay_args.entry, "1-based entry in the landmark file");
    overlay->add_option("--view-threshold", overlay_args.view_threshold, "Yaw proxy threshold for profile templates");
    overlay->add_option("--out", overlay_args.out, "Output image (PNG)")->required();

    EvalArgs eval_args;
    auto* evaluate = app.add_subcommand("eval", "Compare sla, dla and dla_ssa on a case directory");
    evaluate->add_option("--cases", eval_args.cases, "Case directory")->required();
    evaluate->add_option("--model", eval_args.model, "Shape model")->required();
    evaluate->add_option("--templates", eval_args.templates, "Template manifest")->required();
    evaluate->add_option("--out", eval_args.out, "CSV report; the summary goes to <out>.summary.txt")->required();
    evaluate->add_option("--jobs", eval_args.jobs, "Worker threads")->check(CLI::PositiveNumber);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen-synthetic", "Write a seeded synthetic corpus, templates and cases");
    gen->add_option("--n", gen_args.n, "Corpus size");
    gen->add_option("--modes", gen_args.modes, "Shape modes")->check(CLI::Range(0, synth::kMaxModes));
    gen->add_option("--noise", gen_args.noise, "Landmark noise std-dev (px)")->check(CLI::NonNegativeNumber);
    gen->add_option("--yaw-range", gen_args.yaw_range, "Corpus |yaw| up to this (degrees)")
        ->check(CLI::Range(0.0, synth::kMaxYawDegrees));
    gen->add_option("--seed", gen_args.seed, "Seed (falls back to SHAPEFIT_SEED)");
    gen->add_option("--out", gen_args.out, "Output directory")->required();
    gen->add_option("--cases", gen_args.cases, "Number of rendered evaluation cases");
    gen->add_option("--case-noise", gen_args.case_noise, "Case landmark noise (defaults to --noise)")
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--case-yaw-min", gen_args.case_yaw_min, "Case |yaw| lower bound (degrees)")
        ->check(CLI::Range(0.0, synth::kMaxYawDegrees));
    gen->add_option("--case-yaw-max", gen_args.case_yaw_max, "Case |yaw| upper bound (defaults to --yaw-range)")
        ->check(CLI::Range(0.0, synth::kMaxYawDegrees));
    gen->add_option("--width", gen_args.width, "Case image width");
    gen->add_option("--height", gen_args.height, "Case image height");
    gen->add_option("--profile-yaw", gen_args.profile_yaw, "Yaw of the profile templates (degrees)")
        ->check(CLI::Range(0.0, synth::kMaxYawDegrees));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (*build) return build_model_command(build_args, out, err);
        if (*overlay) return overlay_command(overlay_args, out, err);
        if (*evaluate) return eval_command(eval_args, out, err);
        if (*gen) return gen_synthetic_command(gen_args, out, err);
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return classify(e.code()) == ErrorClass::Numerical ? kNumerical : kValidation;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kUsage;
}

}  // namespace shapefit::cli
