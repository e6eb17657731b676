// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "cli.hpp"
#include "shapefit/evaluation.hpp"
#include "shapefit/io.hpp"
#include "shapefit/metrics.hpp"
#include "shapefit/overlay.hpp"
#include "shapefit/procrustes.hpp"
#include "shapefit/warp.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

using namespace shapefit;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& text) { detail += (detail.empty() ? "" : "; ") + text; }
};

std::string fmt(const char* format, double v)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, format, v);
    return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_abs(const Eigen::VectorXd& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

const ShapeModel& pooled_model()
{
    static const ShapeModel model = build_model(fixture::mask17_corpus(7, 130, 35.0));
    return model;
}

// 1. Procrustes suite.
Verdict procrustes_suite()
{
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    fixture::Rng rng(1001);

    // Rounding may nudge a converged value up by a few ulps; anything past
    // 1e-12 relative counts as a real increase.
    constexpr double kSlack = 1e-12;
    int monotone_failures = 0;
    double worst_uptick = 0.0;
    for (int corpus_index = 0; corpus_index < 50; ++corpus_index) {
        const std::size_t n = static_cast<std::size_t>(rng.integer(3, 30));
        const Shape base = fixture::random_shape(rng, n);
        const double spread = rng.uniform(0.05, 3.0);
        std::vector<Shape> corpus;
        for (int k = 0, count = rng.integer(2, 40); k < count; ++k) {
            Shape s = base;
            for (auto& p : s) {
                p += Point(rng.normal(spread), rng.normal(spread));
            }
            corpus.push_back(apply_transform(fixture::random_transform(rng), s));
        }
        const auto result = generalized_procrustes(corpus);
        for (std::size_t i = 1; i < result.sum_of_squares.size(); ++i) {
            const double rise = (result.sum_of_squares[i] - result.sum_of_squares[i - 1]) / result.sum_of_squares[i - 1];
            worst_uptick = std::max(worst_uptick, rise);
            if (rise > kSlack) {
                ++monotone_failures;
            }
        }
    }
    v.require(monotone_failures == 0, std::to_string(monotone_failures) + " sum-of-squares increases");

    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Shape src = fixture::random_shape(rng, static_cast<std::size_t>(rng.integer(3, 68)));
        const auto truth = fixture::random_transform(rng);
        const auto fit = solve_similarity(src, apply_transform(truth, src));
        worst = std::max({worst, std::abs(fit.transform.scale - truth.scale),
                          std::abs(wrap_angle(fit.transform.rotation - truth.rotation)),
                          (fit.transform.translation - truth.translation).cwiseAbs().maxCoeff()});
    }
    v.require(worst <= 1e-8, "max parameter error " + fmt("%.3g", worst));

    const double elapsed = seconds_since(start);
    v.require(elapsed < 10.0, "runtime " + fmt("%.2f s", elapsed));
    v.note("50 corpora monotone (largest relative uptick " + fmt("%.1e", worst_uptick) + "), 1000 transforms, max parameter error " + fmt("%.2e", worst) + ", "
           + fmt("%.2f s", elapsed));
    return v;
}

// 2. Shape-model round trip.
Verdict asm_round_trip()
{
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const ShapeModel& model = pooled_model();
    fixture::Rng rng(1002);

    double worst_b = 0.0, worst_pose = 0.0;
    int trace_failures = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::VectorXd b0 = fixture::random_weights(rng, model, 2.0);
        SimilarityTransform truth;
        truth.scale = rng.uniform(40.0, 160.0);
        truth.rotation = rng.uniform(-std::numbers::pi, std::numbers::pi);
        truth.translation = Point(rng.uniform(0, 256), rng.uniform(0, 256));
        const auto r = fit(model, apply_transform(truth, reconstruct(model, b0)));
        worst_b = std::max(worst_b, max_abs(r.b - b0));
        worst_pose = std::max({worst_pose, std::abs(r.pose.scale / truth.scale - 1.0),
                               std::abs(wrap_angle(r.pose.rotation - truth.rotation)),
                               (r.pose.translation - truth.translation).cwiseAbs().maxCoeff()});
        for (std::size_t i = 1; i < r.objective.size(); ++i) {
            if (!r.clamp_active[i] && r.objective[i] > r.objective[i - 1]) {
                ++trace_failures;
            }
        }
    }
    v.require(worst_b <= 1e-6, "max |b - b0| " + fmt("%.3g", worst_b));
    v.require(worst_pose <= 1e-6, "max pose error " + fmt("%.3g", worst_pose));
    v.require(trace_failures == 0, std::to_string(trace_failures) + " objective increases");
    const double elapsed = seconds_since(start);
    v.require(elapsed < 30.0, "runtime " + fmt("%.2f s", elapsed));
    v.note("500 shapes, t=" + std::to_string(model.t()) + ", max |b-b0| " + fmt("%.2e", worst_b)
           + ", max pose error " + fmt("%.2e", worst_pose) + ", " + fmt("%.2f s", elapsed));
    return v;
}

// 3. Pose invariance of b.
Verdict pose_invariance()
{
    Verdict v;
    const ShapeModel& model = pooled_model();
    const auto observed = fixture::mask17_corpus(1003, 100, 35.0, 2.0, 6);
    fixture::Rng rng(1003);
    double worst = 0.0;
    for (const Shape& shape : observed) {
        const auto t = fixture::random_transform(rng);
        const auto a = fit(model, shape);
        const auto b = fit(model, apply_transform(t, shape));
        worst = std::max(worst, max_abs(a.b - b.b));
    }
    v.require(worst <= 1e-6, "max |b(T s) - b(s)| " + fmt("%.3g", worst));
    v.note("100 noisy shapes, max |b(T s) - b(s)| " + fmt("%.2e", worst));
    return v;
}

// 4. Warp exactness.
Verdict warp_exactness()
{
    Verdict v;
    fixture::Rng rng(1004);
    double worst_vertex = 0.0, worst_interior = 0.0;
    long mismatched = 0, compared = 0;
    for (const MaskTemplate& mask : synth::make_mask_templates()) {
        // A random, non-degenerate deformation of the template.
        Shape target = mask.landmarks;
        const auto pose = SimilarityTransform{rng.uniform(0.6, 1.8), rng.uniform(-0.4, 0.4), Point(40, 30)};
        target = apply_transform(pose, target);
        for (auto& p : target) {
            p += Point(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
        }
        const PiecewiseAffineWarp warp(mask.landmarks, target, mask.triangulation);

        for (std::size_t i = 0; i < mask.triangulation.size(); ++i) {
            const auto& tri = mask.triangulation[i];
            std::array<Point, 3> src, dst;
            for (int c = 0; c < 3; ++c) {
                src[std::size_t(c)] = mask.landmarks[std::size_t(tri[std::size_t(c)])];
                dst[std::size_t(c)] = target[std::size_t(tri[std::size_t(c)])];
                worst_vertex = std::max(worst_vertex, (warp.forward(i, src[std::size_t(c)]) - dst[std::size_t(c)]).norm());
            }
            for (int n = 0; n < 100; ++n) {
                double a = rng.uniform(0, 1), b = rng.uniform(0, 1);
                if (a + b > 1) {
                    a = 1 - a;
                    b = 1 - b;
                }
                const Point q = dst[0] + a * (dst[1] - dst[0]) + b * (dst[2] - dst[0]);
                worst_interior = std::max(worst_interior, (warp.inverse(i, q) - oracle::affine_through(dst, src, q)).norm());
            }
        }

        // Rasterised interior through a coordinate-encoding template.
        MaskTemplate ramp = mask;
        ramp.image = oracle::coordinate_ramp(mask.image.width(), mask.image.height());
        const WarpedFragment frag = warp_template(ramp, target);
        for (int fy = 0; fy < frag.image.height(); ++fy) {
            for (int fx = 0; fx < frag.image.width(); ++fx) {
                const Point q(fx + frag.offset.x(), fy + frag.offset.y());
                const auto tri = warp.locate(q);
                if (!tri) {
                    continue;
                }
                std::array<Point, 3> src, dst;
                for (int c = 0; c < 3; ++c) {
                    src[std::size_t(c)] = mask.landmarks[std::size_t(mask.triangulation[*tri][std::size_t(c)])];
                    dst[std::size_t(c)] = target[std::size_t(mask.triangulation[*tri][std::size_t(c)])];
                }
                const Point expected = oracle::affine_through(dst, src, q);
                if (expected.x() < 0 || expected.y() < 0 || expected.x() > mask.image.width() - 1
                    || expected.y() > mask.image.height() - 1) {
                    continue;
                }
                const Rgba got = frag.image.at(fx, fy);
                const Point decoded(got.r * mask.image.width(), got.g * mask.image.height());
                worst_interior = std::max(worst_interior, (decoded - expected).norm());
            }
        }

        // Identity: bit-exact copy wherever the warp covers.
        const WarpedFragment same = warp_template(mask, mask.landmarks);
        const PiecewiseAffineWarp identity(mask.landmarks, mask.landmarks, mask.triangulation);
        for (int fy = 0; fy < same.image.height(); ++fy) {
            for (int fx = 0; fx < same.image.width(); ++fx) {
                const int x = fx + same.offset.x(), y = fy + same.offset.y();
                if (!identity.locate(Point(x, y))) {
                    continue;
                }
                ++compared;
                if (!(same.image.at(fx, fy) == mask.image.at(x, y))) {
                    ++mismatched;
                }
            }
        }
    }
    v.require(worst_vertex <= 1e-6, "vertex error " + fmt("%.3g", worst_vertex));
    v.require(worst_interior <= 0.5, "interior error " + fmt("%.3g", worst_interior));
    v.require(mismatched == 0 && compared > 0, std::to_string(mismatched) + " identity mismatches");
    v.note("3 templates, vertex error " + fmt("%.2e", worst_vertex) + " px, interior error "
           + fmt("%.2e", worst_interior) + " px, identity " + std::to_string(compared) + " px bit-exact");
    return v;
}

// 5. Metric identities.
Verdict metric_identities()
{
    Verdict v;
    fixture::Rng rng(1005);
    GrayImage image(48, 40);
    for (auto& p : image.data()) {
        p = rng.uniform(0, 255);
    }
    const double self = ssim(image, image);
    v.require(std::abs(self - 1.0) <= 1e-9, "ssim(I,I) = " + fmt("%.17g", self));
    const double rec = reconstruction_loss(image, image);
    v.require(std::abs(rec + 1.0) <= 1e-9, "reconstruction_loss(I,I) = " + fmt("%.17g", rec));

    BinaryMap left(20, 10, 0.0), right(20, 10, 0.0), soft(20, 10);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 20; ++x) {
            (x < 10 ? left : right).at(x, y) = 1.0;
            soft.at(x, y) = rng.uniform(0, 1);
        }
    }
    const double disjoint = dice_loss(left, right);
    v.require(std::abs(disjoint - 1.0) <= 1e-6, "disjoint dice " + fmt("%.17g", disjoint));
    bool additive = true;
    for (const auto* pred : {&left, &right, &soft}) {
        additive = additive && seg_loss(*pred, left) == dice_loss(*pred, left) + bce_loss(*pred, left);
    }
    v.require(additive, "seg_loss != dice_loss + bce_loss");
    const double half = bce_loss(BinaryMap(20, 10, 0.5), left);
    v.require(std::abs(half - std::numbers::ln2) <= 1e-9, "bce at 0.5 = " + fmt("%.17g", half));
    v.note("ssim(I,I)-1 = " + fmt("%.1e", self - 1.0) + ", L_rc(I,I)+1 = " + fmt("%.1e", rec + 1.0)
           + ", dice disjoint = " + fmt("%.9f", disjoint) + ", bce(0.5)-ln2 = " + fmt("%.1e", half - std::numbers::ln2));
    return v;
}

Shape with_mask_points(Shape landmarks68, const Shape& points17)
{
    for (std::size_t i = 0; i < kMaskLandmarkCount; ++i) {
        landmarks68[ibug(kMaskFaceIndices[i])] = points17[i];
    }
    return landmarks68;
}

// 6. Ablation ordering.
Verdict ablation()
{
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const ShapeModel& model = pooled_model();
    const auto registry = synth::make_mask_templates();
    eval::EvalOptions options;
    options.jobs = 4;

    synth::GeneratorOptions profile;
    profile.noise = 2.0;
    profile.yaw_min = 24.0;
    profile.yaw_max = 34.0;
    synth::Random profile_rng(2006);
    const auto noisy = eval::make_cases(synth::FaceGenerator(profile), profile_rng, 48, 256, 256, "profile");
    const auto report = eval::evaluate(noisy, model, registry, options);
    const double sla = report.of(OverlayMethod::SLA).mean_deviation;
    const double dla = report.of(OverlayMethod::DLA).mean_deviation;
    const double ssa = report.of(OverlayMethod::DLA_SSA).mean_deviation;
    v.require(ssa < dla && dla < sla, "ordering dla_ssa < dla < sla");

    // Frontal and noise-free, with the mask correspondences placed exactly on
    // the model manifold.
    synth::GeneratorOptions frontal;
    synth::Random frontal_rng(3006);
    auto on_manifold = eval::make_cases(synth::FaceGenerator(frontal), frontal_rng, 40, 256, 256, "frontal");
    for (auto& c : on_manifold) {
        const Shape fitted = fit(model, select_landmarks_17(c.truth)).fitted_shape;
        c.truth = with_mask_points(c.truth, fitted);
        c.face.landmarks = c.truth;
        c.image = synth::render_face(c.truth, 256, 256);
    }
    const auto flat = eval::evaluate(on_manifold, model, registry, options);
    const double gap =
        std::abs(flat.of(OverlayMethod::DLA_SSA).mean_deviation - flat.of(OverlayMethod::DLA).mean_deviation);
    v.require(gap <= 0.5, "on-manifold |dla_ssa - dla| " + fmt("%.3f", gap));

    const double elapsed = seconds_since(start);
    v.require(elapsed < 120.0, "runtime " + fmt("%.1f s", elapsed));
    v.note("48 half-profile cases: sla " + fmt("%.3f", sla) + " px, dla " + fmt("%.3f", dla) + " px, dla_ssa "
           + fmt("%.3f", ssa) + " px; 40 on-manifold frontal: |dla_ssa - dla| " + fmt("%.2e", gap) + " px; "
           + fmt("%.1f s", elapsed));
    return v;
}

int run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "shapefit");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

// 7. End-to-end determinism.
Verdict determinism()
{
    Verdict v;
    const fs::path dir = fixture::scratch_dir("acceptance_e2e");
    const std::string root = dir.string();
    v.require(run_cli({"gen-synthetic", "--seed", "77", "--n", "130", "--noise", "0.5", "--yaw-range", "35",
                       "--cases", "6", "--case-noise", "2", "--case-yaw-min", "24", "--case-yaw-max", "34", "--out",
                       root})
                  == 0,
              "gen-synthetic");
    v.require(run_cli({"build-model", "--landmarks", root + "/corpus.json", "--out", root + "/model.json"}) == 0,
              "build-model");

    const std::string image = root + "/cases/case_002/face.png";
    const std::string landmarks = root + "/cases/case_002/landmarks.json";
    int overlay_diffs = 0;
    for (const std::string method : {"sla", "dla", "dla_ssa"}) {
        std::string first;
        for (int rerun = 0; rerun < 2; ++rerun) {
            const std::string out = root + "/" + method + std::to_string(rerun) + ".png";
            v.require(run_cli({"overlay", "--image", image, "--landmarks", landmarks, "--model", root + "/model.json",
                               "--templates", root + "/templates/manifest.json", "--method", method, "--out", out})
                          == 0,
                      "overlay " + method);
            const std::string bytes = io::read_text(out);
            if (rerun == 0) {
                first = bytes;
            } else if (bytes != first) {
                ++overlay_diffs;
            }
        }
    }
    v.require(overlay_diffs == 0, std::to_string(overlay_diffs) + " overlay reruns differ");

    for (const std::string jobs : {"1", "3"}) {
        v.require(run_cli({"eval", "--cases", root + "/cases", "--model", root + "/model.json", "--templates",
                           root + "/templates/manifest.json", "--out", root + "/report" + jobs + ".csv", "--jobs",
                           jobs})
                      == 0,
                  "eval");
    }
    v.require(io::read_text(root + "/report1.csv") == io::read_text(root + "/report3.csv"), "eval reports differ");
    v.require(io::read_text(root + "/report1.csv.summary.txt") == io::read_text(root + "/report3.csv.summary.txt"),
              "eval summaries differ");

    // Model file: reload equals the in-memory build bit for bit, and re-serialises identically.
    const std::string text = io::read_text(root + "/model.json");
    const io::ModelFile loaded = io::parse_model_file(text);
    std::vector<Shape> corpus;
    for (const auto& e : io::read_landmark_file(root + "/corpus.json").entries) {
        corpus.push_back(select_landmarks_17(e.points));
    }
    const ShapeModel built = build_model(corpus);
    auto same_bits = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        if (a.rows() != b.rows() || a.cols() != b.cols()) {
            return false;
        }
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (std::bit_cast<std::uint64_t>(a.data()[i]) != std::bit_cast<std::uint64_t>(b.data()[i])) {
                return false;
            }
        }
        return true;
    };
    v.require(same_bits(loaded.model.mean, built.mean) && same_bits(loaded.model.modes, built.modes)
                  && same_bits(loaded.model.eigenvalues, built.eigenvalues)
                  && loaded.model.corpus_hash == built.corpus_hash,
              "model reload not bit-exact");
    v.require(io::format_model_file(loaded) == text, "model re-serialisation differs");
    v.note("3 overlay methods x 2 runs, eval jobs 1 vs 3, model reload bit-exact");
    return v;
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"procrustes suite", procrustes_suite},
        {"shape-model round trip", asm_round_trip},
        {"pose invariance", pose_invariance},
        {"warp exactness", warp_exactness},
        {"metric identities", metric_identities},
        {"ablation ordering", ablation},
        {"end-to-end determinism", determinism},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Verdict verdict;
        try {
            verdict = check();
        } catch (const std::exception& e) {
            verdict.pass = false;
            verdict.detail = std::string("exception: ") + e.what();
        }
        failures += verdict.pass ? 0 : 1;
        std::printf("%s criterion %d (%s): %s\n", verdict.pass ? "PASS" : "FAIL", index, name, verdict.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
