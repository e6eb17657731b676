#include "shapefit/landmarks.hpp"
#include "shapefit/metrics.hpp"
#include "shapefit/procrustes.hpp"
#include "shapefit/shape_model.hpp"
#include "shapefit/synthetic.hpp"
#include "shapefit/warp.hpp"

#include <benchmark/benchmark.h>

using namespace shapefit;

namespace {

std::vector<Shape> corpus17(int count)
{
    synth::GeneratorOptions options;
    options.noise = 0.5;
    options.yaw_max = 30.0;
    synth::Random rng(11);
    std::vector<Shape> out;
    for (const auto& face : synth::FaceGenerator(options).sample(rng, count)) {
        out.push_back(select_landmarks_17(face.observed));
    }
    return out;
}

void BM_SolveSimilarity(benchmark::State& state)
{
    const auto corpus = corpus17(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_similarity(corpus[0], corpus[1]));
    }
}
BENCHMARK(BM_SolveSimilarity);

void BM_GeneralizedProcrustes(benchmark::State& state)
{
    const auto corpus = corpus17(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(generalized_procrustes(corpus));
    }
}
BENCHMARK(BM_GeneralizedProcrustes)->Arg(130)->Arg(1000);

void BM_BuildModel(benchmark::State& state)
{
    const auto corpus = corpus17(130);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_model(corpus));
    }
}
BENCHMARK(BM_BuildModel);

void BM_Fit(benchmark::State& state)
{
    const auto corpus = corpus17(131);
    const ShapeModel model = build_model({corpus.begin(), corpus.end() - 1});
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit(model, corpus.back()));
    }
}
BENCHMARK(BM_Fit);

void BM_WarpTemplate(benchmark::State& state)
{
    const auto templates = synth::make_mask_templates();
    const MaskTemplate& mask = templates.front();
    const Shape target = apply_transform(SimilarityTransform{1.3, 0.1, Point(12, -4)}, mask.landmarks);
    for (auto _ : state) {
        benchmark::DoNotOptimize(warp_template(mask, target));
    }
}
BENCHMARK(BM_WarpTemplate);

void BM_Ssim(benchmark::State& state)
{
    const int side = static_cast<int>(state.range(0));
    GrayImage a(side, side), b(side, side);
    synth::Random rng(3);
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        a.data()[i] = rng.uniform(0, 255);
        b.data()[i] = rng.uniform(0, 255);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssim(a, b));
    }
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
