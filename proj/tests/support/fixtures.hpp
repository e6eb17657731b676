#pragma once

#include "shapefit/landmarks.hpp"
#include "shapefit/shape.hpp"
#include "shapefit/shape_model.hpp"
#include "shapefit/similarity.hpp"
#include "shapefit/synthetic.hpp"

#include <filesystem>
#include <numbers>
#include <random>
#include <string>

namespace fixture {

using shapefit::Point;
using shapefit::Shape;
using shapefit::SimilarityTransform;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal(double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

private:
    std::mt19937_64 engine_;
};

inline Shape random_shape(Rng& rng, std::size_t n, double spread = 10.0)
{
    Shape s(n);
    for (auto& p : s) {
        p = Point(rng.uniform(-spread, spread), rng.uniform(-spread, spread));
    }
    return s;
}

inline SimilarityTransform random_transform(Rng& rng)
{
    SimilarityTransform t;
    t.scale = rng.uniform(0.3, 3.0);
    t.rotation = rng.uniform(-3.1, 3.1);
    t.translation = Point(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0));
    return t;
}

/// Generator faces restricted to the 17 mask correspondences.
inline std::vector<Shape> mask17_corpus(std::uint64_t seed, int count, double yaw_max, double noise = 0.5,
                                        int modes = 3)
{
    shapefit::synth::GeneratorOptions options;
    options.modes = modes;
    options.noise = noise;
    options.yaw_max = yaw_max;
    const shapefit::synth::FaceGenerator generator(options);
    shapefit::synth::Random rng(seed);
    std::vector<Shape> corpus;
    for (const auto& face : generator.sample(rng, count)) {
        corpus.push_back(shapefit::select_landmarks_17(face.observed));
    }
    return corpus;
}

/// Random weights with |b_j| <= limit * sqrt(lambda_j).
inline Eigen::VectorXd random_weights(Rng& rng, const shapefit::ShapeModel& model, double limit)
{
    Eigen::VectorXd b(model.t());
    for (Eigen::Index j = 0; j < model.t(); ++j) {
        b[j] = rng.uniform(-limit, limit) * std::sqrt(model.eigenvalues[j]);
    }
    return b;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("shapefit_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixture
