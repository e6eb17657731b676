#pragma once

#include "shapefit/error.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace shapefit {

/// Straight (non-premultiplied) alpha, channels in [0, 1].
struct Rgba {
    float r = 0.0f;
    float g = 0.0f;
    float b = 0.0f;
    float a = 0.0f;

    friend bool operator==(const Rgba&, const Rgba&) = default;
};

/// Row-major 2-D raster. Pixel (x, y) is centred on the continuous
/// coordinate (x, y).
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(checked_area(width, height), fill)
    {
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    T& at(int x, int y) { return data_[index(x, y)]; }
    const T& at(int x, int y) const { return data_[index(x, y)]; }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static std::size_t checked_area(int width, int height)
    {
        if (width < 0 || height < 0) {
            throw Error(ErrorCode::InvalidArgument, "raster dimensions must be non-negative");
        }
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using RgbaImage = Raster<Rgba>;
using GrayImage = Raster<double>;

/// Rec.601 luma of an RGBA image, scaled to [0, range].
GrayImage to_luma(const RgbaImage& image, double range = 255.0);

/// Alpha channel as a gray raster on [0, 1].
GrayImage alpha_channel(const RgbaImage& image);

template <typename A, typename B>
void require_same_dimensions(const Raster<A>& a, const Raster<B>& b, const char* what)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": " + std::to_string(a.width()) + "x"
                                                      + std::to_string(a.height()) + " vs "
                                                      + std::to_string(b.width()) + "x"
                                                      + std::to_string(b.height()));
    }
}

}  // namespace shapefit
