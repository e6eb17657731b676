#include "shapefit/image.hpp"

namespace shapefit {

GrayImage to_luma(const RgbaImage& image, double range)
{
    GrayImage out(image.width(), image.height());
    for (std::size_t i = 0; i < image.data().size(); ++i) {
        const Rgba& p = image.data()[i];
        out.data()[i] = range * (0.299 * p.r + 0.587 * p.g + 0.114 * p.b);
    }
    return out;
}

GrayImage alpha_channel(const RgbaImage& image)
{
    GrayImage out(image.width(), image.height());
    for (std::size_t i = 0; i < image.data().size(); ++i) {
        out.data()[i] = image.data()[i].a;
    }
    return out;
}

}  // namespace shapefit
