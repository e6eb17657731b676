#include "shapefit/error.hpp"
#include "shapefit/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace shapefit::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode)
{
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    return f;
}

}  // namespace

std::uint8_t to_byte(float v)
{
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

RgbaImage quantize(const RgbaImage& image)
{
    RgbaImage out(image.width(), image.height());
    for (std::size_t i = 0; i < image.data().size(); ++i) {
        const Rgba& p = image.data()[i];
        out.data()[i] = {to_byte(p.r) / 255.0f, to_byte(p.g) / 255.0f, to_byte(p.b) / 255.0f, to_byte(p.a) / 255.0f};
    }
    return out;
}

RgbaImage read_png(const std::filesystem::path& path)
{
    FilePtr file = open_file(path, "rb");
    png_byte header[8];
    if (std::fread(header, 1, sizeof header, file.get()) != sizeof header || png_sig_cmp(header, 0, sizeof header) != 0) {
        throw Error(ErrorCode::Parse, "'" + path.string() + "' is not a PNG file");
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCode::Io, "libpng initialisation failed");
    }

    RgbaImage image;
    std::vector<png_bytep> rows;
    std::vector<png_byte> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::Parse, "corrupt PNG '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, sizeof header);
    png_read_info(png, info);

    png_set_expand(png);
    png_set_strip_16(png);
    png_set_gray_to_rgb(png);
    png_set_add_alpha(png, 0xff, PNG_FILLER_AFTER);
    png_read_update_info(png, info);

    const auto width = static_cast<int>(png_get_image_width(png, info));
    const auto height = static_cast<int>(png_get_image_height(png, info));
    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * static_cast<std::size_t>(height));
    rows.resize(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = buffer.data() + stride * static_cast<std::size_t>(y);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    image = RgbaImage(width, height);
    for (int y = 0; y < height; ++y) {
        const png_byte* row = rows[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) {
            const png_byte* px = row + 4 * x;
            image.at(x, y) = {px[0] / 255.0f, px[1] / 255.0f, px[2] / 255.0f, px[3] / 255.0f};
        }
    }
    return image;
}

void write_png(const std::filesystem::path& path, const RgbaImage& image)
{
    if (image.empty()) {
        throw Error(ErrorCode::InvalidArgument, "write_png: empty image");
    }
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }

    std::vector<png_byte> buffer(static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.height()) * 4);
    for (std::size_t i = 0; i < image.data().size(); ++i) {
        const Rgba& p = image.data()[i];
        buffer[4 * i + 0] = to_byte(p.r);
        buffer[4 * i + 1] = to_byte(p.g);
        buffer[4 * i + 2] = to_byte(p.b);
        buffer[4 * i + 3] = to_byte(p.a);
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
    for (int y = 0; y < image.height(); ++y) {
        rows[static_cast<std::size_t>(y)] = buffer.data() + static_cast<std::size_t>(y) * image.width() * 4;
    }

    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCode::Io, "libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
                 PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace shapefit::io
