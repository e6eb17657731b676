#pragma once

#include "shapefit/image.hpp"
#include "shapefit/landmarks.hpp"
#include "shapefit/overlay.hpp"
#include "shapefit/shape_model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shapefit::io {

inline constexpr int kSchemaVersion = 1;

enum class Convention { Ibug68, Mask17 };

std::string_view to_string(Convention convention);
std::size_t point_count(Convention convention);

struct LandmarkEntry {
    std::string image_path;
    Shape points;
    std::optional<ClassLabel> class_label;
};

/// {"schema_version": 1, "convention": "ibug68-1based" | "mask17",
///  "entries": [{"image_path": ..., "points": [[x, y], ...], "class_label": ...}]}
struct LandmarkFile {
    Convention convention = Convention::Ibug68;
    std::vector<LandmarkEntry> entries;
};

LandmarkFile parse_landmark_file(std::string_view text, const std::string& origin = "<memory>");
LandmarkFile read_landmark_file(const std::filesystem::path& path);
std::string format_landmark_file(const LandmarkFile& file);
void write_landmark_file(const std::filesystem::path& path, const LandmarkFile& file);

/// Shape model plus what it was trained on. Doubles are written in their
/// shortest round-tripping decimal form, so a reload is bit-exact.
struct ModelFile {
    ShapeModel model;
    LandmarkSubset subset = LandmarkSubset::Mask17;
};

ModelFile parse_model_file(std::string_view text, const std::string& origin = "<memory>");
ModelFile read_model_file(const std::filesystem::path& path);
std::string format_model_file(const ModelFile& file);
void write_model_file(const std::filesystem::path& path, const ModelFile& file);

/// One manifest entry; landmarks are in template pixels, triangles 1-based on disk.
struct TemplateEntry {
    std::string name;
    View view = View::Front;
    std::string image_path;  ///< relative to the manifest's directory
    Shape landmarks;
    std::vector<Triangle> triangulation;  ///< zero-based in memory
};

struct TemplateManifest {
    std::vector<TemplateEntry> templates;
};

TemplateManifest parse_template_manifest(std::string_view text, const std::string& origin = "<memory>");
std::string format_template_manifest(const TemplateManifest& manifest);
void write_template_manifest(const std::filesystem::path& path, const TemplateManifest& manifest);

/// Reads the manifest and every template image it points at.
std::vector<MaskTemplate> load_templates(const std::filesystem::path& manifest_path);

/// Writes each template's PNG next to the manifest and the manifest itself.
void save_templates(const std::filesystem::path& manifest_path, const std::vector<MaskTemplate>& templates);

/// 8-bit RGBA PNG. Grayscale / RGB / palette inputs are expanded to RGBA.
RgbaImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbaImage& image);

/// Quantisation used by write_png: round(v * 255), clamped.
std::uint8_t to_byte(float v);
RgbaImage quantize(const RgbaImage& image);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace shapefit::io
