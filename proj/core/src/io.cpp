#include "shapefit/io.hpp"

#include "shapefit/error.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shapefit::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& message)
{
    throw Error(ErrorCode::Parse, origin + ": " + message);
}

json parse_json(std::string_view text, const std::string& origin)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        fail(origin, e.what());
    }
}

const json& field(const json& object, const char* key, const std::string& context)
{
    if (!object.is_object()) {
        throw Error(ErrorCode::Parse, context + ": expected an object");
    }
    const auto it = object.find(key);
    if (it == object.end()) {
        throw Error(ErrorCode::Parse, context + ": missing '" + key + "'");
    }
    return *it;
}

double number(const json& value, const std::string& context)
{
    if (!value.is_number()) {
        throw Error(ErrorCode::Parse, context + ": expected a number");
    }
    return value.get<double>();
}

std::string string_field(const json& object, const char* key, const std::string& context)
{
    const json& value = field(object, key, context);
    if (!value.is_string()) {
        throw Error(ErrorCode::Parse, context + ": '" + key + "' must be a string");
    }
    return value.get<std::string>();
}

void check_schema(const json& root, const std::string& origin)
{
    const json& version = field(root, "schema_version", origin);
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        fail(origin, "unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
}

Shape parse_points(const json& value, const std::string& context)
{
    if (!value.is_array()) {
        throw Error(ErrorCode::Parse, context + ": points must be an array of [x, y] pairs");
    }
    Shape s(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        const json& p = value[i];
        const std::string where = context + ", point " + std::to_string(i + 1);
        if (!p.is_array() || p.size() != 2) {
            throw Error(ErrorCode::Parse, where + ": expected [x, y]");
        }
        s[i] = Point(number(p[0], where), number(p[1], where));
        if (!s[i].allFinite()) {
            throw Error(ErrorCode::Parse, where + ": non-finite coordinate");
        }
    }
    return s;
}

json format_points(const Shape& s)
{
    json arr = json::array();
    for (const Point& p : s) {
        arr.push_back({p.x(), p.y()});
    }
    return arr;
}

json vector_to_json(const Eigen::VectorXd& v)
{
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v[i]);
    }
    return arr;
}

Eigen::VectorXd json_to_vector(const json& value, const std::string& context)
{
    if (!value.is_array()) {
        throw Error(ErrorCode::Parse, context + ": expected an array of numbers");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = number(value[i], context + "[" + std::to_string(i) + "]");
    }
    return v;
}

}  // namespace

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string_view to_string(Convention convention)
{
    return convention == Convention::Ibug68 ? "ibug68-1based" : "mask17";
}

std::size_t point_count(Convention convention)
{
    return convention == Convention::Ibug68 ? kFaceLandmarkCount : kMaskLandmarkCount;
}

LandmarkFile parse_landmark_file(std::string_view text, const std::string& origin)
{
    const json root = parse_json(text, origin);
    check_schema(root, origin);

    LandmarkFile file;
    const std::string convention = string_field(root, "convention", origin);
    if (convention == "ibug68-1based") {
        file.convention = Convention::Ibug68;
    } else if (convention == "mask17") {
        file.convention = Convention::Mask17;
    } else {
        fail(origin, "unknown convention '" + convention + "'");
    }

    const json& entries = field(root, "entries", origin);
    if (!entries.is_array()) {
        fail(origin, "'entries' must be an array");
    }
    const std::size_t expected = point_count(file.convention);
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const std::string context = origin + ": entry " + std::to_string(e + 1);
        const json& entry = entries[e];
        LandmarkEntry out;
        out.image_path = entry.contains("image_path") ? string_field(entry, "image_path", context) : std::string{};
        out.points = parse_points(field(entry, "points", context), context);
        if (out.points.size() != expected) {
            throw Error(ErrorCode::Parse, context + ": expected " + std::to_string(expected) + " points, got "
                                              + std::to_string(out.points.size()));
        }
        if (entry.contains("class_label") && !entry["class_label"].is_null()) {
            try {
                out.class_label = parse_class_label(string_field(entry, "class_label", context));
            } catch (const Error& err) {
                throw Error(ErrorCode::Parse, context + ": " + err.what());
            }
        }
        file.entries.push_back(std::move(out));
    }
    return file;
}

LandmarkFile read_landmark_file(const std::filesystem::path& path)
{
    return parse_landmark_file(read_text(path), path.string());
}

std::string format_landmark_file(const LandmarkFile& file)
{
    json root;
    root["schema_version"] = kSchemaVersion;
    root["convention"] = to_string(file.convention);
    json entries = json::array();
    for (const auto& entry : file.entries) {
        json e;
        e["image_path"] = entry.image_path;
        e["points"] = format_points(entry.points);
        if (entry.class_label) {
            e["class_label"] = to_string(*entry.class_label);
        }
        entries.push_back(std::move(e));
    }
    root["entries"] = std::move(entries);
    return root.dump(1) + "\n";
}

void write_landmark_file(const std::filesystem::path& path, const LandmarkFile& file)
{
    write_text(path, format_landmark_file(file));
}

ModelFile parse_model_file(std::string_view text, const std::string& origin)
{
    const json root = parse_json(text, origin);
    check_schema(root, origin);

    ModelFile file;
    const json& n_points = field(root, "n_points", origin);
    const json& t_field = field(root, "t", origin);
    if (!n_points.is_number_integer() || !t_field.is_number_integer()) {
        fail(origin, "'n_points' and 't' must be integers");
    }
    const auto n = n_points.get<long long>();
    const auto t = t_field.get<long long>();
    if (n < 3 || t < 0 || t > 2 * n) {
        fail(origin, "inconsistent n_points / t");
    }
    file.subset = parse_landmark_subset(string_field(root, "subset", origin));

    ShapeModel& model = file.model;
    model.mean = json_to_vector(field(root, "mean", origin), origin + ": mean");
    if (model.mean.size() != 2 * n) {
        fail(origin, "mean has " + std::to_string(model.mean.size()) + " values, expected " + std::to_string(2 * n));
    }
    model.eigenvalues = json_to_vector(field(root, "eigenvalues", origin), origin + ": eigenvalues");
    if (model.eigenvalues.size() != t) {
        fail(origin, "eigenvalue count differs from t");
    }

    const json& modes = field(root, "modes", origin);
    const json& rows = field(modes, "rows", origin + ": modes");
    const json& cols = field(modes, "cols", origin + ": modes");
    if (!rows.is_number_integer() || !cols.is_number_integer() || rows.get<long long>() != 2 * n
        || cols.get<long long>() != t) {
        fail(origin, "modes must be (2 * n_points) x t");
    }
    const Eigen::VectorXd data = json_to_vector(field(modes, "data", origin + ": modes"), origin + ": modes.data");
    if (data.size() != 2 * n * t) {
        fail(origin, "modes.data has the wrong length");
    }
    model.modes.resize(2 * n, t);
    for (Eigen::Index r = 0; r < 2 * n; ++r) {
        for (Eigen::Index c = 0; c < t; ++c) {
            model.modes(r, c) = data[r * t + c];
        }
    }

    const json& provenance = field(root, "provenance", origin);
    model.variance_fraction = number(field(provenance, "variance_fraction", origin), origin + ": variance_fraction");
    const std::string hash = string_field(provenance, "corpus_hash", origin + ": provenance");
    if (std::sscanf(hash.c_str(), "%" SCNx64, &model.corpus_hash) != 1) {
        fail(origin, "corpus_hash must be hexadecimal");
    }
    return file;
}

ModelFile read_model_file(const std::filesystem::path& path)
{
    return parse_model_file(read_text(path), path.string());
}

std::string format_model_file(const ModelFile& file)
{
    const ShapeModel& model = file.model;
    json root;
    root["schema_version"] = kSchemaVersion;
    root["subset"] = to_string(file.subset);
    root["n_points"] = model.n_points();
    root["t"] = model.t();
    root["mean"] = vector_to_json(model.mean);
    root["eigenvalues"] = vector_to_json(model.eigenvalues);
    json data = json::array();
    for (Eigen::Index r = 0; r < model.modes.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.modes.cols(); ++c) {
            data.push_back(model.modes(r, c));
        }
    }
    root["modes"] = {{"rows", model.modes.rows()}, {"cols", model.modes.cols()}, {"order", "row-major"},
                     {"data", std::move(data)}};
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, model.corpus_hash);
    root["provenance"] = {{"corpus_hash", hash}, {"variance_fraction", model.variance_fraction}};
    return root.dump(1) + "\n";
}

void write_model_file(const std::filesystem::path& path, const ModelFile& file)
{
    write_text(path, format_model_file(file));
}

TemplateManifest parse_template_manifest(std::string_view text, const std::string& origin)
{
    const json root = parse_json(text, origin);
    check_schema(root, origin);
    const json& templates = field(root, "templates", origin);
    if (!templates.is_array()) {
        fail(origin, "'templates' must be an array");
    }

    TemplateManifest manifest;
    for (std::size_t i = 0; i < templates.size(); ++i) {
        const std::string context = origin + ": template " + std::to_string(i + 1);
        const json& t = templates[i];
        TemplateEntry entry;
        entry.name = string_field(t, "name", context);
        try {
            entry.view = parse_view(string_field(t, "view", context));
        } catch (const Error& err) {
            throw Error(ErrorCode::Parse, context + ": " + err.what());
        }
        entry.image_path = string_field(t, "image_path", context);
        entry.landmarks = parse_points(field(t, "landmarks_17", context), context);
        if (entry.landmarks.size() != kMaskLandmarkCount) {
            throw Error(ErrorCode::Parse, context + ": landmarks_17 has " + std::to_string(entry.landmarks.size())
                                              + " points");
        }
        const json& tris = field(t, "triangulation", context);
        if (!tris.is_array() || tris.empty()) {
            throw Error(ErrorCode::Parse, context + ": triangulation must be a non-empty array");
        }
        for (std::size_t k = 0; k < tris.size(); ++k) {
            const json& tri = tris[k];
            const std::string where = context + ", triangle " + std::to_string(k + 1);
            if (!tri.is_array() || tri.size() != 3) {
                throw Error(ErrorCode::Parse, where + ": expected three indices");
            }
            Triangle out{};
            for (std::size_t v = 0; v < 3; ++v) {
                if (!tri[v].is_number_integer()) {
                    throw Error(ErrorCode::Parse, where + ": indices must be integers");
                }
                const int index = tri[v].get<int>();
                if (index < 1 || index > static_cast<int>(kMaskLandmarkCount)) {
                    throw Error(ErrorCode::Parse, where + ": index " + std::to_string(index) + " outside 1..17");
                }
                out[v] = index - 1;
            }
            entry.triangulation.push_back(out);
        }
        manifest.templates.push_back(std::move(entry));
    }
    return manifest;
}

std::string format_template_manifest(const TemplateManifest& manifest)
{
    json root;
    root["schema_version"] = kSchemaVersion;
    json templates = json::array();
    for (const auto& entry : manifest.templates) {
        json tris = json::array();
        for (const Triangle& tri : entry.triangulation) {
            tris.push_back({tri[0] + 1, tri[1] + 1, tri[2] + 1});
        }
        templates.push_back({{"name", entry.name},
                             {"view", to_string(entry.view)},
                             {"image_path", entry.image_path},
                             {"landmarks_17", format_points(entry.landmarks)},
                             {"triangulation", std::move(tris)}});
    }
    root["templates"] = std::move(templates);
    return root.dump(1) + "\n";
}

void write_template_manifest(const std::filesystem::path& path, const TemplateManifest& manifest)
{
    write_text(path, format_template_manifest(manifest));
}

std::vector<MaskTemplate> load_templates(const std::filesystem::path& manifest_path)
{
    const TemplateManifest manifest = parse_template_manifest(read_text(manifest_path), manifest_path.string());
    const std::filesystem::path base = manifest_path.parent_path();
    std::vector<MaskTemplate> registry;
    for (const auto& entry : manifest.templates) {
        MaskTemplate mask;
        mask.name = entry.name;
        mask.view = entry.view;
        mask.image = read_png(base / entry.image_path);
        mask.landmarks = entry.landmarks;
        mask.triangulation = entry.triangulation;
        try {
            validate(mask);
        } catch (const Error& err) {
            throw Error(ErrorCode::Parse, manifest_path.string() + ": " + err.what());
        }
        registry.push_back(std::move(mask));
    }
    return registry;
}

void save_templates(const std::filesystem::path& manifest_path, const std::vector<MaskTemplate>& templates)
{
    TemplateManifest manifest;
    const std::filesystem::path base = manifest_path.parent_path();
    for (const auto& mask : templates) {
        TemplateEntry entry;
        entry.name = mask.name;
        entry.view = mask.view;
        entry.image_path = mask.name + ".png";
        entry.landmarks = mask.landmarks;
        entry.triangulation = mask.triangulation;
        write_png(base / entry.image_path, mask.image);
        manifest.templates.push_back(std::move(entry));
    }
    write_template_manifest(manifest_path, manifest);
}

}  // namespace shapefit::io
