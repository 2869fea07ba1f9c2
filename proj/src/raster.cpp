#include "srnet/raster.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "srnet/error.hpp"

namespace srnet {

namespace fs = std::filesystem;
using json = nlohmann::json;

BandRaster::BandRaster(std::string id, int w, int h, double fill)
    : band_id(std::move(id)), width(w), height(h) {
    if (w < 1 || h < 1) throw Error("raster dimensions must be positive");
    samples.assign(static_cast<std::size_t>(w) * h, fill);
}

BandRaster::BandRaster(std::string id, int w, int h, std::vector<double> values)
    : band_id(std::move(id)), width(w), height(h), samples(std::move(values)) {
    if (w < 1 || h < 1) throw Error("raster dimensions must be positive");
    if (samples.size() != static_cast<std::size_t>(w) * h)
        throw Error("raster sample count does not match " + std::to_string(w) + "x" + std::to_string(h));
}

void check_raster(const BandRaster& raster) {
    if (raster.width < 1 || raster.height < 1) throw Error("raster '" + raster.band_id + "' has empty dimensions");
    if (raster.samples.size() != static_cast<std::size_t>(raster.width) * raster.height)
        throw Error("raster '" + raster.band_id + "' sample count mismatch");
    for (double v : raster.samples)
        if (!(v >= 0.0 && v <= 1.0)) throw Error("raster '" + raster.band_id + "' sample outside [0,1]");
}

MultispectralScene make_scene(std::vector<BandRaster> bands) {
    MultispectralScene scene;
    if (!bands.empty()) {
        scene.width = bands.front().width;
        scene.height = bands.front().height;
    }
    scene.bands = std::move(bands);
    check_scene(scene);
    return scene;
}

void check_scene(const MultispectralScene& scene) {
    if (scene.bands.empty()) throw Error("scene has no bands");
    std::set<std::string> ids;
    for (const auto& band : scene.bands) {
        if (band.width != scene.width || band.height != scene.height)
            throw Error("band '" + band.band_id + "' is " + std::to_string(band.width) + "x" +
                        std::to_string(band.height) + ", scene is " + std::to_string(scene.width) + "x" +
                        std::to_string(scene.height));
        if (!ids.insert(band.band_id).second) throw Error("duplicate band id '" + band.band_id + "'");
    }
}

int feature_dim(FeatureMode mode, std::size_t band_count) {
    const int per_band = mode == FeatureMode::Pooled2x2 ? 4 : 9;
    return per_band * static_cast<int>(band_count);
}

const char* to_string(FeatureMode mode) { return mode == FeatureMode::Pooled2x2 ? "pooled2x2" : "patch3x3"; }

FeatureMode feature_mode_from_string(const std::string& name) {
    if (name == "pooled2x2") return FeatureMode::Pooled2x2;
    if (name == "patch3x3") return FeatureMode::Patch3x3;
    throw Error("unknown feature mode '" + name + "'");
}

std::vector<std::string> default_class_names() { return {"deep_forest", "light_forest", "river"}; }

void check_features(const FeatureSet& set) {
    if (set.dim < 1) throw Error("feature dimension must be positive");
    if (set.values.size() % static_cast<std::size_t>(set.dim) != 0)
        throw Error("feature storage is not a multiple of the dimension");
    if (set.labeled()) {
        if (set.labels.size() != set.size()) throw Error("label count does not match feature count");
        for (int label : set.labels)
            if (label < 0 || static_cast<std::size_t>(label) >= set.class_count())
                throw Error("label " + std::to_string(label) + " out of range");
    }
}

void check_class_map(const ClassMap& map) {
    if (map.width < 1 || map.height < 1) throw Error("class map has empty dimensions");
    if (map.labels.size() != static_cast<std::size_t>(map.width) * map.height)
        throw Error("class map label count mismatch");
    for (int label : map.labels)
        if (label < 0 || static_cast<std::size_t>(label) >= map.palette.size())
            throw Error("class map label " + std::to_string(label) + " has no palette entry");
}

// --- PGM --------------------------------------------------------------------

namespace {

// Reads one header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!token.empty()) break;
            continue;
        }
        token.push_back(static_cast<char>(c));
    }
    return token;
}

int parse_positive(const std::string& token, const fs::path& path) {
    try {
        std::size_t used = 0;
        const int value = std::stoi(token, &used);
        if (used == token.size() && value > 0) return value;
    } catch (const std::exception&) {
    }
    throw Error("malformed PGM header in " + path.string());
}

}  // namespace

GrayImage read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    if (pgm_token(in) != "P5") throw Error(path.string() + " is not a binary PGM (P5)");
    GrayImage image;
    image.width = parse_positive(pgm_token(in), path);
    image.height = parse_positive(pgm_token(in), path);
    const int maxval = parse_positive(pgm_token(in), path);
    if (maxval != 255)
        throw Error("unsupported pixel depth in " + path.string() + " (maxval " + std::to_string(maxval) + ")");
    image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
    in.read(reinterpret_cast<char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(image.pixels.size()))
        throw Error("truncated pixel data in " + path.string());
    return image;
}

void write_pgm(const GrayImage& image, const fs::path& path) {
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw Error("image pixel count mismatch");
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw Error("write failed for " + path.string());
}

std::uint8_t quantize(double sample) {
    const double v = std::clamp(sample, 0.0, 1.0) * 255.0;
    return static_cast<std::uint8_t>(std::lround(v));
}

GrayImage to_gray(const BandRaster& raster) {
    GrayImage image{raster.width, raster.height, {}};
    image.pixels.reserve(raster.size());
    for (double v : raster.samples) image.pixels.push_back(quantize(v));
    return image;
}

BandRaster from_gray(const GrayImage& image, std::string band_id) {
    std::vector<double> values;
    values.reserve(image.pixels.size());
    for (auto p : image.pixels) values.push_back(p / 255.0);
    return BandRaster(std::move(band_id), image.width, image.height, std::move(values));
}

// --- manifests --------------------------------------------------------------

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const json& doc, const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace

MultispectralScene load_scene(const fs::path& manifest_path) {
    const json doc = read_json(manifest_path);
    const fs::path base = manifest_path.parent_path();
    try {
        const int width = doc.at("width").get<int>();
        const int height = doc.at("height").get<int>();
        std::vector<BandRaster> bands;
        for (const auto& entry : doc.at("bands")) {
            const auto id = entry.at("id").get<std::string>();
            const GrayImage image = read_pgm(base / entry.at("path").get<std::string>());
            if (image.width != width || image.height != height)
                throw Error("band '" + id + "' is " + std::to_string(image.width) + "x" +
                            std::to_string(image.height) + " but manifest declares " + std::to_string(width) +
                            "x" + std::to_string(height));
            bands.push_back(from_gray(image, id));
        }
        return make_scene(std::move(bands));
    } catch (const json::exception& e) {
        throw Error("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
}

fs::path write_scene(const MultispectralScene& scene, const fs::path& dir, const std::string& manifest_name) {
    check_scene(scene);
    json bands = json::array();
    for (const auto& band : scene.bands) {
        const std::string file = band.band_id + ".pgm";
        write_pgm(to_gray(band), dir / file);
        bands.push_back({{"id", band.band_id}, {"path", file}});
    }
    const json doc = {{"width", scene.width}, {"height", scene.height}, {"bands", bands}};
    const fs::path manifest = dir / manifest_name;
    write_json(doc, manifest);
    return manifest;
}

void write_class_map(const ClassMap& map, const fs::path& path) {
    check_class_map(map);
    GrayImage image{map.width, map.height, {}};
    image.pixels.reserve(map.labels.size());
    for (int label : map.labels) image.pixels.push_back(map.palette[static_cast<std::size_t>(label)]);
    write_pgm(image, path);
}

ClassMap read_class_map(const fs::path& path, std::vector<std::uint8_t> palette) {
    const GrayImage image = read_pgm(path);
    std::array<int, 256> lookup;
    lookup.fill(-1);
    for (std::size_t i = 0; i < palette.size(); ++i) {
        if (lookup[palette[i]] != -1) throw Error("palette is not injective");
        lookup[palette[i]] = static_cast<int>(i);
    }
    ClassMap map{image.width, image.height, {}, std::move(palette)};
    map.labels.reserve(image.pixels.size());
    for (auto p : image.pixels) {
        if (lookup[p] < 0) throw Error("pixel value " + std::to_string(p) + " not in palette: " + path.string());
        map.labels.push_back(lookup[p]);
    }
    return map;
}

RegionFile load_regions(const fs::path& path) {
    const json doc = read_json(path);
    RegionFile file;
    try {
        if (doc.contains("classes")) file.class_names = doc.at("classes").get<std::vector<std::string>>();
        for (const auto& entry : doc.at("regions")) {
            LabeledRegion region;
            region.rect = {entry.at("x").get<int>(), entry.at("y").get<int>(), entry.at("w").get<int>(),
                           entry.at("h").get<int>()};
            const auto& cls = entry.at("class");
            if (cls.is_number_integer()) {
                region.label = cls.get<int>();
            } else {
                const auto name = cls.get<std::string>();
                auto it = std::find(file.class_names.begin(), file.class_names.end(), name);
                if (it == file.class_names.end()) throw Error("unknown class '" + name + "' in " + path.string());
                region.label = static_cast<int>(it - file.class_names.begin());
            }
            if (region.label < 0 || static_cast<std::size_t>(region.label) >= file.class_names.size())
                throw Error("class index out of range in " + path.string());
            file.regions.push_back(region);
        }
    } catch (const json::exception& e) {
        throw Error("malformed region file " + path.string() + ": " + e.what());
    }
    return file;
}

void write_regions(const RegionFile& regions, const fs::path& path) {
    json list = json::array();
    for (const auto& r : regions.regions)
        list.push_back({{"x", r.rect.x},
                        {"y", r.rect.y},
                        {"w", r.rect.w},
                        {"h", r.rect.h},
                        {"class", regions.class_names.at(static_cast<std::size_t>(r.label))}});
    write_json({{"classes", regions.class_names}, {"regions", list}}, path);
}

// --- operations -------------------------------------------------------------

BandRaster pool_2x2(const BandRaster& raster) {
    if (raster.width < 2 || raster.height < 2) throw Error("pool_2x2 needs a raster of at least 2x2");
    BandRaster out(raster.band_id, raster.width / 2, raster.height / 2);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = 0.25 * (raster.at(2 * x, 2 * y) + raster.at(2 * x + 1, 2 * y) +
                                   raster.at(2 * x, 2 * y + 1) + raster.at(2 * x + 1, 2 * y + 1));
    return out;
}

FeatureSet extract_features(const MultispectralScene& scene, FeatureMode mode) {
    check_scene(scene);
    FeatureSet set;
    set.dim = feature_dim(mode, scene.band_count());
    if (mode == FeatureMode::Pooled2x2) {
        if (scene.width < 2 || scene.height < 2) throw Error("scene too small for 2x2 blocks");
        const int bw = scene.width / 2;
        const int bh = scene.height / 2;
        set.values.reserve(static_cast<std::size_t>(bw) * bh * set.dim);
        for (int by = 0; by < bh; ++by)
            for (int bx = 0; bx < bw; ++bx)
                for (const auto& band : scene.bands)
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dx = 0; dx < 2; ++dx) set.values.push_back(band.at(2 * bx + dx, 2 * by + dy));
    } else {
        if (scene.width < 3 || scene.height < 3) throw Error("scene too small for 3x3 patches");
        set.values.reserve(static_cast<std::size_t>(scene.width - 2) * (scene.height - 2) * set.dim);
        for (int y = 1; y + 1 < scene.height; ++y)
            for (int x = 1; x + 1 < scene.width; ++x)
                for (const auto& band : scene.bands)
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) set.values.push_back(band.at(x + dx, y + dy));
    }
    return set;
}

MultispectralScene crop_scene(const MultispectralScene& scene, const Rect& rect) {
    if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0 || rect.x + rect.w > scene.width ||
        rect.y + rect.h > scene.height)
        throw Error("rectangle (" + std::to_string(rect.x) + "," + std::to_string(rect.y) + "," +
                    std::to_string(rect.w) + "," + std::to_string(rect.h) + ") lies outside the " +
                    std::to_string(scene.width) + "x" + std::to_string(scene.height) + " scene");
    MultispectralScene out;
    out.width = rect.w;
    out.height = rect.h;
    for (const auto& band : scene.bands) {
        BandRaster crop(band.band_id, rect.w, rect.h);
        for (int y = 0; y < rect.h; ++y)
            for (int x = 0; x < rect.w; ++x) crop.at(x, y) = band.at(rect.x + x, rect.y + y);
        out.bands.push_back(std::move(crop));
    }
    return out;
}

FeatureSet label_regions(const MultispectralScene& scene, std::span<const LabeledRegion> regions, FeatureMode mode,
                         std::vector<std::string> class_names) {
    if (regions.empty()) throw Error("label_regions needs at least one region");
    FeatureSet set;
    set.dim = feature_dim(mode, scene.band_count());
    set.class_names = std::move(class_names);
    for (const auto& region : regions) {
        if (region.label < 0 || static_cast<std::size_t>(region.label) >= set.class_names.size())
            throw Error("region class index " + std::to_string(region.label) + " out of range");
        const FeatureSet part = extract_features(crop_scene(scene, region.rect), mode);
        set.values.insert(set.values.end(), part.values.begin(), part.values.end());
        set.labels.insert(set.labels.end(), part.size(), region.label);
    }
    return set;
}

}  // namespace srnet
