#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace srnet {

/// One single-band image. Samples are row-major intensities normalized to
/// [0,1]; on disk they are 8-bit with peak 255.
struct BandRaster {
    std::string band_id;
    int width = 0;
    int height = 0;
    std::vector<double> samples;

    BandRaster() = default;
    BandRaster(std::string id, int w, int h, double fill = 0.0);
    BandRaster(std::string id, int w, int h, std::vector<double> values);

    double& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return samples.size(); }
};

/// Throws srnet::Error unless dimensions are positive, the sample count
/// matches, and every sample lies in [0,1].
void check_raster(const BandRaster& raster);

/// Co-registered stack of bands sharing one pixel grid.
struct MultispectralScene {
    std::vector<BandRaster> bands;
    int width = 0;
    int height = 0;

    std::size_t band_count() const { return bands.size(); }
};

/// Builds a scene from bands, validating shared dimensions and unique ids.
MultispectralScene make_scene(std::vector<BandRaster> bands);
void check_scene(const MultispectralScene& scene);

enum class FeatureMode {
    Pooled2x2,  ///< one vector per non-overlapping 2x2 block, D = 4 * bands
    Patch3x3,   ///< one vector per interior pixel, D = 9 * bands
};

int feature_dim(FeatureMode mode, std::size_t band_count);
const char* to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(const std::string& name);

std::vector<std::string> default_class_names();

/// Flat row-major store of D-dimensional feature vectors, optionally labeled.
struct FeatureSet {
    int dim = 0;
    std::vector<double> values;  // size() * dim
    std::vector<int> labels;     // empty when unlabeled
    std::vector<std::string> class_names = default_class_names();

    std::size_t size() const { return dim == 0 ? 0 : values.size() / static_cast<std::size_t>(dim); }
    bool labeled() const { return !labels.empty(); }
    std::span<const double> feature(std::size_t i) const {
        return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    std::size_t class_count() const { return class_names.size(); }
};

void check_features(const FeatureSet& set);

/// Label grid with an 8-bit gray palette used when rendering to disk.
struct ClassMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;
    std::vector<std::uint8_t> palette = {128, 255, 0};

    int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

void check_class_map(const ClassMap& map);

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

struct LabeledRegion {
    Rect rect;
    int label = 0;
};

// --- file formats -----------------------------------------------------------

/// Raw 8-bit grayscale image as stored in a binary PGM (P5, maxval 255).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

std::uint8_t quantize(double sample);
GrayImage to_gray(const BandRaster& raster);
BandRaster from_gray(const GrayImage& image, std::string band_id);

/// Reads a JSON manifest {"width","height","bands":[{"id","path"}]} whose band
/// paths are relative to the manifest's directory.
MultispectralScene load_scene(const std::filesystem::path& manifest_path);

/// Writes every band as <dir>/<band_id>.pgm plus <dir>/<manifest_name>.
/// Returns the manifest path.
std::filesystem::path write_scene(const MultispectralScene& scene, const std::filesystem::path& dir,
                                  const std::string& manifest_name = "scene.json");

void write_class_map(const ClassMap& map, const std::filesystem::path& path);

/// Inverse of write_class_map; pixel values absent from the palette are an error.
ClassMap read_class_map(const std::filesystem::path& path,
                        std::vector<std::uint8_t> palette = {128, 255, 0});

/// Region file: {"classes":[...], "regions":[{"x","y","w","h","class"}]}.
/// "class" may be a class name or an index.
struct RegionFile {
    std::vector<std::string> class_names = default_class_names();
    std::vector<LabeledRegion> regions;
};

RegionFile load_regions(const std::filesystem::path& path);
void write_regions(const RegionFile& regions, const std::filesystem::path& path);

// --- operations -------------------------------------------------------------

/// Mean of each 2x2 block; odd trailing rows/columns are dropped.
BandRaster pool_2x2(const BandRaster& raster);

/// Band-major, then row-major within the block or patch.
FeatureSet extract_features(const MultispectralScene& scene, FeatureMode mode = FeatureMode::Pooled2x2);

MultispectralScene crop_scene(const MultispectralScene& scene, const Rect& rect);

/// Concatenates extract_features over every region crop, tagging each
/// vector with its region's class.
FeatureSet label_regions(const MultispectralScene& scene, std::span<const LabeledRegion> regions,
                         FeatureMode mode = FeatureMode::Pooled2x2,
                         std::vector<std::string> class_names = default_class_names());

}  // namespace srnet
