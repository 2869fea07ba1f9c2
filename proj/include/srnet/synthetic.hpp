#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srnet/raster.hpp"

namespace srnet {

/// A meandering line of one class: centre = offset + amplitude * sin(2 pi t / period + phase)
/// along the stroke's running axis, painted `thickness` pixels wide between `start` and `end`.
struct Stroke {
    int label = 2;
    bool horizontal = true;
    double offset = 0.0;
    double amplitude = 0.0;
    double period = 64.0;
    double phase = 0.0;
    int thickness = 1;
    int start = 0;
    int end = -1;  ///< exclusive; -1 runs to the frame edge
};

/// Painter's-order layout: background, then rectangles, then strokes.
struct SyntheticLayout {
    int width = 0;
    int height = 0;
    int background = 0;
    std::vector<LabeledRegion> rects;
    std::vector<Stroke> strokes;
};

struct SyntheticSpec {
    SyntheticLayout layout;
    std::vector<std::string> band_ids;
    /// class_means[c][b]: mean intensity of class c in band b.
    std::vector<std::vector<double>> class_means;
    std::vector<std::string> class_names = default_class_names();
    double noise = 0.02;
    std::uint64_t seed = 0;
};

struct SyntheticScene {
    MultispectralScene scene;
    ClassMap truth;  ///< per-pixel labels
};

/// Six bands ("B1".."B5","B7") with distinct deep forest / light forest /
/// river signatures.
std::vector<std::vector<double>> default_class_means();
std::vector<std::string> default_band_ids();

/// Seeded layout: light-forest parcels on a deep-forest background, one wide
/// river and several 1-2 pixel river branches.
SyntheticLayout default_layout(int width, int height, std::uint64_t seed);

SyntheticSpec default_synthetic_spec(int width, int height, double noise, std::uint64_t seed);

/// Paints the layout and adds seeded Gaussian noise per band; samples are
/// clamped to [0,1].
SyntheticScene make_synthetic_scene(const SyntheticSpec& spec);

/// Per-pixel labels of the layout without any noise.
ClassMap rasterize_layout(const SyntheticLayout& layout, std::size_t class_count);

/// Non-overlapping side x side squares whose truth labels are all one class,
/// at most `per_class` per class, spread over the scan order.
std::vector<LabeledRegion> pure_training_regions(const ClassMap& truth, int side, int per_class);

/// Block-level truth after upscaling the pixel truth by `upscale`
/// (nearest neighbour) and grouping into 2x2 blocks. The block label is the
/// majority label; ties go to the higher class index.
ClassMap block_truth(const ClassMap& pixel_truth, int upscale);

}  // namespace srnet
