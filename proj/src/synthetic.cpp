#include "srnet/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "srnet/error.hpp"
#include "srnet/rng.hpp"

namespace srnet {

std::vector<std::vector<double>> default_class_means() {
    return {
        {0.30, 0.28, 0.22, 0.55, 0.40, 0.28},  // deep forest
        {0.45, 0.45, 0.42, 0.72, 0.60, 0.48},  // light forest
        {0.20, 0.18, 0.14, 0.08, 0.06, 0.04},  // river
    };
}

std::vector<std::string> default_band_ids() { return {"B1", "B2", "B3", "B4", "B5", "B7"}; }

SyntheticLayout default_layout(int width, int height, std::uint64_t seed) {
    if (width < 4 || height < 4) throw Error("synthetic layout needs at least 4x4 pixels");
    Xoshiro256 rng(seed);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

    SyntheticLayout layout;
    layout.width = width;
    layout.height = height;
    layout.background = 0;
    for (int i = 0; i < 3; ++i) {
        const int w = std::max(2, static_cast<int>(uniform(0.2, 0.4) * width));
        const int h = std::max(2, static_cast<int>(uniform(0.2, 0.4) * height));
        const int x = static_cast<int>(uniform(0.0, 1.0) * (width - w));
        const int y = static_cast<int>(uniform(0.0, 0.5) * (height - h));
        layout.rects.push_back({{x, y, w, h}, 1});
    }

    // Wide river across the lower part of the frame.
    Stroke main;
    main.horizontal = true;
    main.offset = uniform(0.6, 0.72) * height;
    main.amplitude = height / 24.0;
    main.period = width / 1.3;
    main.phase = uniform(0.0, 2.0 * std::numbers::pi);
    main.thickness = std::max(2, height / 12);
    layout.strokes.push_back(main);

    // Narrow branches, alternating one and two pixels wide.
    for (int i = 0; i < 4; ++i) {
        Stroke branch;
        branch.thickness = 1 + i % 2;
        branch.amplitude = std::max(1.0, std::min(width, height) / 40.0);
        branch.period = std::max(16.0, uniform(0.35, 0.6) * std::max(width, height));
        branch.phase = uniform(0.0, 2.0 * std::numbers::pi);
        if (i < 2) {
            branch.horizontal = false;
            branch.offset = (0.25 + 0.45 * i + uniform(-0.05, 0.05)) * width;
            branch.start = 0;
            branch.end = static_cast<int>(main.offset);
        } else {
            branch.horizontal = true;
            branch.offset = (0.18 + 0.2 * (i - 2) + uniform(-0.03, 0.03)) * height;
            branch.start = static_cast<int>(uniform(0.0, 0.3) * width);
            branch.end = static_cast<int>(uniform(0.7, 1.0) * width);
        }
        layout.strokes.push_back(branch);
    }
    return layout;
}

SyntheticSpec default_synthetic_spec(int width, int height, double noise, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.layout = default_layout(width, height, seed);
    spec.band_ids = default_band_ids();
    spec.class_means = default_class_means();
    spec.noise = noise;
    spec.seed = seed;
    return spec;
}

ClassMap rasterize_layout(const SyntheticLayout& layout, std::size_t class_count) {
    if (layout.width < 1 || layout.height < 1) throw Error("synthetic layout has empty dimensions");
    auto valid_label = [&](int label) { return label >= 0 && static_cast<std::size_t>(label) < class_count; };
    if (!valid_label(layout.background)) throw Error("synthetic background class out of range");

    ClassMap map;
    map.width = layout.width;
    map.height = layout.height;
    map.labels.assign(static_cast<std::size_t>(layout.width) * layout.height, layout.background);
    auto paint = [&](int x, int y, int label) {
        if (x >= 0 && y >= 0 && x < map.width && y < map.height)
            map.labels[static_cast<std::size_t>(y) * map.width + x] = label;
    };

    for (const auto& r : layout.rects) {
        if (!valid_label(r.label)) throw Error("synthetic rectangle class out of range");
        if (r.rect.w < 1 || r.rect.h < 1) throw Error("degenerate synthetic rectangle");
        for (int y = r.rect.y; y < r.rect.y + r.rect.h; ++y)
            for (int x = r.rect.x; x < r.rect.x + r.rect.w; ++x) paint(x, y, r.label);
    }
    for (const auto& s : layout.strokes) {
        if (!valid_label(s.label)) throw Error("synthetic stroke class out of range");
        if (s.thickness < 1 || !(s.period > 0.0)) throw Error("degenerate synthetic stroke");
        const int run = s.horizontal ? layout.width : layout.height;
        const int end = s.end < 0 ? run : std::min(s.end, run);
        for (int t = std::max(0, s.start); t < end; ++t) {
            const double centre = s.offset + s.amplitude * std::sin(2.0 * std::numbers::pi * t / s.period + s.phase);
            const int first = static_cast<int>(std::floor(centre - s.thickness / 2.0 + 0.5));
            for (int k = 0; k < s.thickness; ++k) {
                if (s.horizontal)
                    paint(t, first + k, s.label);
                else
                    paint(first + k, t, s.label);
            }
        }
    }
    return map;
}

SyntheticScene make_synthetic_scene(const SyntheticSpec& spec) {
    const std::size_t classes = spec.class_names.size();
    if (spec.class_means.size() != classes) throw Error("one mean signature per class is required");
    if (spec.band_ids.empty()) throw Error("synthetic scene needs at least one band");
    for (const auto& means : spec.class_means)
        if (means.size() != spec.band_ids.size()) throw Error("class signature length must equal the band count");
    if (!(spec.noise >= 0.0)) throw Error("noise level must be non-negative");

    SyntheticScene out;
    out.truth = rasterize_layout(spec.layout, classes);
    Xoshiro256 rng(spec.seed ^ 0x5eedf00dULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<BandRaster> bands;
    for (std::size_t b = 0; b < spec.band_ids.size(); ++b) {
        BandRaster band(spec.band_ids[b], spec.layout.width, spec.layout.height);
        for (std::size_t i = 0; i < band.samples.size(); ++i) {
            const double mean = spec.class_means[static_cast<std::size_t>(out.truth.labels[i])][b];
            const double value = spec.noise > 0.0 ? mean + spec.noise * gauss(rng) : mean;
            band.samples[i] = std::clamp(value, 0.0, 1.0);
        }
        bands.push_back(std::move(band));
    }
    out.scene = make_scene(std::move(bands));
    return out;
}

std::vector<LabeledRegion> pure_training_regions(const ClassMap& truth, int side, int per_class) {
    if (side < 2 || per_class < 1) throw Error("training squares need side >= 2 and at least one per class");
    const int classes = static_cast<int>(truth.palette.size());
    // Scan on even offsets (keeps 2x2 block alignment) and accept a square
    // only if it is pure and does not overlap an earlier one; narrow or
    // meandering classes still find room this way.
    std::vector<std::vector<Rect>> candidates(static_cast<std::size_t>(classes));
    std::vector<char> taken(static_cast<std::size_t>(truth.width) * truth.height, 0);
    for (int y = 0; y + side <= truth.height; y += 2)
        for (int x = 0; x + side <= truth.width; x += 2) {
            const int label = truth.at(x, y);
            bool ok = true;
            for (int dy = 0; dy < side && ok; ++dy)
                for (int dx = 0; dx < side && ok; ++dx)
                    ok = truth.at(x + dx, y + dy) == label &&
                         !taken[static_cast<std::size_t>(y + dy) * truth.width + x + dx];
            if (!ok) continue;
            for (int dy = 0; dy < side; ++dy)
                for (int dx = 0; dx < side; ++dx) taken[static_cast<std::size_t>(y + dy) * truth.width + x + dx] = 1;
            candidates[static_cast<std::size_t>(label)].push_back({x, y, side, side});
        }
    std::vector<LabeledRegion> regions;
    for (int c = 0; c < classes; ++c) {
        const auto& list = candidates[static_cast<std::size_t>(c)];
        const std::size_t take = std::min<std::size_t>(list.size(), static_cast<std::size_t>(per_class));
        for (std::size_t i = 0; i < take; ++i) regions.push_back({list[i * list.size() / take], c});
    }
    return regions;
}

ClassMap block_truth(const ClassMap& pixel_truth, int upscale) {
    if (upscale < 1) throw Error("upscale must be >= 1");
    check_class_map(pixel_truth);
    const int classes = static_cast<int>(pixel_truth.palette.size());
    ClassMap out;
    out.palette = pixel_truth.palette;
    out.width = pixel_truth.width * upscale / 2;
    out.height = pixel_truth.height * upscale / 2;
    out.labels.resize(static_cast<std::size_t>(out.width) * out.height);
    std::vector<int> votes(static_cast<std::size_t>(classes));
    for (int by = 0; by < out.height; ++by)
        for (int bx = 0; bx < out.width; ++bx) {
            std::fill(votes.begin(), votes.end(), 0);
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx)
                    ++votes[static_cast<std::size_t>(
                        pixel_truth.at((2 * bx + dx) / upscale, (2 * by + dy) / upscale))];
            int best = 0;
            for (int c = 1; c < classes; ++c)
                if (votes[static_cast<std::size_t>(c)] >= votes[static_cast<std::size_t>(best)]) best = c;
            out.labels[static_cast<std::size_t>(by) * out.width + bx] = best;
        }
    return out;
}

}  // namespace srnet
