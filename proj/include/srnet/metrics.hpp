#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "srnet/raster.hpp"

namespace srnet {

/// PSNR value used when the two images are identical.
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

/// Mean squared difference in 8-bit units (samples scaled by 255).
double mse(const BandRaster& f, const BandRaster& g);

/// MSE (8-bit units) at or below this is floating-point residue, not a
/// difference: an RMS error of 1e-10 gray levels.
inline constexpr double kMseZeroFloor = 1e-20;

/// 10 log10(255^2 / MSE); kPsnrInfinite when MSE is zero (at or below
/// kMseZeroFloor), so exact-in-theory reconstructions report infinity.
double psnr(const BandRaster& f, const BandRaster& g);

/// Mean of each factor x factor block; trailing rows/columns that do not fill
/// a block are dropped.
BandRaster downsample_block_mean(const BandRaster& raster, int factor);

/// PSNR of one chained step: the step-n image is block-mean downsampled by
/// `factor` to the size of the step-(n-1) image before comparison.
double chained_step_psnr(const BandRaster& previous, const BandRaster& next, int factor = 3);

struct PsnrRow {
    std::string band_id;
    std::string method;
    int step = 1;
    double psnr_db = 0.0;
};

struct PsnrReport {
    std::vector<PsnrRow> rows;
};

/// Validates unique (band, method, step) triples and positive or infinite values.
void check_report(const PsnrReport& report);

/// One 3x step for band `band_index` of the scene.
using StepUpscaler = std::function<BandRaster(std::size_t band_index, const BandRaster& raster)>;

/// Repeatedly upscales every band by 3 and scores each step against the
/// previous one. Rows are ordered by band, then step.
PsnrReport chained_psnr(const MultispectralScene& originals, const std::string& method, const StepUpscaler& upscaler,
                        int steps);

/// CSV with header band,method,step,psnr_db and "inf" for identical images.
void write_report_csv(const PsnrReport& report, const std::filesystem::path& path);
std::string report_csv(const PsnrReport& report);
PsnrReport read_report_csv(const std::filesystem::path& path);

}  // namespace srnet
