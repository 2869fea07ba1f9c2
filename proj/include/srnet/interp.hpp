#pragma once

#include <array>

#include "srnet/raster.hpp"

namespace srnet {

/// Function value and partial derivatives at the unit-square corners,
/// ordered (0,0), (1,0), (0,1), (1,1).
struct CornerData {
    std::array<double, 4> f{};
    std::array<double, 4> fx{};
    std::array<double, 4> fy{};
    std::array<double, 4> fxy{};
};

/// Coefficients a[i][j] of p(x,y) = sum_ij a[i][j] x^i y^j.
struct BicubicPatchCoeffs {
    std::array<std::array<double, 4>, 4> a{};
};

BicubicPatchCoeffs solve_bicubic_patch(const CornerData& corners);
double eval_bicubic_patch(const BicubicPatchCoeffs& coeffs, double x, double y);

/// Keys cubic convolution kernel with parameter a (default -0.5).
double keys_kernel(double s, double a = -0.5);

/// Source coordinate sampled by output index k at an integer upscale factor
/// (half-pixel-centered mapping).
inline double source_coordinate(int k, int factor) { return (k + 0.5) / factor - 0.5; }

/// Upscaled rasters with samples clamped to [0,1].
BandRaster upscale_bilinear(const BandRaster& raster, int factor);
BandRaster upscale_bicubic(const BandRaster& raster, int factor);

/// Same resampling without the final clamp; samples may leave [0,1].
BandRaster upscale_bilinear_raw(const BandRaster& raster, int factor);
BandRaster upscale_bicubic_raw(const BandRaster& raster, int factor);

}  // namespace srnet
