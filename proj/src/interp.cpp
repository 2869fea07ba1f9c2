#include "srnet/interp.hpp"

#include <algorithm>
#include <cmath>

#include "srnet/error.hpp"

namespace srnet {

BicubicPatchCoeffs solve_bicubic_patch(const CornerData& c) {
    auto finite = [](const std::array<double, 4>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(c.f) || !finite(c.fx) || !finite(c.fy) || !finite(c.fxy))
        throw Error("bicubic corner data must be finite");

    // Hermite form: A = L * F * L^T, rows of F indexed by x-side data, columns by y-side.
    constexpr double L[4][4] = {{1, 0, 0, 0}, {0, 0, 1, 0}, {-3, 3, -2, -1}, {2, -2, 1, 1}};
    const double F[4][4] = {
        {c.f[0], c.f[2], c.fy[0], c.fy[2]},
        {c.f[1], c.f[3], c.fy[1], c.fy[3]},
        {c.fx[0], c.fx[2], c.fxy[0], c.fxy[2]},
        {c.fx[1], c.fx[3], c.fxy[1], c.fxy[3]},
    };
    double LF[4][4] = {};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) LF[i][j] += L[i][k] * F[k][j];
    BicubicPatchCoeffs out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += LF[i][k] * L[j][k];
            out.a[i][j] = s;
        }
    return out;
}

double eval_bicubic_patch(const BicubicPatchCoeffs& coeffs, double x, double y) {
    double result = 0.0;
    double xi = 1.0;
    for (int i = 0; i < 4; ++i) {
        double yj = 1.0;
        for (int j = 0; j < 4; ++j) {
            result += coeffs.a[i][j] * xi * yj;
            yj *= y;
        }
        xi *= x;
    }
    return result;
}

double keys_kernel(double s, double a) {
    const double t = std::abs(s);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

namespace {

// Source indices (edge-clamped) and weights for every output index on one axis.
template <int Taps>
struct AxisTaps {
    std::vector<std::array<int, Taps>> index;
    std::vector<std::array<double, Taps>> weight;
};

AxisTaps<2> linear_taps(int src_len, int factor) {
    const int out_len = src_len * factor;
    AxisTaps<2> taps;
    taps.index.resize(out_len);
    taps.weight.resize(out_len);
    for (int k = 0; k < out_len; ++k) {
        const double u = source_coordinate(k, factor);
        const double base = std::floor(u);
        const double t = u - base;
        const int i0 = static_cast<int>(base);
        taps.index[k] = {std::clamp(i0, 0, src_len - 1), std::clamp(i0 + 1, 0, src_len - 1)};
        taps.weight[k] = {1.0 - t, t};
    }
    return taps;
}

AxisTaps<4> cubic_taps(int src_len, int factor) {
    const int out_len = src_len * factor;
    AxisTaps<4> taps;
    taps.index.resize(out_len);
    taps.weight.resize(out_len);
    for (int k = 0; k < out_len; ++k) {
        const double u = source_coordinate(k, factor);
        const double base = std::floor(u);
        const double t = u - base;
        const int i0 = static_cast<int>(base);
        for (int m = 0; m < 4; ++m) {
            taps.index[k][m] = std::clamp(i0 - 1 + m, 0, src_len - 1);
            taps.weight[k][m] = keys_kernel(t - (m - 1));
        }
    }
    return taps;
}

// Separable resample: horizontal pass into an intermediate, then vertical.
template <int Taps>
BandRaster separable(const BandRaster& src, const AxisTaps<Taps>& xs, const AxisTaps<Taps>& ys) {
    const int out_w = static_cast<int>(xs.index.size());
    const int out_h = static_cast<int>(ys.index.size());
    std::vector<double> rows(static_cast<std::size_t>(out_w) * src.height);
    for (int y = 0; y < src.height; ++y) {
        const double* in = src.samples.data() + static_cast<std::size_t>(y) * src.width;
        double* out = rows.data() + static_cast<std::size_t>(y) * out_w;
        for (int x = 0; x < out_w; ++x) {
            double s = 0.0;
            for (int m = 0; m < Taps; ++m) s += xs.weight[x][m] * in[xs.index[x][m]];
            out[x] = s;
        }
    }
    BandRaster dst(src.band_id, out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        double* out = dst.samples.data() + static_cast<std::size_t>(y) * out_w;
        for (int m = 0; m < Taps; ++m) {
            const double w = ys.weight[y][m];
            const double* in = rows.data() + static_cast<std::size_t>(ys.index[y][m]) * out_w;
            for (int x = 0; x < out_w; ++x) out[x] += w * in[x];
        }
    }
    return dst;
}

void check_factor(int factor) {
    if (factor < 1) throw Error("upscale factor must be >= 1, got " + std::to_string(factor));
}

BandRaster clamped(BandRaster raster) {
    for (double& v : raster.samples) v = std::clamp(v, 0.0, 1.0);
    return raster;
}

}  // namespace

BandRaster upscale_bilinear_raw(const BandRaster& raster, int factor) {
    check_factor(factor);
    return separable(raster, linear_taps(raster.width, factor), linear_taps(raster.height, factor));
}

BandRaster upscale_bicubic_raw(const BandRaster& raster, int factor) {
    check_factor(factor);
    return separable(raster, cubic_taps(raster.width, factor), cubic_taps(raster.height, factor));
}

BandRaster upscale_bilinear(const BandRaster& raster, int factor) {
    return clamped(upscale_bilinear_raw(raster, factor));
}

BandRaster upscale_bicubic(const BandRaster& raster, int factor) {
    return clamped(upscale_bicubic_raw(raster, factor));
}

}  // namespace srnet
