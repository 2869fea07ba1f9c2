#include "doctest.h"

#include <array>
#include <cmath>

#include "srnet/error.hpp"
#include "srnet/interp.hpp"
#include "support.hpp"

using namespace srnet;

namespace {

double ipow(double c, int n) {
    if (n < 0) return 0.0;
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= c;
    return r;
}

// Builds the 16 corner constraints directly from the monomial basis and solves
// them by Gaussian elimination with partial pivoting.
std::array<double, 16> solve_by_elimination(const CornerData& d) {
    std::array<std::array<double, 17>, 16> m{};
    const double cx[4] = {0, 1, 0, 1};
    const double cy[4] = {0, 0, 1, 1};
    int row = 0;
    for (int kind = 0; kind < 4; ++kind)
        for (int c = 0; c < 4; ++c, ++row) {
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    double v = 0.0;
                    switch (kind) {
                        case 0: v = ipow(cx[c], i) * ipow(cy[c], j); break;
                        case 1: v = i * ipow(cx[c], i - 1) * ipow(cy[c], j); break;
                        case 2: v = j * ipow(cx[c], i) * ipow(cy[c], j - 1); break;
                        case 3: v = i * j * ipow(cx[c], i - 1) * ipow(cy[c], j - 1); break;
                    }
                    m[row][4 * i + j] = v;
                }
            const std::array<double, 4>* rhs[4] = {&d.f, &d.fx, &d.fy, &d.fxy};
            m[row][16] = (*rhs[kind])[c];
        }
    for (int col = 0; col < 16; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 16; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        std::swap(m[col], m[pivot]);
        for (int r = 0; r < 16; ++r) {
            if (r == col) continue;
            const double k = m[r][col] / m[col][col];
            for (int c = col; c < 17; ++c) m[r][c] -= k * m[col][c];
        }
    }
    std::array<double, 16> out{};
    for (int r = 0; r < 16; ++r) out[r] = m[r][16] / m[r][r];
    return out;
}

CornerData random_corners(std::uint64_t seed) {
    const auto v = testing::random_vector(16, seed, -2.0, 2.0);
    CornerData d;
    for (int c = 0; c < 4; ++c) {
        d.f[c] = v[c];
        d.fx[c] = v[4 + c];
        d.fy[c] = v[8 + c];
        d.fxy[c] = v[12 + c];
    }
    return d;
}

double patch_dx(const BicubicPatchCoeffs& p, double x, double y) {
    double s = 0.0;
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += p.a[i][j] * i * ipow(x, i - 1) * ipow(y, j);
    return s;
}

double patch_dxy(const BicubicPatchCoeffs& p, double x, double y) {
    double s = 0.0;
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j) s += p.a[i][j] * i * j * ipow(x, i - 1) * ipow(y, j - 1);
    return s;
}

}  // namespace

TEST_CASE("bicubic patch matches a direct 16x16 solve") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const CornerData d = random_corners(seed);
        const auto expected = solve_by_elimination(d);
        const auto got = solve_bicubic_patch(d);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(got.a[i][j] == doctest::Approx(expected[4 * i + j]).epsilon(1e-10));
    }
}

TEST_CASE("bicubic patch reproduces corner values and derivatives") {
    const CornerData d = random_corners(77);
    const auto p = solve_bicubic_patch(d);
    const double cx[4] = {0, 1, 0, 1};
    const double cy[4] = {0, 0, 1, 1};
    for (int c = 0; c < 4; ++c) {
        CHECK(std::abs(eval_bicubic_patch(p, cx[c], cy[c]) - d.f[c]) < 1e-12);
        CHECK(std::abs(patch_dx(p, cx[c], cy[c]) - d.fx[c]) < 1e-12);
        CHECK(std::abs(patch_dxy(p, cx[c], cy[c]) - d.fxy[c]) < 1e-12);
    }
}

TEST_CASE("bicubic patch of a constant is that constant") {
    CornerData d;
    d.f = {0.4, 0.4, 0.4, 0.4};
    const auto p = solve_bicubic_patch(d);
    CHECK(eval_bicubic_patch(p, 0.3, 0.8) == doctest::Approx(0.4));
    CHECK(p.a[0][0] == 0.4);
}

TEST_CASE("bicubic patch rejects non-finite corners") {
    CornerData d;
    d.fx[2] = std::nan("");
    CHECK_THROWS_AS(solve_bicubic_patch(d), Error);
}

TEST_CASE("keys kernel shape") {
    CHECK(keys_kernel(0.0) == 1.0);
    for (double s : {1.0, -1.0, 2.0, -2.0, 2.5, -7.0}) CHECK(keys_kernel(s) == doctest::Approx(0.0));
    CHECK(keys_kernel(0.5) == doctest::Approx(0.5625));
    CHECK(keys_kernel(1.5) == doctest::Approx(-0.0625));
    CHECK(keys_kernel(0.37) == keys_kernel(-0.37));
    // Partition of unity and exact first moment for any fractional offset.
    for (double t : {0.0, 0.1, 0.25, 0.5, 0.9}) {
        double sum = 0.0, moment = 0.0;
        for (int n = -2; n <= 3; ++n) {
            sum += keys_kernel(t - n);
            moment += n * keys_kernel(t - n);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(moment == doctest::Approx(t).epsilon(1e-14));
    }
}

TEST_CASE("half-pixel source coordinates") {
    CHECK(source_coordinate(0, 3) == doctest::Approx(-1.0 / 3.0));
    CHECK(source_coordinate(1, 3) == doctest::Approx(0.0));
    CHECK(source_coordinate(4, 3) == doctest::Approx(1.0));
    CHECK(source_coordinate(5, 1) == 5.0);
    CHECK(source_coordinate(0, 2) == doctest::Approx(-0.25));
}

namespace {

// Output pixels whose four taps on each axis lie inside the source grid.
bool interior(int k, int factor, int n) {
    const double u = source_coordinate(k, factor);
    const int base = static_cast<int>(std::floor(u));
    return base - 1 >= 0 && base + 2 <= n - 1;
}

template <typename F>
BandRaster sample(int w, int h, F f) {
    BandRaster r("B", w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) r.at(x, y) = f(double(x), double(y));
    return r;
}

template <typename F>
double interior_error(const BandRaster& up, int factor, int w, int h, F f) {
    double worst = 0.0;
    for (int y = 0; y < up.height; ++y)
        for (int x = 0; x < up.width; ++x) {
            if (!interior(x, factor, w) || !interior(y, factor, h)) continue;
            const double expected = f(source_coordinate(x, factor), source_coordinate(y, factor));
            worst = std::max(worst, std::abs(up.at(x, y) - expected));
        }
    return worst;
}

}  // namespace

TEST_CASE("bicubic reproduces affine and quadratic rasters in the interior") {
    auto affine = [](double x, double y) { return 0.1 + 0.02 * x + 0.015 * y; };
    auto quad = [](double x, double y) { return 0.05 + 0.003 * x * x + 0.002 * x * y + 0.001 * y * y; };
    for (int factor : {2, 3, 4}) {
        const BandRaster a = sample(14, 11, affine);
        CHECK(interior_error(upscale_bicubic_raw(a, factor), factor, 14, 11, affine) < 1e-10);
        const BandRaster q = sample(13, 12, quad);
        CHECK(interior_error(upscale_bicubic_raw(q, factor), factor, 13, 12, quad) < 1e-6);
    }
}

TEST_CASE("bilinear reproduces affine rasters in the interior") {
    auto affine = [](double x, double y) { return 0.2 + 0.01 * x + 0.03 * y; };
    const BandRaster a = sample(10, 9, affine);
    CHECK(interior_error(upscale_bilinear_raw(a, 3), 3, 10, 9, affine) < 1e-12);
}

TEST_CASE("upscaling shape, identity factor and constants") {
    const BandRaster r = testing::random_raster(7, 5, 3, "B4");
    for (auto up : {upscale_bicubic(r, 3), upscale_bilinear(r, 3)}) {
        CHECK(up.width == 21);
        CHECK(up.height == 15);
        CHECK(up.band_id == "B4");
    }
    CHECK(upscale_bicubic(r, 1).samples == r.samples);
    CHECK(upscale_bilinear(r, 1).samples == r.samples);

    const BandRaster flat("B", 6, 6, 0.7);
    for (double v : upscale_bicubic(flat, 3).samples) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
    for (double v : upscale_bilinear(flat, 2).samples) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("bicubic overshoot is clamped only in the clamped variant") {
    BandRaster step("B", 8, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 4; x < 8; ++x) step.at(x, y) = 1.0;
    const BandRaster raw = upscale_bicubic_raw(step, 3);
    const auto [lo, hi] = std::minmax_element(raw.samples.begin(), raw.samples.end());
    CHECK(*lo < 0.0);
    CHECK(*hi > 1.0);
    const BandRaster clamped = upscale_bicubic(step, 3);
    CHECK_NOTHROW(check_raster(clamped));
}

TEST_CASE("upscaling rejects a factor below one") {
    const BandRaster r("B", 4, 4);
    CHECK_THROWS_AS(upscale_bicubic(r, 0), Error);
    CHECK_THROWS_AS(upscale_bilinear(r, -2), Error);
}
