#include "doctest.h"

#include <fstream>

#include "json.hpp"
#include "srnet/error.hpp"
#include "srnet/raster.hpp"
#include "support.hpp"

using namespace srnet;
namespace fs = std::filesystem;

TEST_CASE("raster validation") {
    CHECK_NOTHROW(check_raster(BandRaster("B1", 3, 2, 0.5)));
    BandRaster bad("B1", 2, 2);
    bad.samples[3] = 1.5;
    CHECK_THROWS_AS(check_raster(bad), Error);
    bad.samples[3] = -0.1;
    CHECK_THROWS_AS(check_raster(bad), Error);
    bad.samples.pop_back();
    CHECK_THROWS_AS(check_raster(bad), Error);
    CHECK_THROWS_AS(BandRaster("B", 0, 3), Error);
    CHECK_THROWS_AS(BandRaster("B", 2, 2, std::vector<double>(3)), Error);
}

TEST_CASE("scene construction checks dimensions and ids") {
    CHECK_THROWS_AS(make_scene({BandRaster("B1", 4, 4), BandRaster("B2", 4, 5)}), Error);
    CHECK_THROWS_AS(make_scene({BandRaster("B1", 4, 4), BandRaster("B1", 4, 4)}), Error);
    const auto scene = make_scene({BandRaster("B1", 4, 3), BandRaster("B2", 4, 3)});
    CHECK(scene.width == 4);
    CHECK(scene.height == 3);
    CHECK(scene.band_count() == 2);
}

TEST_CASE("pgm round trip and quantization") {
    const auto dir = testing::scratch_dir("pgm");
    const BandRaster r = testing::random_raster(9, 7, 11);
    write_pgm(to_gray(r), dir / "b.pgm");
    const GrayImage back = read_pgm(dir / "b.pgm");
    CHECK(back.width == 9);
    CHECK(back.height == 7);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(back.pixels[i] == quantize(r.samples[i]));
    const BandRaster again = from_gray(back, "B");
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(again.samples[i] - r.samples[i]) <= 0.5 / 255 + 1e-12);

    CHECK(quantize(0.0) == 0);
    CHECK(quantize(1.0) == 255);
    CHECK(quantize(0.5) == 128);  // 127.5 rounds away from zero
}

TEST_CASE("pgm reader handles comments and rejects other depths") {
    const auto dir = testing::scratch_dir("pgm_hdr");
    {
        std::ofstream out(dir / "c.pgm", std::ios::binary);
        out << "P5\n# a comment\n2 1\n255\n";
        out.put(char(10)).put(char(200));
    }
    const GrayImage g = read_pgm(dir / "c.pgm");
    CHECK(g.pixels == std::vector<std::uint8_t>{10, 200});
    {
        std::ofstream out(dir / "d.pgm", std::ios::binary);
        out << "P5\n2 1\n65535\n";
        out.write("\0\0\0\0", 4);
    }
    CHECK_THROWS_WITH_AS(read_pgm(dir / "d.pgm"), doctest::Contains("unsupported pixel depth"), Error);
    CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), Error);
}

TEST_CASE("scene manifest round trip") {
    const auto dir = testing::scratch_dir("manifest");
    const auto scene = make_scene({testing::random_raster(6, 4, 1, "B1"), testing::random_raster(6, 4, 2, "B7")});
    const fs::path manifest = write_scene(scene, dir / "s");
    const MultispectralScene back = load_scene(manifest);
    REQUIRE(back.band_count() == 2);
    CHECK(back.bands[1].band_id == "B7");
    CHECK(back.width == 6);
    CHECK(to_gray(back.bands[0]).pixels == to_gray(scene.bands[0]).pixels);

    // A manifest whose declared size disagrees with its bands is rejected.
    nlohmann::json doc;
    std::ifstream(manifest) >> doc;
    doc["width"] = 7;
    std::ofstream(dir / "s" / "bad.json") << doc.dump();
    CHECK_THROWS_AS(load_scene(dir / "s" / "bad.json"), Error);
}

TEST_CASE("2x2 pooling") {
    BandRaster r("B", 5, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) r.at(x, y) = (x + 10 * y) / 100.0;
    const BandRaster p = pool_2x2(r);
    CHECK(p.width == 2);
    CHECK(p.height == 1);
    CHECK(p.at(0, 0) == doctest::Approx((0 + 1 + 10 + 11) / 400.0));
    CHECK(p.at(1, 0) == doctest::Approx((2 + 3 + 12 + 13) / 400.0));
    CHECK_THROWS_AS(pool_2x2(BandRaster("B", 1, 4)), Error);
}

TEST_CASE("pooled feature layout is band-major then row-major") {
    BandRaster a("B1", 4, 2), b("B2", 4, 2);
    for (int i = 0; i < 8; ++i) {
        a.samples[i] = i / 10.0;
        b.samples[i] = 0.05 + i / 10.0;
    }
    const FeatureSet f = extract_features(make_scene({a, b}), FeatureMode::Pooled2x2);
    CHECK(f.dim == 8);
    REQUIRE(f.size() == 2);
    const auto v = f.feature(1);  // block x=1
    const double expected[8] = {0.2, 0.3, 0.6, 0.7, 0.25, 0.35, 0.65, 0.75};
    for (int i = 0; i < 8; ++i) CHECK(v[i] == doctest::Approx(expected[i]));
    CHECK(feature_dim(FeatureMode::Pooled2x2, 6) == 24);
    CHECK(feature_dim(FeatureMode::Patch3x3, 6) == 54);
}

TEST_CASE("3x3 patch features cover interior pixels") {
    const auto scene = make_scene({testing::random_raster(5, 4, 9, "B1")});
    const FeatureSet f = extract_features(scene, FeatureMode::Patch3x3);
    CHECK(f.dim == 9);
    REQUIRE(f.size() == 3 * 2);
    // First patch is centered on (1,1).
    CHECK(f.feature(0)[4] == scene.bands[0].at(1, 1));
    CHECK(f.feature(0)[0] == scene.bands[0].at(0, 0));
    CHECK(f.feature(5)[8] == scene.bands[0].at(4, 3));
}

TEST_CASE("feature mode names") {
    CHECK(feature_mode_from_string(to_string(FeatureMode::Patch3x3)) == FeatureMode::Patch3x3);
    CHECK_THROWS_AS(feature_mode_from_string("octagon"), Error);
}

TEST_CASE("region labeling") {
    const auto scene = make_scene({testing::random_raster(8, 8, 4, "B1"), testing::random_raster(8, 8, 5, "B2")});
    const std::vector<LabeledRegion> regions = {{{0, 0, 4, 4}, 0}, {{4, 4, 4, 2}, 2}};
    const FeatureSet f = label_regions(scene, regions);
    CHECK(f.size() == 4 + 2);
    CHECK(f.labels == std::vector<int>{0, 0, 0, 0, 2, 2});
    CHECK_NOTHROW(check_features(f));
    // Region features equal the features of the cropped scene.
    const FeatureSet crop = extract_features(crop_scene(scene, {4, 4, 4, 2}));
    for (int i = 0; i < f.dim; ++i) CHECK(f.feature(4)[i] == crop.feature(0)[i]);

    CHECK_THROWS_AS(label_regions(scene, {}), Error);
    const std::vector<LabeledRegion> outside = {{{6, 6, 4, 4}, 1}};
    CHECK_THROWS_AS(label_regions(scene, outside), Error);
    const std::vector<LabeledRegion> bad_label = {{{0, 0, 2, 2}, 3}};
    CHECK_THROWS_AS(label_regions(scene, bad_label), Error);
}

TEST_CASE("class map palette round trip") {
    const auto dir = testing::scratch_dir("classmap");
    ClassMap m;
    m.width = 3;
    m.height = 2;
    m.labels = {0, 1, 2, 2, 1, 0};
    write_class_map(m, dir / "m.pgm");
    const GrayImage g = read_pgm(dir / "m.pgm");
    CHECK(g.pixels == std::vector<std::uint8_t>{128, 255, 0, 0, 255, 128});
    CHECK(read_class_map(dir / "m.pgm").labels == m.labels);

    write_pgm({2, 1, {128, 77}}, dir / "odd.pgm");
    CHECK_THROWS_AS(read_class_map(dir / "odd.pgm"), Error);
}

TEST_CASE("region files accept names and indices") {
    const auto dir = testing::scratch_dir("regions");
    std::ofstream(dir / "r.json") << R"({"classes":["deep_forest","light_forest","river"],
        "regions":[{"x":1,"y":2,"w":4,"h":4,"class":"river"},{"x":0,"y":0,"w":2,"h":2,"class":1}]})";
    const RegionFile r = load_regions(dir / "r.json");
    REQUIRE(r.regions.size() == 2);
    CHECK(r.regions[0].label == 2);
    CHECK(r.regions[0].rect.y == 2);
    CHECK(r.regions[1].label == 1);
    write_regions(r, dir / "again.json");
    CHECK(load_regions(dir / "again.json").regions[0].rect.w == 4);

    std::ofstream(dir / "bad.json") << R"({"regions":[{"x":0,"y":0,"w":2,"h":2,"class":"swamp"}]})";
    CHECK_THROWS_AS(load_regions(dir / "bad.json"), Error);
}
