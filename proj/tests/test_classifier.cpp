#include "doctest.h"

#include <cmath>

#include "srnet/classifier.hpp"
#include "srnet/error.hpp"
#include "srnet/model_io.hpp"
#include "srnet/rng.hpp"
#include "srnet/synthetic.hpp"
#include "support.hpp"

using namespace srnet;

namespace {

// Three Gaussian blobs in `dim` dimensions, well separated.
FeatureSet blobs(int dim, int per_class, double spread, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    std::normal_distribution<double> gauss(0.0, spread);
    FeatureSet set;
    set.dim = dim;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < per_class; ++i) {
            for (int d = 0; d < dim; ++d) set.values.push_back(0.2 + 0.3 * ((c + d) % 3) + gauss(rng));
            set.labels.push_back(c);
        }
    return set;
}

}  // namespace

TEST_CASE("mlp shapes") {
    const std::vector<int> hidden{24};
    const MlpModel m = make_mlp(24, hidden, default_class_names(), Activation::Sigmoid, 1);
    REQUIRE(m.layers.size() == 2);
    CHECK(m.input_dim() == 24);
    CHECK(m.class_count() == 3);
    CHECK(m.activation(0) == Activation::Sigmoid);
    CHECK(m.activation(1) == Activation::Linear);
    CHECK(mlp_logits(m, std::vector<double>(24, 0.5)).size() == 3);
}

TEST_CASE("dataset loss gradient matches finite differences") {
    const FeatureSet data = blobs(6, 5, 0.1, 2);
    for (auto act : {Activation::Sigmoid, Activation::Relu, Activation::Linear}) {
        const std::vector<int> hidden{5, 4};
        const MlpModel m = make_mlp(6, hidden, default_class_names(), act, 3);
        const ParamVector p = pack_params(m.layers);
        const Evaluation e = mlp_dataset_loss(m, p, data);
        auto f = [&](std::span<const double> q) { return mlp_dataset_loss(m, q, data).loss; };
        CHECK(testing::relative_error(e.grad, testing::numeric_gradient(f, p)) < 1e-6);
    }
}

TEST_CASE("dataset loss is the mean per-sample cross-entropy") {
    const FeatureSet data = blobs(4, 3, 0.1, 5);
    const std::vector<int> hidden{3};
    const MlpModel m = make_mlp(4, hidden, default_class_names(), Activation::Sigmoid, 6);
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        sum += softmax_cross_entropy(mlp_logits(m, data.feature(i)), data.labels[i]).loss;
    CHECK(mlp_dataset_loss(m, pack_params(m.layers), data).loss == doctest::Approx(sum / data.size()));
}

TEST_CASE("training separates blobs") {
    const FeatureSet data = blobs(8, 40, 0.05, 7);
    ClassifierOptions opts;
    opts.hidden_dims = {6};
    opts.scg.max_iter = 200;
    opts.seed = 3;
    const ClassifierTraining t = train_classifier(data, opts);
    CHECK(t.iterations <= 200);
    CHECK(t.loss_trace.back() < t.loss_trace.front());
    const auto pred = classify_features(t.model, data);
    CHECK(evaluate(pred, data.labels, 3).accuracy == 1.0);

    const ClassifierTraining again = train_classifier(data, opts);
    CHECK(pack_params(again.model.layers) == pack_params(t.model.layers));
}

TEST_CASE("training needs every class") {
    FeatureSet data = blobs(4, 5, 0.1, 1);
    for (int& l : data.labels)
        if (l == 2) l = 1;
    CHECK_THROWS_WITH_AS(train_classifier(data, {}), doctest::Contains("river"), Error);
}

TEST_CASE("argmax ties go to the lowest class index") {
    const std::vector<int> hidden{2};
    MlpModel m = make_mlp(4, hidden, default_class_names(), Activation::Sigmoid, 1);
    for (auto& l : m.layers) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0);
        std::fill(l.biases.begin(), l.biases.end(), 0.0);
    }
    FeatureSet f;
    f.dim = 4;
    f.values = {0.1, 0.2, 0.3, 0.4};
    CHECK(classify_features(m, f) == std::vector<int>{0});
    m.layers[1].biases = {0.0, 1.0, 1.0};
    CHECK(classify_features(m, f) == std::vector<int>{1});
}

TEST_CASE("scene classification produces one label per 2x2 block") {
    const std::vector<int> hidden{3};
    const MlpModel m = make_mlp(8, hidden, default_class_names(), Activation::Sigmoid, 2);
    const auto scene = make_scene({testing::random_raster(7, 5, 1, "B1"), testing::random_raster(7, 5, 2, "B2")});
    const ClassMap map = classify_scene(m, scene);
    CHECK(map.width == 3);
    CHECK(map.height == 2);
    CHECK(map.labels.size() == 6);
    const auto one_band = make_scene({testing::random_raster(7, 5, 1, "B1")});
    CHECK_THROWS_AS(classify_scene(m, one_band), Error);
}

TEST_CASE("confusion matrix against a tally") {
    const std::vector<int> truth = {0, 0, 1, 1, 1, 2, 2, 0};
    const std::vector<int> pred = {0, 1, 1, 1, 2, 2, 0, 0};
    const EvaluationReport r = evaluate(pred, truth, 3);
    CHECK(r.confusion.at(0, 0) == 2);
    CHECK(r.confusion.at(0, 1) == 1);
    CHECK(r.confusion.at(1, 2) == 1);
    CHECK(r.confusion.at(2, 0) == 1);
    CHECK(r.confusion.total() == 8);
    CHECK(r.accuracy == doctest::Approx(5.0 / 8.0));
    CHECK(r.confusion.recall(1) == doctest::Approx(2.0 / 3.0));
    CHECK(r.confusion.recall(2) == doctest::Approx(0.5));

    const EvaluationReport absent = evaluate(std::vector<int>{0, 0}, std::vector<int>{0, 1}, 3);
    CHECK(std::isnan(absent.confusion.recall(2)));
    CHECK_THROWS_AS(evaluate(pred, std::vector<int>{0}, 3), Error);
    CHECK_THROWS_AS(evaluate(std::vector<int>{3}, std::vector<int>{0}, 3), Error);
}

TEST_CASE("mlp model files round trip bit-exactly") {
    const auto dir = testing::scratch_dir("mlp_io");
    const std::vector<int> hidden{5, 4};
    const MlpModel m = make_mlp(8, hidden, {"a", "b", "c", "d"}, Activation::Relu, 9);
    save_mlp(m, dir / "m.json");
    const MlpModel back = load_mlp(dir / "m.json");
    CHECK(pack_params(back.layers) == pack_params(m.layers));
    CHECK(back.class_names == m.class_names);
    CHECK(back.hidden_activation == Activation::Relu);
}

// --- synthetic scenes --------------------------------------------------------

TEST_CASE("synthetic scenes are seed-deterministic") {
    const auto a = make_synthetic_scene(default_synthetic_spec(48, 40, 0.02, 5));
    const auto b = make_synthetic_scene(default_synthetic_spec(48, 40, 0.02, 5));
    const auto c = make_synthetic_scene(default_synthetic_spec(48, 40, 0.02, 6));
    CHECK(a.scene.bands[3].samples == b.scene.bands[3].samples);
    CHECK(a.truth.labels == b.truth.labels);
    CHECK(a.scene.bands[3].samples != c.scene.bands[3].samples);
    CHECK(a.scene.band_count() == 6);
    CHECK(a.scene.bands[5].band_id == "B7");
}

TEST_CASE("synthetic layout has thin river branches") {
    const SyntheticLayout layout = default_layout(128, 128, 3);
    int thin = 0;
    for (const Stroke& s : layout.strokes)
        if (s.label == 2 && s.thickness <= 2) ++thin;
    CHECK(thin >= 2);
    const ClassMap truth = rasterize_layout(layout, 3);
    for (int c = 0; c < 3; ++c) CHECK(std::count(truth.labels.begin(), truth.labels.end(), c) > 0);
}

TEST_CASE("noise-free constant regions are classified perfectly") {
    SyntheticSpec spec;
    spec.layout.width = 24;
    spec.layout.height = 16;
    spec.layout.background = 0;
    spec.layout.rects = {{{8, 0, 8, 16}, 1}, {{16, 0, 8, 16}, 2}};
    spec.band_ids = default_band_ids();
    spec.class_means = default_class_means();
    spec.noise = 0.0;
    const SyntheticScene s = make_synthetic_scene(spec);
    const auto regions = pure_training_regions(s.truth, 4, 2);
    const FeatureSet data = label_regions(s.scene, regions);
    ClassifierOptions opts;
    opts.seed = 1;
    const ClassifierTraining t = train_classifier(data, opts);
    const ClassMap map = classify_scene(t.model, s.scene);
    const ClassMap truth = block_truth(s.truth, 1);
    CHECK(evaluate(map.labels, truth.labels, 3).accuracy == 1.0);
}

TEST_CASE("synthetic noise matches the configured class means") {
    SyntheticSpec spec;
    spec.layout.width = 120;
    spec.layout.height = 100;
    spec.layout.rects = {{{60, 0, 60, 100}, 2}};
    spec.band_ids = default_band_ids();
    // Means kept well inside [0,1] so clamping does not bias the sample means.
    spec.class_means = {{0.30, 0.35, 0.40, 0.45, 0.50, 0.55},
                        {0.50, 0.50, 0.50, 0.50, 0.50, 0.50},
                        {0.70, 0.65, 0.60, 0.55, 0.40, 0.25}};
    spec.noise = 0.05;
    spec.seed = 17;
    const SyntheticScene s = make_synthetic_scene(spec);
    for (std::size_t b = 0; b < 6; ++b)
        for (int c : {0, 2}) {
            double sum = 0.0;
            int n = 0;
            for (std::size_t i = 0; i < s.truth.labels.size(); ++i)
                if (s.truth.labels[i] == c) {
                    sum += s.scene.bands[b].samples[i];
                    ++n;
                }
            REQUIRE(n == 6000);
            const double sigma_mean = spec.noise / std::sqrt(double(n));
            CHECK(std::abs(sum / n - spec.class_means[c][b]) < 3.0 * sigma_mean);
        }
}

TEST_CASE("pure training squares are pure, disjoint and cover every class") {
    const auto s = make_synthetic_scene(default_synthetic_spec(96, 96, 0.02, 4));
    const auto regions = pure_training_regions(s.truth, 6, 4);
    int per_class[3] = {0, 0, 0};
    for (const auto& r : regions) {
        ++per_class[r.label];
        for (int y = r.rect.y; y < r.rect.y + r.rect.h; ++y)
            for (int x = r.rect.x; x < r.rect.x + r.rect.w; ++x) CHECK(s.truth.at(x, y) == r.label);
        CHECK(r.rect.x % 2 == 0);
    }
    for (int c = 0; c < 3; ++c) CHECK(per_class[c] == 4);
    for (std::size_t i = 0; i < regions.size(); ++i)
        for (std::size_t j = i + 1; j < regions.size(); ++j) {
            const Rect& a = regions[i].rect;
            const Rect& b = regions[j].rect;
            CHECK((a.x + a.w <= b.x || b.x + b.w <= a.x || a.y + a.h <= b.y || b.y + b.h <= a.y));
        }
}

TEST_CASE("block truth uses majority with ties to the higher class") {
    ClassMap t;
    t.width = 4;
    t.height = 2;
    t.labels = {0, 2, 1, 1,  //
                0, 2, 1, 0};
    const ClassMap b = block_truth(t, 1);
    CHECK(b.width == 2);
    CHECK(b.labels == std::vector<int>{2, 1});
    // Upscaling by 3 makes a 12x6 grid, i.e. 6x3 blocks.
    const ClassMap b3 = block_truth(t, 3);
    CHECK(b3.width == 6);
    CHECK(b3.height == 3);
    CHECK(b3.at(0, 0) == 0);
    CHECK(b3.at(5, 2) == 0);
}

TEST_CASE("degenerate layouts are rejected") {
    SyntheticLayout l;
    l.width = 8;
    l.height = 8;
    l.rects = {{{0, 0, 0, 3}, 1}};
    CHECK_THROWS_AS(rasterize_layout(l, 3), Error);
    l.rects = {{{0, 0, 2, 2}, 5}};
    CHECK_THROWS_AS(rasterize_layout(l, 3), Error);
    CHECK_THROWS_AS(default_layout(2, 10, 1), Error);
}
