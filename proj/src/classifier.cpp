#include "srnet/classifier.hpp"

#include <cmath>
#include <limits>

#include "srnet/error.hpp"
#include "srnet/rng.hpp"

namespace srnet {

void check_model(const MlpModel& model) {
    if (model.layers.empty()) throw Error("classifier has no layers");
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        check_layer(model.layers[l]);
        if (l > 0 && model.layers[l].in_dim != model.layers[l - 1].out_dim)
            throw Error("classifier layer dimensions do not chain at layer " + std::to_string(l));
    }
    if (static_cast<std::size_t>(model.class_count()) != model.class_names.size())
        throw Error("classifier output width does not match the class count");
}

MlpModel make_mlp(int input_dim, std::span<const int> hidden_dims, std::vector<std::string> class_names,
                  Activation hidden_activation, std::uint64_t seed) {
    MlpModel model;
    model.hidden_activation = hidden_activation;
    model.class_names = std::move(class_names);
    int in = input_dim;
    for (int h : hidden_dims) {
        model.layers.emplace_back(in, h);
        in = h;
    }
    model.layers.emplace_back(in, static_cast<int>(model.class_names.size()));
    Xoshiro256 rng(seed);
    for (auto& layer : model.layers) init_gaussian(layer, rng);
    check_model(model);
    return model;
}

std::vector<double> mlp_logits(const MlpModel& model, std::span<const double> input) {
    std::vector<double> x(input.begin(), input.end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) x = dense_forward(x, model.layers[l], model.activation(l));
    return x;
}

Evaluation mlp_dataset_loss(const MlpModel& shape, std::span<const double> params, const FeatureSet& data) {
    if (!data.labeled() || data.size() == 0) throw Error("classifier loss needs labeled samples");
    MlpModel model = shape;
    unpack_params(params, model.layers);

    const std::size_t L = model.layers.size();
    std::vector<std::size_t> offsets(L);
    std::size_t off = 0;
    for (std::size_t l = 0; l < L; ++l) {
        offsets[l] = off;
        off += model.layers[l].weights.size() + model.layers[l].biases.size();
    }

    Evaluation total;
    total.grad.assign(params.size(), 0.0);
    std::vector<std::vector<double>> acts(L + 1);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.feature(i);
        acts[0].assign(x.begin(), x.end());
        for (std::size_t l = 0; l < L; ++l) acts[l + 1] = dense_forward(acts[l], model.layers[l], model.activation(l));
        LossGrad lg = softmax_cross_entropy(acts[L], data.labels[i]);
        total.loss += lg.loss;
        std::vector<double> upstream = std::move(lg.grad);
        for (std::size_t l = L; l-- > 0;) {
            DenseGrads g = dense_backward(acts[l], model.layers[l], model.activation(l), acts[l + 1], upstream);
            double* dst = total.grad.data() + offsets[l];
            for (double v : g.weight_grad) *dst++ += v;
            for (double v : g.bias_grad) *dst++ += v;
            upstream = std::move(g.input_grad);
        }
    }
    const double scale = 1.0 / static_cast<double>(data.size());
    total.loss *= scale;
    for (double& g : total.grad) g *= scale;
    return total;
}

ClassifierTraining train_classifier(const FeatureSet& data, const ClassifierOptions& options) {
    check_features(data);
    if (!data.labeled() || data.size() == 0) throw Error("train_classifier needs labeled samples");
    std::vector<std::size_t> per_class(data.class_count(), 0);
    for (int label : data.labels) ++per_class[static_cast<std::size_t>(label)];
    for (std::size_t c = 0; c < per_class.size(); ++c)
        if (per_class[c] == 0) throw Error("class '" + data.class_names[c] + "' has no training samples");

    ClassifierTraining out;
    out.model = make_mlp(data.dim, options.hidden_dims, data.class_names, options.hidden_activation, options.seed);
    const MlpModel shape = out.model;
    auto objective = [&](std::span<const double> params) { return mlp_dataset_loss(shape, params, data); };
    ScgResult result = scg_minimize(objective, pack_params(out.model.layers), options.scg);
    unpack_params(result.params, out.model.layers);
    out.loss_trace = std::move(result.loss_trace);
    out.iterations = result.iterations;
    return out;
}

std::vector<int> classify_features(const MlpModel& model, const FeatureSet& features) {
    check_model(model);
    if (features.size() > 0 && features.dim != model.input_dim())
        throw Error("features have dimension " + std::to_string(features.dim) + ", classifier expects " +
                    std::to_string(model.input_dim()));
    std::vector<int> out(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto logits = mlp_logits(model, features.feature(i));
        int best = 0;
        for (std::size_t c = 1; c < logits.size(); ++c)
            if (logits[c] > logits[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
        out[i] = best;
    }
    return out;
}

ClassMap classify_scene(const MlpModel& model, const MultispectralScene& scene) {
    check_model(model);
    const int expected = feature_dim(FeatureMode::Pooled2x2, scene.band_count());
    if (expected != model.input_dim())
        throw Error("scene has " + std::to_string(scene.band_count()) + " bands but the classifier expects " +
                    std::to_string(model.input_dim() / 4));
    const FeatureSet features = extract_features(scene, FeatureMode::Pooled2x2);
    ClassMap map;
    map.width = scene.width / 2;
    map.height = scene.height / 2;
    map.labels = classify_features(model, features);
    return map;
}

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

std::size_t ConfusionMatrix::row_sum(int truth) const {
    std::size_t t = 0;
    for (int p = 0; p < classes; ++p) t += at(truth, p);
    return t;
}

double ConfusionMatrix::recall(int c) const {
    const std::size_t n = row_sum(c);
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(at(c, c)) / static_cast<double>(n);
}

EvaluationReport evaluate(std::span<const int> predictions, std::span<const int> truth, int classes) {
    if (predictions.size() != truth.size())
        throw Error("evaluate: " + std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " truth labels");
    if (classes < 1) throw Error("evaluate needs at least one class");
    EvaluationReport report;
    report.confusion.classes = classes;
    report.confusion.counts.assign(static_cast<std::size_t>(classes) * classes, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= classes || predictions[i] < 0 || predictions[i] >= classes)
            throw Error("evaluate: label out of range at index " + std::to_string(i));
        ++report.confusion.counts[static_cast<std::size_t>(truth[i]) * classes + predictions[i]];
        if (truth[i] == predictions[i]) ++correct;
    }
    report.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
    return report;
}

}  // namespace srnet
