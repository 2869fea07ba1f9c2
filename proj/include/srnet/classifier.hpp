#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "srnet/nnet.hpp"
#include "srnet/optim.hpp"
#include "srnet/raster.hpp"

namespace srnet {

/// Feed-forward classifier: hidden layers share one activation, the last
/// layer emits linear logits.
struct MlpModel {
    std::vector<DenseLayer> layers;
    Activation hidden_activation = Activation::Sigmoid;
    std::vector<std::string> class_names = default_class_names();

    int input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    int class_count() const { return layers.empty() ? 0 : layers.back().out_dim; }
    Activation activation(std::size_t layer) const {
        return layer + 1 == layers.size() ? Activation::Linear : hidden_activation;
    }
};

void check_model(const MlpModel& model);

MlpModel make_mlp(int input_dim, std::span<const int> hidden_dims, std::vector<std::string> class_names,
                  Activation hidden_activation, std::uint64_t seed);

std::vector<double> mlp_logits(const MlpModel& model, std::span<const double> input);

/// Mean softmax cross-entropy over the labeled set and its gradient in the
/// model's ParamVector layout. Samples are accumulated in index order.
Evaluation mlp_dataset_loss(const MlpModel& shape, std::span<const double> params, const FeatureSet& data);

struct ClassifierOptions {
    std::vector<int> hidden_dims{24};
    Activation hidden_activation = Activation::Sigmoid;
    ScgOptions scg{};
    std::uint64_t seed = 0;
};

struct ClassifierTraining {
    MlpModel model;
    std::vector<double> loss_trace;
    std::size_t iterations = 0;
};

ClassifierTraining train_classifier(const FeatureSet& data, const ClassifierOptions& options);

/// Argmax of the logits per feature; ties go to the lowest class index.
std::vector<int> classify_features(const MlpModel& model, const FeatureSet& features);

/// One label per non-overlapping 2x2 block of the scene.
ClassMap classify_scene(const MlpModel& model, const MultispectralScene& scene);

struct ConfusionMatrix {
    int classes = 0;
    std::vector<std::size_t> counts;  ///< rows = true class, columns = predicted

    std::size_t at(int truth, int predicted) const {
        return counts[static_cast<std::size_t>(truth) * classes + predicted];
    }
    std::size_t total() const;
    std::size_t row_sum(int truth) const;
    /// Fraction of class-c samples predicted as c; NaN when c never occurs.
    double recall(int c) const;
};

struct EvaluationReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
};

EvaluationReport evaluate(std::span<const int> predictions, std::span<const int> truth, int classes);

}  // namespace srnet
