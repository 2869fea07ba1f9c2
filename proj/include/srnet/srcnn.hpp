#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "srnet/nnet.hpp"
#include "srnet/optim.hpp"
#include "srnet/raster.hpp"

namespace srnet {

/// Layer geometry of the three-layer network. Defaults: 9x9 -> 64 maps,
/// 3x3 -> 32 maps, 1x1 -> one output channel.
struct SrcnnGeometry {
    int k1 = 9;
    int n1 = 64;
    int k2 = 3;
    int n2 = 32;
    int k3 = 1;
    std::array<Activation, 3> activations{Activation::Relu, Activation::Relu, Activation::Linear};
    Padding padding = Padding::SameReplicate;
};

struct SrcnnModel {
    std::array<ConvLayer, 3> layers;
    std::array<Activation, 3> activations{Activation::Relu, Activation::Relu, Activation::Linear};
    Padding padding = Padding::SameReplicate;

    SrcnnGeometry geometry() const;
    /// Total shrink per side under valid padding.
    int margin() const;
};

void check_model(const SrcnnModel& model);

/// Gaussian-initialized model (std 1/sqrt(fan_in), zero biases).
SrcnnModel make_srcnn(const SrcnnGeometry& geometry, std::uint64_t seed);

/// Unclamped composition of the three layers on a single-channel tensor.
Tensor3 srcnn_forward_tensor(const SrcnnModel& model, const Tensor3& input);

/// Refines an already-upscaled raster. Same-replicate models keep the size
/// and are evaluated in row strips; valid models shrink by margin() per side.
/// Output is clamped to [0,1].
BandRaster srcnn_forward(const SrcnnModel& model, const BandRaster& upscaled_input);

struct SrPair {
    Tensor3 degraded;
    Tensor3 target;
};

struct SrPairSet {
    std::vector<SrPair> pairs;
    int patch_size = 0;
};

/// Degrades the raster (factor x factor block mean, then bicubic back up) and
/// cuts co-located patch pairs on a stride grid, shuffled by seed.
SrPairSet make_training_pairs(const BandRaster& raster, int factor, int patch_size, int stride, std::uint64_t seed);

/// Mean MSE over the selected pairs and its gradient in the model's
/// ParamVector layout. Valid models compare against the center-cropped target.
Evaluation srcnn_batch_loss(const SrcnnModel& shape, std::span<const double> params, const SrPairSet& pairs,
                            std::span<const std::size_t> batch);

struct SrcnnTraining {
    SrcnnModel model;
    std::vector<double> loss_trace;  ///< mean training MSE per epoch
};

SrcnnTraining train_srcnn(const SrPairSet& pairs, const SgdConfig& config, const SrcnnGeometry& geometry,
                          std::uint64_t init_seed);

/// Bicubic upscale by `factor`, then srcnn_forward. Valid models paste the
/// refined interior over the bicubic image so the size is preserved.
BandRaster upscale_srcnn(const SrcnnModel& model, const BandRaster& raster, int factor);

Tensor3 to_tensor(const BandRaster& raster);
BandRaster to_raster(const Tensor3& tensor, std::string band_id, bool clamp = true);

}  // namespace srnet
