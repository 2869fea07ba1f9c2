#include "srnet/srcnn.hpp"

#include <algorithm>
#include <numeric>

#include "srnet/error.hpp"
#include "srnet/interp.hpp"
#include "srnet/metrics.hpp"
#include "srnet/rng.hpp"

namespace srnet {

namespace {

constexpr int kStripRows = 32;

}  // namespace

SrcnnGeometry SrcnnModel::geometry() const {
    SrcnnGeometry g;
    g.k1 = layers[0].kernel_size;
    g.n1 = layers[0].out_channels;
    g.k2 = layers[1].kernel_size;
    g.n2 = layers[1].out_channels;
    g.k3 = layers[2].kernel_size;
    g.activations = activations;
    g.padding = padding;
    return g;
}

int SrcnnModel::margin() const { return layers[0].radius() + layers[1].radius() + layers[2].radius(); }

void check_model(const SrcnnModel& model) {
    for (const auto& layer : model.layers) check_layer(layer);
    if (model.layers[0].in_channels != 1 || model.layers[2].out_channels != 1)
        throw Error("SRCNN must map one channel to one channel");
    if (model.layers[0].out_channels != model.layers[1].in_channels ||
        model.layers[1].out_channels != model.layers[2].in_channels)
        throw Error("SRCNN layer channels do not chain");
}

SrcnnModel make_srcnn(const SrcnnGeometry& g, std::uint64_t seed) {
    SrcnnModel model;
    model.layers = {ConvLayer(1, g.n1, g.k1), ConvLayer(g.n1, g.n2, g.k2), ConvLayer(g.n2, 1, g.k3)};
    model.activations = g.activations;
    model.padding = g.padding;
    Xoshiro256 rng(seed);
    for (auto& layer : model.layers) init_gaussian(layer, rng);
    return model;
}

Tensor3 to_tensor(const BandRaster& raster) {
    Tensor3 t;
    t.channels = 1;
    t.height = raster.height;
    t.width = raster.width;
    t.values = raster.samples;
    return t;
}

BandRaster to_raster(const Tensor3& tensor, std::string band_id, bool clamp) {
    if (tensor.channels != 1) throw Error("only single-channel tensors convert to rasters");
    BandRaster out(std::move(band_id), tensor.width, tensor.height, tensor.values);
    if (clamp)
        for (double& v : out.samples) v = std::clamp(v, 0.0, 1.0);
    return out;
}

Tensor3 srcnn_forward_tensor(const SrcnnModel& model, const Tensor3& input) {
    check_model(model);
    Tensor3 x = input;
    for (std::size_t l = 0; l < 3; ++l) {
        x = conv2d_forward(x, model.layers[l], model.padding);
        apply_activation(model.activations[l], x.values);
    }
    return x;
}

BandRaster srcnn_forward(const SrcnnModel& model, const BandRaster& input) {
    check_model(model);
    if (model.padding == Padding::Valid) {
        if (input.width <= 2 * model.margin() || input.height <= 2 * model.margin())
            throw Error("input smaller than the SRCNN receptive field");
        return to_raster(srcnn_forward_tensor(model, to_tensor(input)), input.band_id);
    }

    // Row strips: each layer is evaluated over the rows (edge-clamped) that
    // the next layer reads, so results match a whole-image pass exactly.
    const int H = input.height;
    const int W = input.width;
    const Tensor3 source = to_tensor(input);
    BandRaster out(input.band_id, W, H);
    const int r2 = model.layers[1].radius();
    const int r3 = model.layers[2].radius();
    for (int y0 = 0; y0 < H; y0 += kStripRows) {
        const int y1 = std::min(H, y0 + kStripRows);
        const int l2_lo = std::max(0, y0 - r3);
        const int l2_hi = std::min(H, y1 + r3);
        const int l1_lo = std::max(0, l2_lo - r2);
        const int l1_hi = std::min(H, l2_hi + r2);

        Tensor3 a1 = conv2d_window(source, 0, 0, H, W, model.layers[0], l1_lo, 0, l1_hi - l1_lo, W);
        apply_activation(model.activations[0], a1.values);
        Tensor3 a2 = conv2d_window(a1, l1_lo, 0, H, W, model.layers[1], l2_lo, 0, l2_hi - l2_lo, W);
        apply_activation(model.activations[1], a2.values);
        Tensor3 a3 = conv2d_window(a2, l2_lo, 0, H, W, model.layers[2], y0, 0, y1 - y0, W);
        apply_activation(model.activations[2], a3.values);
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < W; ++x) out.at(x, y) = std::clamp(a3.at(0, y - y0, x), 0.0, 1.0);
    }
    return out;
}

SrPairSet make_training_pairs(const BandRaster& raster, int factor, int patch_size, int stride, std::uint64_t seed) {
    if (factor < 1) throw Error("degradation factor must be >= 1");
    if (patch_size < 1 || stride < 1) throw Error("patch size and stride must be positive");
    const int w = raster.width / factor * factor;
    const int h = raster.height / factor * factor;
    if (w < patch_size || h < patch_size)
        throw Error("raster " + std::to_string(raster.width) + "x" + std::to_string(raster.height) +
                    " too small for " + std::to_string(patch_size) + "-pixel patches at factor " +
                    std::to_string(factor));
    const BandRaster degraded = upscale_bicubic(downsample_block_mean(raster, factor), factor);

    SrPairSet set;
    set.patch_size = patch_size;
    for (int y = 0; y + patch_size <= h; y += stride)
        for (int x = 0; x + patch_size <= w; x += stride) {
            SrPair pair{Tensor3(1, patch_size, patch_size), Tensor3(1, patch_size, patch_size)};
            for (int dy = 0; dy < patch_size; ++dy)
                for (int dx = 0; dx < patch_size; ++dx) {
                    pair.degraded.at(0, dy, dx) = degraded.at(x + dx, y + dy);
                    pair.target.at(0, dy, dx) = raster.at(x + dx, y + dy);
                }
            set.pairs.push_back(std::move(pair));
        }
    Xoshiro256 rng(seed);
    std::shuffle(set.pairs.begin(), set.pairs.end(), rng);
    return set;
}

namespace {

Tensor3 center_crop(const Tensor3& t, int margin) {
    if (margin == 0) return t;
    Tensor3 out(t.channels, t.height - 2 * margin, t.width - 2 * margin);
    for (int c = 0; c < t.channels; ++c)
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x) out.at(c, y, x) = t.at(c, y + margin, x + margin);
    return out;
}

}  // namespace

Evaluation srcnn_batch_loss(const SrcnnModel& shape, std::span<const double> params, const SrPairSet& pairs,
                            std::span<const std::size_t> batch) {
    if (batch.empty()) throw Error("empty SRCNN batch");
    SrcnnModel model = shape;
    unpack_params(params, model.layers);

    Evaluation total;
    total.grad.assign(params.size(), 0.0);
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (std::size_t index : batch) {
        const SrPair& pair = pairs.pairs.at(index);
        std::array<Tensor3, 3> acts;
        const Tensor3* x = &pair.degraded;
        for (std::size_t l = 0; l < 3; ++l) {
            acts[l] = conv2d_forward(*x, model.layers[l], model.padding);
            apply_activation(model.activations[l], acts[l].values);
            x = &acts[l];
        }
        const Tensor3 target = model.padding == Padding::Valid ? center_crop(pair.target, model.margin()) : pair.target;
        TensorLoss loss = mse_loss(acts[2], target);
        total.loss += scale * loss.loss;

        Tensor3 upstream = std::move(loss.grad);
        std::array<std::size_t, 3> offsets{};
        std::size_t off = 0;
        for (std::size_t l = 0; l < 3; ++l) {
            offsets[l] = off;
            off += model.layers[l].weights.size() + model.layers[l].biases.size();
        }
        for (std::size_t l = 3; l-- > 0;) {
            backprop_activation(model.activations[l], acts[l].values, upstream.values);
            const Tensor3& in = l == 0 ? pair.degraded : acts[l - 1];
            ConvGrads g = conv2d_backward(in, model.layers[l], upstream, model.padding);
            double* dst = total.grad.data() + offsets[l];
            for (double v : g.weight_grad) *dst++ += scale * v;
            for (double v : g.bias_grad) *dst++ += scale * v;
            upstream = std::move(g.input_grad);
        }
    }
    return total;
}

SrcnnTraining train_srcnn(const SrPairSet& pairs, const SgdConfig& config, const SrcnnGeometry& geometry,
                          std::uint64_t init_seed) {
    if (pairs.pairs.empty()) throw Error("train_srcnn needs at least one training pair");
    SrcnnTraining out;
    out.model = make_srcnn(geometry, init_seed);
    const SrcnnModel shape = out.model;
    auto objective = [&](std::span<const double> params, std::span<const std::size_t> batch) {
        return srcnn_batch_loss(shape, params, pairs, batch);
    };
    SgdResult trained;
    try {
        trained = sgd_train(objective, pack_params(out.model.layers), config, pairs.pairs.size());
    } catch (const Error& e) {
        throw Error(std::string("SRCNN training diverged: ") + e.what());
    }
    unpack_params(trained.params, out.model.layers);
    out.loss_trace = std::move(trained.epoch_losses);
    return out;
}

BandRaster upscale_srcnn(const SrcnnModel& model, const BandRaster& raster, int factor) {
    BandRaster base = upscale_bicubic(raster, factor);
    if (model.padding == Padding::SameReplicate) return srcnn_forward(model, base);
    const BandRaster refined = srcnn_forward(model, base);
    const int m = model.margin();
    for (int y = 0; y < refined.height; ++y)
        for (int x = 0; x < refined.width; ++x) base.at(x + m, y + m) = refined.at(x, y);
    return base;
}

}  // namespace srnet
