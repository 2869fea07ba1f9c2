#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <ranges>
#include <span>
#include <string>
#include <vector>

namespace srnet {

class Xoshiro256;

/// Channel-major feature maps: values[(c * height + y) * width + x].
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;

    Tensor3() = default;
    Tensor3(int c, int h, int w, double fill = 0.0);

    double& at(int c, int y, int x) { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    double at(int c, int y, int x) const { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
    bool same_shape(const Tensor3& other) const {
        return channels == other.channels && height == other.height && width == other.width;
    }
};

enum class Activation { Linear, Relu, Sigmoid };
enum class Padding { SameReplicate, Valid };

const char* to_string(Activation act);
Activation activation_from_string(const std::string& name);
const char* to_string(Padding padding);
Padding padding_from_string(const std::string& name);

/// Square cross-correlation kernel; weights laid out [out][in][ky][kx].
struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    int kernel_size = 1;
    std::vector<double> weights;
    std::vector<double> biases;

    ConvLayer() = default;
    ConvLayer(int in, int out, int k);

    int radius() const { return kernel_size / 2; }
    double& weight(int o, int i, int ky, int kx) {
        return weights[((static_cast<std::size_t>(o) * in_channels + i) * kernel_size + ky) * kernel_size + kx];
    }
    double weight(int o, int i, int ky, int kx) const {
        return weights[((static_cast<std::size_t>(o) * in_channels + i) * kernel_size + ky) * kernel_size + kx];
    }
    std::size_t fan_in() const { return static_cast<std::size_t>(in_channels) * kernel_size * kernel_size; }
};

void check_layer(const ConvLayer& layer);

/// Fully connected layer; weights laid out [out][in].
struct DenseLayer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    DenseLayer() = default;
    DenseLayer(int in, int out);

    double& weight(int o, int i) { return weights[static_cast<std::size_t>(o) * in_dim + i]; }
    double weight(int o, int i) const { return weights[static_cast<std::size_t>(o) * in_dim + i]; }
    std::size_t fan_in() const { return static_cast<std::size_t>(in_dim); }
};

void check_layer(const DenseLayer& layer);

/// Zero-mean Gaussian weights with std 1/sqrt(fan_in), zero biases.
void init_gaussian(ConvLayer& layer, Xoshiro256& rng);
void init_gaussian(DenseLayer& layer, Xoshiro256& rng);

// --- activations ------------------------------------------------------------

double activate(Activation act, double z);
/// Derivative expressed through the activation's output value.
double activate_grad_from_output(Activation act, double out);
void apply_activation(Activation act, std::span<double> values);
/// upstream *= f'(z) in place, with f' computed from the stored outputs.
void backprop_activation(Activation act, std::span<const double> outputs, std::span<double> upstream);

// --- convolution ------------------------------------------------------------

/// Replicates edge samples `pad` pixels on every side of each channel.
Tensor3 pad_replicate(const Tensor3& input, int pad);

/// Cross-correlation plus bias. SameReplicate keeps the spatial size;
/// Valid shrinks each side by the kernel radius.
Tensor3 conv2d_forward(const Tensor3& input, const ConvLayer& layer, Padding padding);

struct ConvGrads {
    Tensor3 input_grad;
    std::vector<double> weight_grad;
    std::vector<double> bias_grad;
};

ConvGrads conv2d_backward(const Tensor3& input, const ConvLayer& layer, const Tensor3& upstream_grad,
                          Padding padding);

/// Same-replicate convolution evaluated only over an output window of a
/// larger image. `source` holds the image rows/cols [src_y0, src_y0 + source.height)
/// x [src_x0, ...); it must contain every edge-clamped coordinate the window
/// reads. Results are bit-identical to the matching region of conv2d_forward
/// on the whole image.
Tensor3 conv2d_window(const Tensor3& source, int src_y0, int src_x0, int image_h, int image_w,
                      const ConvLayer& layer, int out_y0, int out_x0, int out_h, int out_w);

// --- dense ------------------------------------------------------------------

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer, Activation activation);

struct DenseGrads {
    std::vector<double> input_grad;
    std::vector<double> weight_grad;
    std::vector<double> bias_grad;
};

/// `output` is the activated forward result; `upstream` is dLoss/dOutput.
DenseGrads dense_backward(std::span<const double> input, const DenseLayer& layer, Activation activation,
                          std::span<const double> output, std::span<const double> upstream);

// --- losses -----------------------------------------------------------------

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

std::vector<double> softmax(std::span<const double> logits);
LossGrad softmax_cross_entropy(std::span<const double> logits, int label);

struct TensorLoss {
    double loss = 0.0;
    Tensor3 grad;
};

TensorLoss mse_loss(const Tensor3& prediction, const Tensor3& target);

// --- flat parameters --------------------------------------------------------

/// All trainable scalars of a model: layers in order, each layer's weights
/// (row-major) followed by its biases.
using ParamVector = std::vector<double>;

template <std::ranges::range Layers>
std::size_t param_count(const Layers& layers) {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
}

template <std::ranges::range Layers>
ParamVector pack_params(const Layers& layers) {
    ParamVector out;
    out.reserve(param_count(layers));
    for (const auto& l : layers) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.biases.begin(), l.biases.end());
    }
    return out;
}

[[noreturn]] void throw_param_length(std::size_t got, std::size_t expected);

/// Writes params into the already-shaped layers. Throws on length mismatch.
template <std::ranges::range Layers>
void unpack_params(std::span<const double> params, Layers& layers) {
    const std::size_t expected = param_count(layers);
    if (params.size() != expected) throw_param_length(params.size(), expected);
    auto it = params.begin();
    for (auto& l : layers) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(l.weights.size()), l.weights.begin());
        it += static_cast<std::ptrdiff_t>(l.weights.size());
        std::copy(it, it + static_cast<std::ptrdiff_t>(l.biases.size()), l.biases.begin());
        it += static_cast<std::ptrdiff_t>(l.biases.size());
    }
}

}  // namespace srnet
