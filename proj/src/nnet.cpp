#include "srnet/nnet.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "srnet/error.hpp"
#include "srnet/rng.hpp"

namespace srnet {

Tensor3::Tensor3(int c, int h, int w, double fill) : channels(c), height(h), width(w) {
    if (c < 1 || h < 1 || w < 1) throw Error("tensor extents must be positive");
    values.assign(static_cast<std::size_t>(c) * h * w, fill);
}

const char* to_string(Activation act) {
    switch (act) {
        case Activation::Linear: return "linear";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

Activation activation_from_string(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "relu") return Activation::Relu;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw Error("unknown activation '" + name + "'");
}

const char* to_string(Padding padding) { return padding == Padding::SameReplicate ? "same_replicate" : "valid"; }

Padding padding_from_string(const std::string& name) {
    if (name == "same_replicate") return Padding::SameReplicate;
    if (name == "valid") return Padding::Valid;
    throw Error("unknown padding '" + name + "'");
}

ConvLayer::ConvLayer(int in, int out, int k) : in_channels(in), out_channels(out), kernel_size(k) {
    weights.assign(static_cast<std::size_t>(out) * in * k * k, 0.0);
    biases.assign(static_cast<std::size_t>(out), 0.0);
    check_layer(*this);
}

void check_layer(const ConvLayer& layer) {
    if (layer.in_channels < 1 || layer.out_channels < 1) throw Error("conv layer channel counts must be positive");
    if (layer.kernel_size < 1 || layer.kernel_size % 2 == 0)
        throw Error("conv kernel size must be odd, got " + std::to_string(layer.kernel_size));
    if (layer.weights.size() != static_cast<std::size_t>(layer.out_channels) * layer.fan_in())
        throw Error("conv weight count does not match geometry");
    if (layer.biases.size() != static_cast<std::size_t>(layer.out_channels))
        throw Error("conv bias count does not match geometry");
}

DenseLayer::DenseLayer(int in, int out) : in_dim(in), out_dim(out) {
    weights.assign(static_cast<std::size_t>(out) * in, 0.0);
    biases.assign(static_cast<std::size_t>(out), 0.0);
    check_layer(*this);
}

void check_layer(const DenseLayer& layer) {
    if (layer.in_dim < 1 || layer.out_dim < 1) throw Error("dense layer dimensions must be positive");
    if (layer.weights.size() != static_cast<std::size_t>(layer.out_dim) * layer.in_dim)
        throw Error("dense weight count does not match geometry");
    if (layer.biases.size() != static_cast<std::size_t>(layer.out_dim))
        throw Error("dense bias count does not match geometry");
}

namespace {

template <typename Layer>
void init_layer(Layer& layer, Xoshiro256& rng) {
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(layer.fan_in())));
    for (double& w : layer.weights) w = dist(rng);
    std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
}

}  // namespace

void init_gaussian(ConvLayer& layer, Xoshiro256& rng) { init_layer(layer, rng); }
void init_gaussian(DenseLayer& layer, Xoshiro256& rng) { init_layer(layer, rng); }

double activate(Activation act, double z) {
    switch (act) {
        case Activation::Linear: return z;
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

double activate_grad_from_output(Activation act, double out) {
    switch (act) {
        case Activation::Linear: return 1.0;
        case Activation::Relu: return out > 0.0 ? 1.0 : 0.0;
        case Activation::Sigmoid: return out * (1.0 - out);
    }
    return 1.0;
}

void apply_activation(Activation act, std::span<double> values) {
    if (act == Activation::Linear) return;
    for (double& v : values) v = activate(act, v);
}

void backprop_activation(Activation act, std::span<const double> outputs, std::span<double> upstream) {
    if (act == Activation::Linear) return;
    for (std::size_t i = 0; i < upstream.size(); ++i) upstream[i] *= activate_grad_from_output(act, outputs[i]);
}

// --- convolution ------------------------------------------------------------

namespace {

void check_input(const Tensor3& input, const ConvLayer& layer) {
    check_layer(layer);
    if (input.channels != layer.in_channels)
        throw Error("conv input has " + std::to_string(input.channels) + " channels, layer expects " +
                    std::to_string(layer.in_channels));
}

// Valid cross-correlation of an already padded input. Per output pixel the
// accumulation order is bias, then (channel, ky, kx) lexicographic.
Tensor3 correlate_valid(const Tensor3& in, const ConvLayer& layer) {
    const int k = layer.kernel_size;
    const int out_h = in.height - k + 1;
    const int out_w = in.width - k + 1;
    if (out_h < 1 || out_w < 1) throw Error("input smaller than the convolution kernel");
    Tensor3 out(layer.out_channels, out_h, out_w);
    for (int o = 0; o < layer.out_channels; ++o) {
        double* dst_plane = out.values.data() + o * out.plane();
        std::fill(dst_plane, dst_plane + out.plane(), layer.biases[static_cast<std::size_t>(o)]);
        for (int c = 0; c < layer.in_channels; ++c) {
            const double* src_plane = in.values.data() + c * in.plane();
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    const double w = layer.weight(o, c, ky, kx);
                    for (int y = 0; y < out_h; ++y) {
                        const double* src = src_plane + static_cast<std::size_t>(y + ky) * in.width + kx;
                        double* dst = dst_plane + static_cast<std::size_t>(y) * out_w;
                        for (int x = 0; x < out_w; ++x) dst[x] += w * src[x];
                    }
                }
        }
    }
    return out;
}

}  // namespace

Tensor3 pad_replicate(const Tensor3& input, int pad) {
    if (pad == 0) return input;
    Tensor3 out(input.channels, input.height + 2 * pad, input.width + 2 * pad);
    for (int c = 0; c < input.channels; ++c)
        for (int y = 0; y < out.height; ++y) {
            const int sy = std::clamp(y - pad, 0, input.height - 1);
            for (int x = 0; x < out.width; ++x) out.at(c, y, x) = input.at(c, sy, std::clamp(x - pad, 0, input.width - 1));
        }
    return out;
}

Tensor3 conv2d_forward(const Tensor3& input, const ConvLayer& layer, Padding padding) {
    check_input(input, layer);
    if (padding == Padding::SameReplicate) return correlate_valid(pad_replicate(input, layer.radius()), layer);
    return correlate_valid(input, layer);
}

ConvGrads conv2d_backward(const Tensor3& input, const ConvLayer& layer, const Tensor3& upstream, Padding padding) {
    check_input(input, layer);
    const int k = layer.kernel_size;
    const int r = layer.radius();
    const Tensor3 padded = padding == Padding::SameReplicate ? pad_replicate(input, r) : input;
    const int out_h = padded.height - k + 1;
    const int out_w = padded.width - k + 1;
    if (upstream.channels != layer.out_channels || upstream.height != out_h || upstream.width != out_w)
        throw Error("upstream gradient shape does not match the convolution output");

    ConvGrads g;
    g.weight_grad.assign(layer.weights.size(), 0.0);
    g.bias_grad.assign(layer.biases.size(), 0.0);
    Tensor3 padded_grad(padded.channels, padded.height, padded.width);
    for (int o = 0; o < layer.out_channels; ++o) {
        const double* up_plane = upstream.values.data() + o * upstream.plane();
        g.bias_grad[static_cast<std::size_t>(o)] = std::accumulate(up_plane, up_plane + upstream.plane(), 0.0);
        for (int c = 0; c < layer.in_channels; ++c) {
            const double* src_plane = padded.values.data() + c * padded.plane();
            double* gin_plane = padded_grad.values.data() + c * padded_grad.plane();
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    const double w = layer.weight(o, c, ky, kx);
                    double acc = 0.0;
                    for (int y = 0; y < out_h; ++y) {
                        const std::size_t off = static_cast<std::size_t>(y + ky) * padded.width + kx;
                        const double* src = src_plane + off;
                        double* gin = gin_plane + off;
                        const double* up = up_plane + static_cast<std::size_t>(y) * out_w;
                        for (int x = 0; x < out_w; ++x) {
                            acc += up[x] * src[x];
                            gin[x] += w * up[x];
                        }
                    }
                    g.weight_grad[((static_cast<std::size_t>(o) * layer.in_channels + c) * k + ky) * k + kx] = acc;
                }
        }
    }

    if (padding == Padding::Valid || r == 0) {
        g.input_grad = std::move(padded_grad);
        return g;
    }
    // Fold gradients of replicated border samples back onto their sources.
    g.input_grad = Tensor3(input.channels, input.height, input.width);
    for (int c = 0; c < input.channels; ++c)
        for (int y = 0; y < padded.height; ++y) {
            const int sy = std::clamp(y - r, 0, input.height - 1);
            for (int x = 0; x < padded.width; ++x)
                g.input_grad.at(c, sy, std::clamp(x - r, 0, input.width - 1)) += padded_grad.at(c, y, x);
        }
    return g;
}

Tensor3 conv2d_window(const Tensor3& source, int src_y0, int src_x0, int image_h, int image_w, const ConvLayer& layer,
                      int out_y0, int out_x0, int out_h, int out_w) {
    check_input(source, layer);
    const int r = layer.radius();
    Tensor3 gathered(source.channels, out_h + 2 * r, out_w + 2 * r);
    std::vector<int> col(static_cast<std::size_t>(gathered.width));
    for (int x = 0; x < gathered.width; ++x) {
        col[static_cast<std::size_t>(x)] = std::clamp(out_x0 - r + x, 0, image_w - 1) - src_x0;
        if (col[static_cast<std::size_t>(x)] < 0 || col[static_cast<std::size_t>(x)] >= source.width)
            throw Error("conv window reads outside the supplied source columns");
    }
    for (int y = 0; y < gathered.height; ++y) {
        const int sy = std::clamp(out_y0 - r + y, 0, image_h - 1) - src_y0;
        if (sy < 0 || sy >= source.height) throw Error("conv window reads outside the supplied source rows");
        for (int c = 0; c < source.channels; ++c)
            for (int x = 0; x < gathered.width; ++x)
                gathered.at(c, y, x) = source.at(c, sy, col[static_cast<std::size_t>(x)]);
    }
    return correlate_valid(gathered, layer);
}

// --- dense ------------------------------------------------------------------

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer, Activation activation) {
    if (input.size() != static_cast<std::size_t>(layer.in_dim))
        throw Error("dense input has dimension " + std::to_string(input.size()) + ", layer expects " +
                    std::to_string(layer.in_dim));
    std::vector<double> out(static_cast<std::size_t>(layer.out_dim));
    for (int o = 0; o < layer.out_dim; ++o) {
        const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in_dim;
        double z = layer.biases[static_cast<std::size_t>(o)];
        for (int i = 0; i < layer.in_dim; ++i) z += row[i] * input[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(o)] = activate(activation, z);
    }
    return out;
}

DenseGrads dense_backward(std::span<const double> input, const DenseLayer& layer, Activation activation,
                          std::span<const double> output, std::span<const double> upstream) {
    if (input.size() != static_cast<std::size_t>(layer.in_dim) ||
        output.size() != static_cast<std::size_t>(layer.out_dim) || upstream.size() != output.size())
        throw Error("dense backward shape mismatch");
    DenseGrads g;
    g.input_grad.assign(static_cast<std::size_t>(layer.in_dim), 0.0);
    g.weight_grad.assign(layer.weights.size(), 0.0);
    g.bias_grad.assign(upstream.begin(), upstream.end());
    backprop_activation(activation, output, g.bias_grad);
    for (int o = 0; o < layer.out_dim; ++o) {
        const double d = g.bias_grad[static_cast<std::size_t>(o)];
        const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in_dim;
        double* grow = g.weight_grad.data() + static_cast<std::size_t>(o) * layer.in_dim;
        for (int i = 0; i < layer.in_dim; ++i) {
            grow[i] = d * input[static_cast<std::size_t>(i)];
            g.input_grad[static_cast<std::size_t>(i)] += d * row[i];
        }
    }
    return g;
}

// --- losses -----------------------------------------------------------------

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) throw Error("softmax of an empty vector");
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - peak);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

LossGrad softmax_cross_entropy(std::span<const double> logits, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size())
        throw Error("label " + std::to_string(label) + " out of range for " + std::to_string(logits.size()) +
                    " logits");
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double z : logits) total += std::exp(z - peak);
    const double log_sum = peak + std::log(total);
    LossGrad out;
    out.loss = log_sum - logits[static_cast<std::size_t>(label)];
    out.grad.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) out.grad[i] = std::exp(logits[i] - log_sum);
    out.grad[static_cast<std::size_t>(label)] -= 1.0;
    return out;
}

TensorLoss mse_loss(const Tensor3& prediction, const Tensor3& target) {
    if (!prediction.same_shape(target)) throw Error("mse_loss shape mismatch");
    const double n = static_cast<double>(prediction.values.size());
    TensorLoss out;
    out.grad = Tensor3(prediction.channels, prediction.height, prediction.width);
    for (std::size_t i = 0; i < prediction.values.size(); ++i) {
        const double d = prediction.values[i] - target.values[i];
        out.loss += d * d;
        out.grad.values[i] = 2.0 * d / n;
    }
    out.loss /= n;
    return out;
}

void throw_param_length(std::size_t got, std::size_t expected) {
    throw Error("parameter vector has length " + std::to_string(got) + ", model expects " +
                std::to_string(expected));
}

}  // namespace srnet
