#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "srnet/nnet.hpp"

namespace srnet {

/// Objective value and gradient at a parameter vector.
struct Evaluation {
    double loss = 0.0;
    std::vector<double> grad;
};

using Objective = std::function<Evaluation(std::span<const double> params)>;

struct ScgOptions {
    std::size_t max_iter = 500;
    double grad_tol = 1e-6;  ///< stop when the max-norm of the gradient falls to this
    double sigma0 = 1e-4;
    double lambda0 = 1e-6;
};

/// Internal state of Moller's scaled conjugate gradient between iterations.
struct ScgState {
    ParamVector params;
    double sigma0 = 1e-4;
    double lambda = 1e-6;
    double lambda_bar = 0.0;
    std::vector<double> direction;
    std::vector<double> residual;  ///< negative gradient at params
    bool success = true;
    std::size_t iteration = 0;
};

struct ScgResult {
    ParamVector params;
    std::vector<double> loss_trace;  ///< accepted loss after each iteration, starting with the initial loss
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    double final_loss = 0.0;
    std::vector<double> final_grad;
};

/// Full-batch scaled conjugate gradient. Curvature along the search direction
/// comes from a finite difference of gradients; a Levenberg-Marquardt scale
/// lambda guards against non-positive curvature and poor quadratic fits.
/// Throws srnet::Error if the objective returns a non-finite value.
ScgResult scg_minimize(const Objective& objective, ParamVector init, const ScgOptions& options = {});

struct SgdConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 16;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
};

void check_sgd_config(const SgdConfig& config);

/// Loss and gradient averaged over the given sample indices.
using BatchObjective = std::function<Evaluation(std::span<const double> params, std::span<const std::size_t> batch)>;

struct SgdResult {
    ParamVector params;
    std::vector<double> epoch_losses;  ///< sample-weighted mean batch loss per epoch
};

/// Mini-batch SGD over a seeded per-epoch shuffle of [0, dataset_size).
/// Throws srnet::Error naming the epoch and batch index on a non-finite loss.
SgdResult sgd_train(const BatchObjective& objective, ParamVector init, const SgdConfig& config,
                    std::size_t dataset_size);

/// Two-column CSV: iteration,loss.
void write_loss_trace(std::span<const double> trace, const std::filesystem::path& path);

}  // namespace srnet
