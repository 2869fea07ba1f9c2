#include "srnet/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "srnet/error.hpp"
#include "srnet/rng.hpp"

namespace srnet {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Evaluates the objective and rejects non-finite results or wrong gradient sizes.
Evaluation checked(const Objective& objective, std::span<const double> params, std::size_t& counter) {
    Evaluation e = objective(params);
    ++counter;
    if (e.grad.size() != params.size())
        throw Error("objective gradient has length " + std::to_string(e.grad.size()) + ", expected " +
                    std::to_string(params.size()));
    if (!std::isfinite(e.loss) || !all_finite(e.grad))
        throw Error("objective returned a non-finite value at evaluation " + std::to_string(counter));
    return e;
}

}  // namespace

ScgResult scg_minimize(const Objective& objective, ParamVector init, const ScgOptions& options) {
    if (!all_finite(init)) throw Error("scg_minimize: initial parameters are not finite");
    const std::size_t n = init.size();

    ScgResult result;
    ScgState st;
    st.params = std::move(init);
    st.sigma0 = options.sigma0;
    st.lambda = options.lambda0;

    Evaluation current = checked(objective, st.params, result.evaluations);
    st.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) st.residual[i] = -current.grad[i];
    st.direction = st.residual;
    result.loss_trace.push_back(current.loss);

    double delta = 0.0;
    std::vector<double> trial(n);
    std::vector<double> old_residual(n);

    bool converged = n == 0 || max_abs(st.residual) <= options.grad_tol;
    while (!converged && st.iteration < options.max_iter) {
        ++st.iteration;
        const double p_sq = dot(st.direction, st.direction);
        if (p_sq == 0.0) break;

        // Second-order information along the direction.
        if (st.success) {
            const double sigma = st.sigma0 / std::sqrt(p_sq);
            for (std::size_t i = 0; i < n; ++i) trial[i] = st.params[i] + sigma * st.direction[i];
            if (!all_finite(trial)) throw Error("scg_minimize: probe point is not finite");
            const Evaluation probe = checked(objective, trial, result.evaluations);
            delta = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                delta += st.direction[i] * (probe.grad[i] + st.residual[i]) / sigma;
        }

        // Scale, and make the Hessian estimate positive definite if needed.
        delta += (st.lambda - st.lambda_bar) * p_sq;
        if (delta <= 0.0) {
            st.lambda_bar = 2.0 * (st.lambda - delta / p_sq);
            delta = -delta + st.lambda * p_sq;
            st.lambda = st.lambda_bar;
        }

        const double mu = dot(st.direction, st.residual);
        if (!(mu > 0.0)) {
            // Not a descent direction: restart along steepest descent.
            st.direction = st.residual;
            st.success = true;
            result.loss_trace.push_back(current.loss);
            continue;
        }
        const double alpha = mu / delta;
        for (std::size_t i = 0; i < n; ++i) trial[i] = st.params[i] + alpha * st.direction[i];

        double comparison = -1.0;
        Evaluation next;
        if (all_finite(trial)) {
            next = checked(objective, trial, result.evaluations);
            double decrease = current.loss - next.loss;
            // Close to a minimum the loss difference is lost in rounding and
            // the comparison turns into noise, which rejects good steps and
            // inflates lambda. The trapezoid rule on the directional
            // derivatives (exact on quadratics) estimates the decrease instead.
            const double resolution = 64.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(std::abs(current.loss), std::abs(next.loss));
            if (std::abs(decrease) <= resolution) {
                double slope_sum = 0.0;
                for (std::size_t i = 0; i < n; ++i) slope_sum += st.direction[i] * (st.residual[i] - next.grad[i]);
                decrease = 0.5 * alpha * slope_sum;
            }
            comparison = 2.0 * delta * decrease / (mu * mu);
        }

        if (comparison >= 0.0) {
            st.params = trial;
            old_residual = st.residual;
            for (std::size_t i = 0; i < n; ++i) st.residual[i] = -next.grad[i];
            current = std::move(next);
            st.lambda_bar = 0.0;
            st.success = true;
            if (st.iteration % n == 0) {
                st.direction = st.residual;
            } else {
                const double beta = (dot(st.residual, st.residual) - dot(st.residual, old_residual)) / mu;
                for (std::size_t i = 0; i < n; ++i) st.direction[i] = st.residual[i] + beta * st.direction[i];
            }
            if (comparison >= 0.75) st.lambda *= 0.25;
        } else {
            st.lambda_bar = st.lambda;
            st.success = false;
        }
        if (comparison < 0.25) st.lambda += delta * (1.0 - comparison) / p_sq;

        result.loss_trace.push_back(current.loss);
        converged = max_abs(st.residual) <= options.grad_tol;
    }

    result.params = std::move(st.params);
    result.iterations = st.iteration;
    result.converged = converged;
    result.final_loss = current.loss;
    result.final_grad = std::move(current.grad);
    return result;
}

void check_sgd_config(const SgdConfig& config) {
    if (!(config.learning_rate > 0.0)) throw Error("SGD learning rate must be positive");
    if (config.batch_size < 1) throw Error("SGD batch size must be at least 1");
    if (config.epochs < 1) throw Error("SGD needs at least one epoch");
}

SgdResult sgd_train(const BatchObjective& objective, ParamVector init, const SgdConfig& config,
                    std::size_t dataset_size) {
    check_sgd_config(config);
    if (dataset_size == 0) throw Error("sgd_train needs a non-empty dataset");
    SgdResult result;
    result.params = std::move(init);
    Xoshiro256 rng(config.seed);
    std::vector<std::size_t> order(dataset_size);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double weighted = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < dataset_size; start += config.batch_size, ++batch_index) {
            const std::size_t len = std::min(config.batch_size, dataset_size - start);
            const std::span<const std::size_t> batch(order.data() + start, len);
            const Evaluation e = objective(result.params, batch);
            if (!std::isfinite(e.loss) || !all_finite(e.grad))
                throw Error("non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_index));
            if (e.grad.size() != result.params.size()) throw Error("batch gradient length mismatch");
            for (std::size_t i = 0; i < result.params.size(); ++i)
                result.params[i] -= config.learning_rate * e.grad[i];
            weighted += e.loss * static_cast<double>(len);
        }
        result.epoch_losses.push_back(weighted / static_cast<double>(dataset_size));
    }
    return result;
}

void write_loss_trace(std::span<const double> trace, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "iteration,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, trace[i]);
        out << buf;
    }
}

}  // namespace srnet
