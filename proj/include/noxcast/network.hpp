#pragma once

// The regression network: standardized inputs feed fully connected hidden
// layers with per-node activations (the production configuration is two
// layers of five nodes each: three TanH, one linear, one Gaussian), followed
// by a single linear output in raw response units. Exact forward evaluation,
// analytic gradients of the penalized squared-error loss, seeded
// initialization, and a JSON persistence format.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "noxcast/dataset.hpp"
#include "noxcast/io.hpp"
#include "noxcast/random.hpp"

namespace noxcast {

enum class ActivationKind { TanH, Linear, Gaussian };

inline double activate(ActivationKind kind, double u) {
    switch (kind) {
        case ActivationKind::TanH: return std::tanh(u);
        case ActivationKind::Linear: return u;
        case ActivationKind::Gaussian: return std::exp(-u * u);
    }
    throw std::logic_error("unreachable activation kind");
}

// Derivative with respect to the pre-activation u.
inline double activate_derivative(ActivationKind kind, double u) {
    switch (kind) {
        case ActivationKind::TanH: {
            const double t = std::tanh(u);
            return 1.0 - t * t;
        }
        case ActivationKind::Linear: return 1.0;
        case ActivationKind::Gaussian: return -2.0 * u * std::exp(-u * u);
    }
    throw std::logic_error("unreachable activation kind");
}

inline std::string activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::TanH: return "tanh";
        case ActivationKind::Linear: return "linear";
        case ActivationKind::Gaussian: return "gaussian";
    }
    throw std::logic_error("unreachable activation kind");
}

inline ActivationKind activation_from_name(const std::string& name) {
    if (name == "tanh") return ActivationKind::TanH;
    if (name == "linear") return ActivationKind::Linear;
    if (name == "gaussian") return ActivationKind::Gaussian;
    throw std::runtime_error("unknown activation: " + name);
}

struct LayerSpec {
    std::vector<ActivationKind> activations;

    std::size_t size() const { return activations.size(); }

    // Three TanH, one linear, one Gaussian — the production hidden layer.
    static LayerSpec mixed_five() {
        return {{ActivationKind::TanH, ActivationKind::TanH, ActivationKind::TanH,
                 ActivationKind::Linear, ActivationKind::Gaussian}};
    }
};

struct Layer {
    std::vector<std::vector<double>> weights;  // [node][input]
    std::vector<double> bias;                  // [node]
    std::vector<ActivationKind> activations;   // [node]

    std::size_t size() const { return bias.size(); }
};

// Per-layer pre-activations and outputs from one forward pass; consumed by
// the backward pass.
struct ForwardTrace {
    std::vector<double> standardized_input;
    std::vector<std::vector<double>> pre;   // [layer][node]
    std::vector<std::vector<double>> post;  // [layer][node]
    double prediction = 0.0;
};

struct Network {
    std::size_t input_dim = 0;
    std::vector<Layer> hidden;
    std::vector<double> output_weights;
    double output_bias = 0.0;
    Standardizer standardizer;
    std::uint64_t seed = 0;
    std::string config_digest;

    void validate() const {
        if (input_dim == 0) throw std::runtime_error("network: input_dim must be positive");
        std::size_t prev = input_dim;
        for (const auto& layer : hidden) {
            if (layer.weights.size() != layer.bias.size() ||
                layer.weights.size() != layer.activations.size() || layer.weights.empty())
                throw std::runtime_error("network: inconsistent layer shape");
            for (const auto& row : layer.weights) {
                if (row.size() != prev) throw std::runtime_error("network: weight row width mismatch");
                for (double w : row)
                    if (!std::isfinite(w)) throw std::runtime_error("network: non-finite weight");
            }
            for (double b : layer.bias)
                if (!std::isfinite(b)) throw std::runtime_error("network: non-finite bias");
            prev = layer.size();
        }
        if (output_weights.size() != prev)
            throw std::runtime_error("network: output width mismatch");
        for (double w : output_weights)
            if (!std::isfinite(w)) throw std::runtime_error("network: non-finite output weight");
        if (!std::isfinite(output_bias)) throw std::runtime_error("network: non-finite output bias");
        if (standardizer.fitted() && standardizer.dimension() != input_dim)
            throw std::runtime_error("network: standardizer dimension mismatch");
    }

    double forward(std::span<const double> x, ForwardTrace* trace = nullptr) const {
        if (x.size() != input_dim) throw std::invalid_argument("forward: input dimension mismatch");
        if (!standardizer.fitted()) throw std::logic_error("forward: standardizer not fitted");

        std::vector<double> current = standardizer.apply(x);
        if (trace) {
            trace->standardized_input = current;
            trace->pre.assign(hidden.size(), {});
            trace->post.assign(hidden.size(), {});
        }
        for (std::size_t l = 0; l < hidden.size(); ++l) {
            const Layer& layer = hidden[l];
            std::vector<double> next(layer.size());
            if (trace) trace->pre[l].resize(layer.size());
            for (std::size_t j = 0; j < layer.size(); ++j) {
                double u = layer.bias[j];
                const auto& row = layer.weights[j];
                for (std::size_t i = 0; i < row.size(); ++i) u += row[i] * current[i];
                if (trace) trace->pre[l][j] = u;
                next[j] = activate(layer.activations[j], u);
            }
            if (trace) trace->post[l] = next;
            current = std::move(next);
        }
        double y = output_bias;
        for (std::size_t j = 0; j < output_weights.size(); ++j) y += output_weights[j] * current[j];
        if (trace) trace->prediction = y;
        return y;
    }

    std::vector<double> predict_batch(std::span<const std::array<double, kNumPredictors>> xs) const {
        std::vector<double> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(forward(x));
        return out;
    }
};

struct LayerGradient {
    std::vector<std::vector<double>> weights;
    std::vector<double> bias;
};

struct Gradient {
    std::vector<LayerGradient> hidden;
    std::vector<double> output_weights;
    double output_bias = 0.0;
    double loss = 0.0;
};

// Seeded initialization: weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)]
// drawn from xoshiro256++ (see random.hpp) layer by layer, node by node,
// input by input; biases zero. Identical seed, identical network.
inline Network init_network(std::size_t input_dim, const std::vector<LayerSpec>& specs,
                            std::uint64_t seed) {
    if (specs.empty()) throw std::invalid_argument("init_network: need at least one hidden layer");
    Network net;
    net.input_dim = input_dim;
    net.seed = seed;
    Rng rng(seed);
    std::size_t fan_in = input_dim;
    for (const auto& spec : specs) {
        if (spec.size() == 0) throw std::invalid_argument("init_network: empty layer spec");
        Layer layer;
        layer.activations = spec.activations;
        layer.bias.assign(spec.size(), 0.0);
        layer.weights.resize(spec.size());
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (auto& row : layer.weights) {
            row.resize(fan_in);
            for (double& w : row) w = rng.uniform(-bound, bound);
        }
        net.hidden.push_back(std::move(layer));
        fan_in = spec.size();
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    net.output_weights.resize(fan_in);
    for (double& w : net.output_weights) w = rng.uniform(-bound, bound);
    net.output_bias = 0.0;
    return net;
}

inline Gradient zero_gradient(const Network& net) {
    Gradient g;
    g.hidden.resize(net.hidden.size());
    for (std::size_t l = 0; l < net.hidden.size(); ++l) {
        g.hidden[l].weights.resize(net.hidden[l].size());
        for (std::size_t j = 0; j < net.hidden[l].size(); ++j)
            g.hidden[l].weights[j].assign(net.hidden[l].weights[j].size(), 0.0);
        g.hidden[l].bias.assign(net.hidden[l].size(), 0.0);
    }
    g.output_weights.assign(net.output_weights.size(), 0.0);
    return g;
}

// Analytic gradient of L = 1/2 * sum (yhat - y)^2 + lambda * sum weights^2
// (biases excluded from the penalty), accumulated over the batch in record
// order.
inline Gradient gradient(const Network& net, std::span<const std::array<double, kNumPredictors>> xs,
                         std::span<const double> ys, double lambda) {
    if (xs.empty() || xs.size() != ys.size())
        throw std::invalid_argument("gradient: batch must be non-empty with matching x/y sizes");

    Gradient g = zero_gradient(net);
    ForwardTrace trace;
    std::vector<double> delta, delta_prev;
    for (std::size_t r = 0; r < xs.size(); ++r) {
        const double yhat = net.forward(xs[r], &trace);
        const double residual = yhat - ys[r];
        g.loss += 0.5 * residual * residual;

        const std::size_t last = net.hidden.size() - 1;
        const auto& h_last = trace.post[last];
        for (std::size_t j = 0; j < net.output_weights.size(); ++j)
            g.output_weights[j] += residual * h_last[j];
        g.output_bias += residual;

        // delta over the last hidden layer
        delta.resize(net.hidden[last].size());
        for (std::size_t j = 0; j < delta.size(); ++j)
            delta[j] = residual * net.output_weights[j] *
                       activate_derivative(net.hidden[last].activations[j], trace.pre[last][j]);

        for (std::size_t l = net.hidden.size(); l-- > 0;) {
            const Layer& layer = net.hidden[l];
            const std::vector<double>& inputs =
                (l == 0) ? trace.standardized_input : trace.post[l - 1];
            for (std::size_t j = 0; j < layer.size(); ++j) {
                for (std::size_t i = 0; i < inputs.size(); ++i)
                    g.hidden[l].weights[j][i] += delta[j] * inputs[i];
                g.hidden[l].bias[j] += delta[j];
            }
            if (l > 0) {
                const Layer& below = net.hidden[l - 1];
                delta_prev.assign(below.size(), 0.0);
                for (std::size_t j = 0; j < layer.size(); ++j)
                    for (std::size_t i = 0; i < below.size(); ++i)
                        delta_prev[i] += delta[j] * layer.weights[j][i];
                for (std::size_t i = 0; i < below.size(); ++i)
                    delta_prev[i] *= activate_derivative(below.activations[i], trace.pre[l - 1][i]);
                delta = delta_prev;
            }
        }
    }

    if (lambda != 0.0) {
        for (std::size_t l = 0; l < net.hidden.size(); ++l)
            for (std::size_t j = 0; j < net.hidden[l].size(); ++j)
                for (std::size_t i = 0; i < net.hidden[l].weights[j].size(); ++i) {
                    const double w = net.hidden[l].weights[j][i];
                    g.hidden[l].weights[j][i] += 2.0 * lambda * w;
                    g.loss += lambda * w * w;
                }
        for (std::size_t j = 0; j < net.output_weights.size(); ++j) {
            const double w = net.output_weights[j];
            g.output_weights[j] += 2.0 * lambda * w;
            g.loss += lambda * w * w;
        }
    }
    return g;
}

// Flat views over parameters and gradients, in one fixed order (hidden
// layers: weights row-major then biases; then output weights, output bias).
// The trainer's per-parameter state is indexed against this order.
inline std::vector<double*> parameter_pointers(Network& net) {
    std::vector<double*> ptrs;
    for (auto& layer : net.hidden) {
        for (auto& row : layer.weights)
            for (double& w : row) ptrs.push_back(&w);
        for (double& b : layer.bias) ptrs.push_back(&b);
    }
    for (double& w : net.output_weights) ptrs.push_back(&w);
    ptrs.push_back(&net.output_bias);
    return ptrs;
}

inline std::vector<const double*> gradient_pointers(const Gradient& g) {
    std::vector<const double*> ptrs;
    for (const auto& layer : g.hidden) {
        for (const auto& row : layer.weights)
            for (const double& w : row) ptrs.push_back(&w);
        for (const double& b : layer.bias) ptrs.push_back(&b);
    }
    for (const double& w : g.output_weights) ptrs.push_back(&w);
    ptrs.push_back(&g.output_bias);
    return ptrs;
}

inline constexpr int kModelSchemaVersion = 1;

inline nlohmann::json network_to_json(const Network& net) {
    net.validate();
    nlohmann::json j;
    j["format"] = "noxcast-model";
    j["schema_version"] = kModelSchemaVersion;
    j["input_dim"] = net.input_dim;
    j["seed"] = net.seed;
    j["config_digest"] = net.config_digest;
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.hidden) {
        nlohmann::json lj;
        nlohmann::json acts = nlohmann::json::array();
        for (auto a : layer.activations) acts.push_back(activation_name(a));
        lj["activations"] = acts;
        lj["weights"] = layer.weights;
        lj["bias"] = layer.bias;
        layers.push_back(lj);
    }
    j["hidden_layers"] = layers;
    j["output"] = {{"weights", net.output_weights}, {"bias", net.output_bias}};
    if (net.standardizer.fitted()) {
        j["standardizer"] = {{"fitted_on", net.standardizer.fitted_on()},
                             {"mean", net.standardizer.mean()},
                             {"stddev", net.standardizer.stddev()}};
    }
    return j;
}

inline Network network_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "noxcast-model")
        throw std::runtime_error("model file: not a noxcast model");
    if (j.value("schema_version", -1) != kModelSchemaVersion)
        throw std::runtime_error("model file: unsupported schema version");
    Network net;
    net.input_dim = j.at("input_dim").get<std::size_t>();
    net.seed = j.value("seed", std::uint64_t{0});
    net.config_digest = j.value("config_digest", "");
    for (const auto& lj : j.at("hidden_layers")) {
        Layer layer;
        for (const auto& a : lj.at("activations"))
            layer.activations.push_back(activation_from_name(a.get<std::string>()));
        layer.weights = lj.at("weights").get<std::vector<std::vector<double>>>();
        layer.bias = lj.at("bias").get<std::vector<double>>();
        net.hidden.push_back(std::move(layer));
    }
    net.output_weights = j.at("output").at("weights").get<std::vector<double>>();
    net.output_bias = j.at("output").at("bias").get<double>();
    if (j.contains("standardizer")) {
        const auto& sj = j.at("standardizer");
        net.standardizer = Standardizer(sj.at("mean").get<std::vector<double>>(),
                                        sj.at("stddev").get<std::vector<double>>(),
                                        sj.value("fitted_on", ""));
    }
    net.validate();
    return net;
}

inline void save_model(const Network& net, const std::filesystem::path& path) {
    atomic_write(path, network_to_json(net).dump(2) + "\n");
}

inline Network load_model(const std::filesystem::path& path) {
    return network_from_json(nlohmann::json::parse(read_file(path)));
}

// Identity standardizer (mean 0, std 1); used by hand-built networks.
inline Standardizer identity_standardizer(std::size_t dim, std::string fitted_on = "identity") {
    return Standardizer(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0),
                        std::move(fitted_on));
}

}  // namespace noxcast
