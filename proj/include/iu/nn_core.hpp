#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "iu/errors.hpp"
#include "iu/rng.hpp"

namespace iu::nn {

enum class Activation { Tanh, Linear };

struct LayerSpec {
    int in_dim = 0;
    int out_dim = 0;
    Activation act = Activation::Tanh;
};

struct LayerParams {
    Eigen::MatrixXd W;  // out x in
    Eigen::VectorXd b;  // out
};

// Parameters of one dense network together with gradient accumulators and
// Adam moment state. Mutated by a single thread at a time; forward passes on
// snapshots are safe.
struct ParamStore {
    std::vector<LayerParams> layers;
    std::vector<LayerParams> grads;
    std::vector<LayerParams> adam_m;
    std::vector<LayerParams> adam_v;
    std::int64_t adam_t = 0;

    // Bumped on every mutation; forward caches record it so a backward pass
    // against since-updated parameters is rejected.
    std::uint64_t revision = 0;

    std::size_t parameter_count() const;
};

// Weight init: uniform +-1/sqrt(fan_in) per layer; when final_init_range is
// set, the last layer (weights and bias) is drawn from +-final_init_range
// instead.
ParamStore make_params(const std::vector<LayerSpec>& spec, RandomStream& rng,
                       std::optional<double> final_init_range = std::nullopt);

void check_spec_chain(const std::vector<LayerSpec>& spec);

// Activations recorded by a forward pass, sufficient for an exact backward
// pass. acts[0] is the input; acts[l] the post-activation output of layer l.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> acts;
    std::uint64_t revision = 0;
};

// Batched forward: input is in_dim x batch, one column per sample.
Eigen::MatrixXd mlp_forward(const ParamStore& params, const std::vector<LayerSpec>& spec,
                            const Eigen::MatrixXd& input, ForwardCache* cache = nullptr);

// Reverse mode for <output_grad, output> (Frobenius inner product over the
// batch). Accumulates into params.grads unless accumulate_param_grads is
// false; returns the gradient with respect to the input.
Eigen::MatrixXd mlp_backward(ParamStore& params, const std::vector<LayerSpec>& spec,
                             const ForwardCache& cache, const Eigen::MatrixXd& output_grad,
                             bool accumulate_param_grads = true);

void zero_grads(ParamStore& params);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One Adam step with bias correction; grads are cleared afterwards.
// Non-finite gradients abort the step before any parameter is touched.
void adam_step(ParamStore& params, double lr, const AdamConfig& cfg = {});

// target <- (1 - tau) * target + tau * online, elementwise.
void blend_targets(ParamStore& target, const ParamStore& online, double tau);

// Convenience bundle: a spec plus its parameters.
struct Mlp {
    std::vector<LayerSpec> spec;
    ParamStore params;

    static Mlp create(const std::vector<LayerSpec>& spec, RandomStream& rng,
                      std::optional<double> final_init_range = std::nullopt);

    Eigen::MatrixXd forward(const Eigen::MatrixXd& input, ForwardCache* cache = nullptr) const {
        return mlp_forward(params, spec, input, cache);
    }
    Eigen::VectorXd forward_vec(const Eigen::VectorXd& input) const;
    Eigen::MatrixXd backward(const ForwardCache& cache, const Eigen::MatrixXd& output_grad,
                             bool accumulate_param_grads = true) {
        return mlp_backward(params, spec, cache, output_grad, accumulate_param_grads);
    }

    int in_dim() const { return spec.front().in_dim; }
    int out_dim() const { return spec.back().out_dim; }
};

}  // namespace iu::nn
