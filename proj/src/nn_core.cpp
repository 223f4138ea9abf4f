#include "iu/nn_core.hpp"

#include <cmath>
#include <sstream>

namespace iu::nn {

namespace {

std::string shape_str(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

LayerParams zeros_like(const LayerSpec& s) {
    return {Eigen::MatrixXd::Zero(s.out_dim, s.in_dim), Eigen::VectorXd::Zero(s.out_dim)};
}

}  // namespace

void check_spec_chain(const std::vector<LayerSpec>& spec) {
    if (spec.empty()) throw ShapeError("mlp: empty layer spec");
    for (std::size_t l = 0; l < spec.size(); ++l) {
        if (spec[l].in_dim <= 0 || spec[l].out_dim <= 0)
            throw ShapeError("mlp: layer " + std::to_string(l) + " has non-positive dims");
        if (l > 0 && spec[l].in_dim != spec[l - 1].out_dim)
            throw ShapeError("mlp: layer " + std::to_string(l) + " in_dim " +
                             std::to_string(spec[l].in_dim) + " does not chain from previous out_dim " +
                             std::to_string(spec[l - 1].out_dim));
    }
}

std::size_t ParamStore::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.W.size() + l.b.size());
    return n;
}

ParamStore make_params(const std::vector<LayerSpec>& spec, RandomStream& rng,
                       std::optional<double> final_init_range) {
    check_spec_chain(spec);
    ParamStore p;
    for (std::size_t l = 0; l < spec.size(); ++l) {
        const auto& s = spec[l];
        double range = 1.0 / std::sqrt(static_cast<double>(s.in_dim));
        if (final_init_range && l + 1 == spec.size()) range = *final_init_range;
        LayerParams lp = zeros_like(s);
        for (int j = 0; j < s.in_dim; ++j)
            for (int i = 0; i < s.out_dim; ++i) lp.W(i, j) = rng.uniform(-range, range);
        for (int i = 0; i < s.out_dim; ++i) lp.b(i) = rng.uniform(-range, range);
        p.layers.push_back(std::move(lp));
        p.grads.push_back(zeros_like(s));
        p.adam_m.push_back(zeros_like(s));
        p.adam_v.push_back(zeros_like(s));
    }
    return p;
}

Eigen::MatrixXd mlp_forward(const ParamStore& params, const std::vector<LayerSpec>& spec,
                            const Eigen::MatrixXd& input, ForwardCache* cache) {
    check_spec_chain(spec);
    if (params.layers.size() != spec.size())
        throw ShapeError("mlp_forward: param store has " + std::to_string(params.layers.size()) +
                         " layers, spec has " + std::to_string(spec.size()));
    if (input.rows() != spec.front().in_dim)
        throw ShapeError("mlp_forward: input is " + shape_str(input) + ", expected " +
                         std::to_string(spec.front().in_dim) + " rows");

    if (cache) {
        cache->acts.clear();
        cache->acts.reserve(spec.size() + 1);
        cache->acts.push_back(input);
        cache->revision = params.revision;
    }

    Eigen::MatrixXd x = input;
    for (std::size_t l = 0; l < spec.size(); ++l) {
        const auto& lp = params.layers[l];
        if (lp.W.rows() != spec[l].out_dim || lp.W.cols() != spec[l].in_dim)
            throw ShapeError("mlp_forward: layer " + std::to_string(l) + " weights are " +
                             shape_str(lp.W) + ", spec wants " + std::to_string(spec[l].out_dim) +
                             "x" + std::to_string(spec[l].in_dim));
        Eigen::MatrixXd y = (lp.W * x).colwise() + lp.b;
        if (spec[l].act == Activation::Tanh) y = y.array().tanh();
        if (cache) cache->acts.push_back(y);
        x = std::move(y);
    }
    return x;
}

Eigen::MatrixXd mlp_backward(ParamStore& params, const std::vector<LayerSpec>& spec,
                             const ForwardCache& cache, const Eigen::MatrixXd& output_grad,
                             bool accumulate_param_grads) {
    if (cache.acts.size() != spec.size() + 1)
        throw ShapeError("mlp_backward: cache does not match spec (has " +
                         std::to_string(cache.acts.size()) + " activations for " +
                         std::to_string(spec.size()) + " layers)");
    if (cache.revision != params.revision)
        throw ShapeError("mlp_backward: stale cache (parameters changed since forward)");
    if (output_grad.rows() != spec.back().out_dim || output_grad.cols() != cache.acts.back().cols())
        throw ShapeError("mlp_backward: output_grad is " + shape_str(output_grad) + ", expected " +
                         std::to_string(spec.back().out_dim) + "x" +
                         std::to_string(cache.acts.back().cols()));

    Eigen::MatrixXd g = output_grad;
    for (int l = static_cast<int>(spec.size()) - 1; l >= 0; --l) {
        // tanh'(z) from the cached post-activation y: 1 - y^2
        if (spec[l].act == Activation::Tanh) {
            const Eigen::MatrixXd& y = cache.acts[l + 1];
            g = g.array() * (1.0 - y.array().square());
        }
        if (accumulate_param_grads) {
            params.grads[l].W.noalias() += g * cache.acts[l].transpose();
            params.grads[l].b += g.rowwise().sum();
        }
        g = (params.layers[l].W.transpose() * g).eval();
    }
    return g;
}

void zero_grads(ParamStore& params) {
    for (auto& g : params.grads) {
        g.W.setZero();
        g.b.setZero();
    }
}

void adam_step(ParamStore& params, double lr, const AdamConfig& cfg) {
    for (std::size_t l = 0; l < params.grads.size(); ++l) {
        if (!params.grads[l].W.allFinite() || !params.grads[l].b.allFinite())
            throw NumericError("adam_step: non-finite gradient in layer " + std::to_string(l));
    }
    params.adam_t += 1;
    const double t = static_cast<double>(params.adam_t);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& m = params.adam_m[l];
        auto& v = params.adam_v[l];
        const auto& g = params.grads[l];
        m.W = cfg.beta1 * m.W + (1.0 - cfg.beta1) * g.W;
        m.b = cfg.beta1 * m.b + (1.0 - cfg.beta1) * g.b;
        v.W = cfg.beta2 * v.W.array() + (1.0 - cfg.beta2) * g.W.array().square();
        v.b = cfg.beta2 * v.b.array() + (1.0 - cfg.beta2) * g.b.array().square();
        params.layers[l].W.array() -= lr * (m.W.array() / bc1) / ((v.W.array() / bc2).sqrt() + cfg.eps);
        params.layers[l].b.array() -= lr * (m.b.array() / bc1) / ((v.b.array() / bc2).sqrt() + cfg.eps);
    }
    zero_grads(params);
    params.revision += 1;
}

void blend_targets(ParamStore& target, const ParamStore& online, double tau) {
    if (tau < 0.0 || tau > 1.0) throw ConfigError("blend_targets: tau must be in [0,1]");
    if (target.layers.size() != online.layers.size())
        throw ShapeError("blend_targets: layer count mismatch");
    for (std::size_t l = 0; l < target.layers.size(); ++l) {
        auto& t = target.layers[l];
        const auto& o = online.layers[l];
        if (t.W.rows() != o.W.rows() || t.W.cols() != o.W.cols() || t.b.size() != o.b.size())
            throw ShapeError("blend_targets: shape mismatch in layer " + std::to_string(l));
        t.W = (1.0 - tau) * t.W + tau * o.W;
        t.b = (1.0 - tau) * t.b + tau * o.b;
    }
    target.revision += 1;
}

Mlp Mlp::create(const std::vector<LayerSpec>& spec, RandomStream& rng,
                std::optional<double> final_init_range) {
    Mlp m;
    m.spec = spec;
    m.params = make_params(spec, rng, final_init_range);
    return m;
}

Eigen::VectorXd Mlp::forward_vec(const Eigen::VectorXd& input) const {
    return mlp_forward(params, spec, input, nullptr).col(0);
}

}  // namespace iu::nn
