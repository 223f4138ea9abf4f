#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "iu/checkpoint.hpp"
#include "iu/nn_core.hpp"

using namespace iu;
using nn::Activation;
using nn::LayerSpec;

namespace {

// scalar-loop forward evaluation, independent of the Eigen path
Eigen::VectorXd scalar_forward(const nn::ParamStore& p, const std::vector<LayerSpec>& spec,
                               const Eigen::VectorXd& input) {
    std::vector<double> x(input.data(), input.data() + input.size());
    for (std::size_t l = 0; l < spec.size(); ++l) {
        std::vector<double> y(static_cast<std::size_t>(spec[l].out_dim), 0.0);
        for (int i = 0; i < spec[l].out_dim; ++i) {
            double acc = p.layers[l].b(i);
            for (int j = 0; j < spec[l].in_dim; ++j) acc += p.layers[l].W(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = spec[l].act == Activation::Tanh ? std::tanh(acc) : acc;
        }
        x = std::move(y);
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) out(static_cast<Eigen::Index>(i)) = x[i];
    return out;
}

// independent scalar Adam recurrence
struct ScalarAdam {
    double m = 0, v = 0;
    long t = 0;
    double step(double p, double g, double lr, double b1 = 0.9, double b2 = 0.999,
                double eps = 1e-8) {
        ++t;
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g * g;
        const double mh = m / (1 - std::pow(b1, static_cast<double>(t)));
        const double vh = v / (1 - std::pow(b2, static_cast<double>(t)));
        return p - lr * mh / (std::sqrt(vh) + eps);
    }
};

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-6});
}

}  // namespace

TEST_CASE("forward: zero weights pass bias through the activation") {
    RandomStream rng(7);
    std::vector<LayerSpec> spec{{3, 4, Activation::Tanh}};
    nn::ParamStore p = nn::make_params(spec, rng);
    p.layers[0].W.setZero();
    p.layers[0].b << 0.3, -0.1, 0.0, 2.0;
    const Eigen::VectorXd out =
        nn::mlp_forward(p, spec, Eigen::Vector3d(13.0, -4.0, 0.5)).col(0);
    for (int i = 0; i < 4; ++i) CHECK(out(i) == doctest::Approx(std::tanh(p.layers[0].b(i))).epsilon(1e-15));
}

TEST_CASE("forward: identity linear layer reproduces its input") {
    RandomStream rng(7);
    std::vector<LayerSpec> spec{{3, 3, Activation::Linear}};
    nn::ParamStore p = nn::make_params(spec, rng);
    p.layers[0].W.setIdentity();
    p.layers[0].b.setZero();
    const Eigen::Vector3d x(0.25, -1.5, 3.0);
    CHECK((nn::mlp_forward(p, spec, x).col(0) - x).norm() == 0.0);
}

TEST_CASE("forward: random 3-4-2 tanh net matches the scalar-loop oracle") {
    RandomStream rng(42);
    std::vector<LayerSpec> spec{{3, 4, Activation::Tanh}, {4, 2, Activation::Tanh}};
    nn::ParamStore p = nn::make_params(spec, rng);
    for (int c = 0; c < 20; ++c) {
        Eigen::VectorXd x(3);
        for (int i = 0; i < 3; ++i) x(i) = rng.uniform(-2, 2);
        const Eigen::VectorXd got = nn::mlp_forward(p, spec, x).col(0);
        const Eigen::VectorXd want = scalar_forward(p, spec, x);
        for (int i = 0; i < 2; ++i) CHECK(rel_err(got(i), want(i)) < 1e-12);
    }
}

TEST_CASE("forward: dimension mismatch is rejected with a shape diagnostic") {
    RandomStream rng(1);
    std::vector<LayerSpec> spec{{3, 2, Activation::Tanh}};
    nn::ParamStore p = nn::make_params(spec, rng);
    CHECK_THROWS_AS(nn::mlp_forward(p, spec, Eigen::Vector2d(1, 2)), ShapeError);
}

TEST_CASE("forward: tanh outputs stay strictly inside (-1,1)") {
    RandomStream rng(3);
    std::vector<LayerSpec> spec{{2, 8, Activation::Tanh}, {8, 3, Activation::Tanh}};
    nn::ParamStore p = nn::make_params(spec, rng);
    // scale into visible saturation while keeping pre-activations below the
    // level where double tanh rounds to exactly 1
    for (auto& l : p.layers) l.W *= 2.0;
    for (int c = 0; c < 50; ++c) {
        const Eigen::VectorXd out =
            nn::mlp_forward(p, spec, Eigen::Vector2d(rng.uniform(-2, 2), rng.uniform(-2, 2))).col(0);
        for (int i = 0; i < out.size(); ++i) {
            CHECK(out(i) > -1.0);
            CHECK(out(i) < 1.0);
        }
    }
}

TEST_CASE("backward: linear single layer gives g x^T and W^T g") {
    RandomStream rng(11);
    std::vector<LayerSpec> spec{{3, 2, Activation::Linear}};
    nn::ParamStore p = nn::make_params(spec, rng);
    const Eigen::Vector3d x(0.5, -1.0, 2.0);
    nn::ForwardCache cache;
    nn::mlp_forward(p, spec, x, &cache);
    const Eigen::Vector2d g(2.0, -3.0);
    const Eigen::VectorXd dx = nn::mlp_backward(p, spec, cache, g).col(0);
    CHECK((p.grads[0].W - g * x.transpose()).norm() == doctest::Approx(0.0));
    CHECK((p.grads[0].b - g).norm() == doctest::Approx(0.0));
    CHECK((dx - p.layers[0].W.transpose() * g).norm() == doctest::Approx(0.0));
}

TEST_CASE("backward: zero output_grad leaves all grads zero") {
    RandomStream rng(12);
    std::vector<LayerSpec> spec{{3, 5, Activation::Tanh}, {5, 2, Activation::Linear}};
    nn::ParamStore p = nn::make_params(spec, rng);
    nn::ForwardCache cache;
    nn::mlp_forward(p, spec, Eigen::Vector3d(1, 2, 3), &cache);
    nn::mlp_backward(p, spec, cache, Eigen::Vector2d::Zero());
    for (const auto& g : p.grads) {
        CHECK(g.W.norm() == 0.0);
        CHECK(g.b.norm() == 0.0);
    }
}

TEST_CASE("backward: every partial matches central finite differences") {
    RandomStream rng(99);
    std::vector<LayerSpec> spec{{4, 6, Activation::Tanh}, {6, 3, Activation::Tanh}};
    const double h = 1e-5;
    for (int trial = 0; trial < 5; ++trial) {
        nn::ParamStore p = nn::make_params(spec, rng);
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = rng.uniform(-1, 1);
        Eigen::VectorXd g(3);
        for (int i = 0; i < 3; ++i) g(i) = rng.uniform(-1, 1);

        nn::ForwardCache cache;
        nn::mlp_forward(p, spec, x, &cache);
        nn::zero_grads(p);
        const Eigen::VectorXd dx = nn::mlp_backward(p, spec, cache, g).col(0);

        auto loss = [&](const nn::ParamStore& q, const Eigen::VectorXd& xin) {
            return (g.transpose() * nn::mlp_forward(q, spec, xin).col(0))(0);
        };
        for (std::size_t l = 0; l < spec.size(); ++l) {
            for (int i = 0; i < p.layers[l].W.rows(); ++i) {
                for (int j = 0; j < p.layers[l].W.cols(); ++j) {
                    nn::ParamStore q = p;
                    q.layers[l].W(i, j) += h;
                    const double up = loss(q, x);
                    q.layers[l].W(i, j) -= 2 * h;
                    const double dn = loss(q, x);
                    const double fd = (up - dn) / (2 * h);
                    CHECK(std::abs(p.grads[l].W(i, j) - fd) <
                          1e-4 * std::max({std::abs(fd), std::abs(p.grads[l].W(i, j)), 1e-2}));
                }
            }
            for (int i = 0; i < p.layers[l].b.size(); ++i) {
                nn::ParamStore q = p;
                q.layers[l].b(i) += h;
                const double up = loss(q, x);
                q.layers[l].b(i) -= 2 * h;
                const double dn = loss(q, x);
                const double fd = (up - dn) / (2 * h);
                CHECK(std::abs(p.grads[l].b(i) - fd) <
                      1e-4 * std::max({std::abs(fd), std::abs(p.grads[l].b(i)), 1e-2}));
            }
        }
        for (int i = 0; i < 4; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            const double fd = (loss(p, xp) - loss(p, xm)) / (2 * h);
            CHECK(std::abs(dx(i) - fd) < 1e-4 * std::max({std::abs(fd), std::abs(dx(i)), 1e-2}));
        }
    }
}

TEST_CASE("backward: stale cache is rejected") {
    RandomStream rng(5);
    std::vector<LayerSpec> spec{{2, 2, Activation::Tanh}};
    nn::ParamStore p = nn::make_params(spec, rng);
    nn::ForwardCache cache;
    nn::mlp_forward(p, spec, Eigen::Vector2d(1, 1), &cache);
    p.grads[0].W.setConstant(1.0);
    p.grads[0].b.setConstant(1.0);
    nn::adam_step(p, 1e-3);  // bumps the revision
    CHECK_THROWS_AS(nn::mlp_backward(p, spec, cache, Eigen::Vector2d(1, 1)), ShapeError);
}

TEST_CASE("adam: zero grads leave parameters unchanged") {
    RandomStream rng(21);
    std::vector<LayerSpec> spec{{2, 3, Activation::Tanh}};
    nn::ParamStore p = nn::make_params(spec, rng);
    const Eigen::MatrixXd w0 = p.layers[0].W;
    nn::adam_step(p, 1e-2);
    CHECK((p.layers[0].W - w0).norm() == 0.0);
    CHECK(p.adam_t == 1);
}

TEST_CASE("adam: first step moves by ~ -lr * sign(g)") {
    RandomStream rng(22);
    std::vector<LayerSpec> spec{{1, 1, Activation::Linear}};
    nn::ParamStore p = nn::make_params(spec, rng);
    const double w0 = p.layers[0].W(0, 0);
    p.grads[0].W(0, 0) = 0.37;  // any nonzero constant
    nn::adam_step(p, 1e-3);
    // bias-corrected first step is lr * g/(|g| + eps)
    CHECK(rel_err(w0 - p.layers[0].W(0, 0), 1e-3) < 1e-6);
}

TEST_CASE("adam: three steps on a scalar quadratic match the scalar reference") {
    RandomStream rng(23);
    std::vector<LayerSpec> spec{{1, 1, Activation::Linear}};
    nn::ParamStore p = nn::make_params(spec, rng);
    p.layers[0].b.setZero();
    ScalarAdam ref;
    double w_ref = p.layers[0].W(0, 0);
    for (int s = 0; s < 3; ++s) {
        const double g = 2.0 * p.layers[0].W(0, 0);  // d/dw of w^2
        p.grads[0].W(0, 0) = g;
        nn::adam_step(p, 1e-2);
        w_ref = ref.step(w_ref, 2.0 * w_ref, 1e-2);
        CHECK(rel_err(p.layers[0].W(0, 0), w_ref) < 1e-12);
    }
    CHECK(p.adam_t == 3);
}

TEST_CASE("adam: non-finite gradient aborts without touching parameters") {
    RandomStream rng(24);
    std::vector<LayerSpec> spec{{2, 2, Activation::Tanh}};
    nn::ParamStore p = nn::make_params(spec, rng);
    const Eigen::MatrixXd w0 = p.layers[0].W;
    p.grads[0].W(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(nn::adam_step(p, 1e-3), NumericError);
    CHECK((p.layers[0].W - w0).norm() == 0.0);
    CHECK(p.adam_t == 0);
}

TEST_CASE("blend_targets: tau endpoints and midpoint") {
    RandomStream rng(31);
    std::vector<LayerSpec> spec{{2, 2, Activation::Tanh}};
    nn::ParamStore target = nn::make_params(spec, rng);
    nn::ParamStore online = nn::make_params(spec, rng);

    nn::ParamStore t1 = target;
    nn::blend_targets(t1, online, 1.0);
    CHECK((t1.layers[0].W - online.layers[0].W).norm() == 0.0);

    nn::ParamStore t0 = target;
    nn::blend_targets(t0, online, 0.0);
    CHECK((t0.layers[0].W - target.layers[0].W).norm() == 0.0);

    nn::ParamStore mid = target;
    mid.layers[0].W.setZero();
    mid.layers[0].b.setZero();
    nn::ParamStore two = online;
    two.layers[0].W.setConstant(2.0);
    two.layers[0].b.setConstant(2.0);
    nn::blend_targets(mid, two, 0.5);
    CHECK((mid.layers[0].W.array() - 1.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("blend_targets: shape mismatch rejected") {
    RandomStream rng(32);
    nn::ParamStore a = nn::make_params({{2, 2, Activation::Tanh}}, rng);
    nn::ParamStore b = nn::make_params({{2, 3, Activation::Tanh}}, rng);
    CHECK_THROWS_AS(nn::blend_targets(a, b, 0.5), ShapeError);
}

TEST_CASE("determinism: same seed gives bit-identical parameters after N steps") {
    auto build_and_train = [] {
        RandomStream rng(77);
        std::vector<LayerSpec> spec{{3, 5, Activation::Tanh}, {5, 2, Activation::Linear}};
        nn::ParamStore p = nn::make_params(spec, rng);
        for (int s = 0; s < 10; ++s) {
            nn::ForwardCache cache;
            Eigen::VectorXd x(3);
            for (int i = 0; i < 3; ++i) x(i) = rng.uniform(-1, 1);
            nn::mlp_forward(p, spec, x, &cache);
            nn::mlp_backward(p, spec, cache, Eigen::Vector2d(1.0, -1.0));
            nn::adam_step(p, 1e-3);
        }
        return p;
    };
    const nn::ParamStore a = build_and_train();
    const nn::ParamStore b = build_and_train();
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].W == b.layers[l].W);
        CHECK(a.layers[l].b == b.layers[l].b);
    }
}

TEST_CASE("checkpoint: param round trip is bit-exact") {
    RandomStream rng(55);
    std::vector<LayerSpec> spec{{3, 4, Activation::Tanh}, {4, 2, Activation::Linear}};
    nn::ParamStore p = nn::make_params(spec, rng);
    // give the adam state some structure
    nn::ForwardCache cache;
    nn::mlp_forward(p, spec, Eigen::Vector3d(1, 2, 3), &cache);
    nn::mlp_backward(p, spec, cache, Eigen::Vector2d(0.3, -0.7));
    nn::adam_step(p, 1e-3);

    ckpt::Container c;
    ckpt::put_params(c, "net", p);
    c.put_bytes("note", "round trip");
    const std::string path = (std::filesystem::temp_directory_path() / "iu_ckpt_test.bin").string();
    c.save(path);
    const ckpt::Container loaded = ckpt::Container::load(path);
    const nn::ParamStore q = ckpt::get_params(loaded, "net", spec);
    for (std::size_t l = 0; l < spec.size(); ++l) {
        CHECK(p.layers[l].W == q.layers[l].W);
        CHECK(p.layers[l].b == q.layers[l].b);
        CHECK(p.adam_m[l].W == q.adam_m[l].W);
        CHECK(p.adam_v[l].W == q.adam_v[l].W);
    }
    CHECK(p.adam_t == q.adam_t);
    CHECK(loaded.get_bytes("note") == "round trip");
    std::filesystem::remove(path);
}
