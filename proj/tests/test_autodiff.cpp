#include <doctest.h>

#include <cmath>
#include <random>

#include "uniqode/adam.hpp"
#include "uniqode/autodiff.hpp"
#include "uniqode/errors.hpp"
#include "uniqode/mlp.hpp"

using namespace uniqode;
using namespace uniqode::ad;

TEST_CASE("tape: arithmetic values") {
    Tape t;
    auto a = t.leaf(3.0), b = t.leaf(4.0);
    CHECK(t.val(t.add(a, b)) == doctest::Approx(7.0));
    CHECK(t.val(t.sub(a, b)) == doctest::Approx(-1.0));
    CHECK(t.val(t.mul(a, b)) == doctest::Approx(12.0));
    CHECK(t.val(t.div(a, b)) == doctest::Approx(0.75));
    CHECK(t.val(t.neg(a)) == doctest::Approx(-3.0));
    CHECK(t.val(t.scale(a, 2.5)) == doctest::Approx(7.5));
    CHECK(t.val(t.shift(a, -1.0)) == doctest::Approx(2.0));
    CHECK(t.val(t.square(a)) == doctest::Approx(9.0));
    CHECK(t.val(t.tanh(t.leaf(0.0))) == doctest::Approx(0.0));
    CHECK(t.val(t.exp(t.leaf(0.0))) == doctest::Approx(1.0));
    CHECK(t.val(t.log(t.leaf(1.0))) == doctest::Approx(0.0));
}

TEST_CASE("tape: gradient of p^2 at p=3 is 6") {
    Tape t;
    auto p = t.leaf(3.0);
    auto loss = t.square(p);
    auto adj = t.backward(loss);
    CHECK(adj[static_cast<size_t>(p)] == doctest::Approx(6.0));
}

TEST_CASE("tape: gradient of tanh(p) at p=0.5") {
    Tape t;
    auto p = t.leaf(0.5);
    auto loss = t.tanh(p);
    auto adj = t.backward(loss);
    CHECK(adj[static_cast<size_t>(p)] == doctest::Approx(0.7864477330).epsilon(1e-9));
}

TEST_CASE("tape: unused leaves get exact zero adjoint") {
    Tape t;
    auto p = t.leaf(1.0);
    auto unused = t.leaf(5.0);
    auto loss = t.square(p);
    auto adj = t.backward(loss);
    CHECK(adj[static_cast<size_t>(unused)] == 0.0);
}

TEST_CASE("tape: bad root throws usage error") {
    Tape t;
    t.leaf(1.0);
    CHECK_THROWS_AS(t.backward(-1), UsageError);
    CHECK_THROWS_AS(t.backward(99), UsageError);
}

TEST_CASE("tape: composite expression matches finite differences") {
    // f(a, b) = exp(a) * tanh(b) + a / b
    auto f = [](double a, double b) { return std::exp(a) * std::tanh(b) + a / b; };
    const double a0 = 0.7, b0 = 1.3, h = 1e-6;
    Tape t;
    auto a = t.leaf(a0), b = t.leaf(b0);
    auto loss = t.add(t.mul(t.exp(a), t.tanh(b)), t.div(a, b));
    auto adj = t.backward(loss);
    const double fda = (f(a0 + h, b0) - f(a0 - h, b0)) / (2 * h);
    const double fdb = (f(a0, b0 + h) - f(a0, b0 - h)) / (2 * h);
    CHECK(adj[static_cast<size_t>(a)] == doctest::Approx(fda).epsilon(1e-7));
    CHECK(adj[static_cast<size_t>(b)] == doctest::Approx(fdb).epsilon(1e-7));
}

TEST_CASE("init_mlp: parameter count and determinism") {
    Mlp net = init_mlp({1, 20, 20, 20, 20, 1}, 0);
    CHECK(net.param_count() == 1321);
    Mlp again = init_mlp({1, 20, 20, 20, 20, 1}, 0);
    CHECK(net.flatten() == again.flatten());
    Mlp other = init_mlp({1, 20, 20, 20, 20, 1}, 1);
    CHECK(net.flatten() != other.flatten());
}

TEST_CASE("init_mlp: invalid shapes are configuration errors") {
    CHECK_THROWS_AS(init_mlp({1}, 0), ConfigError);
    CHECK_THROWS_AS(init_mlp({}, 0), ConfigError);
    CHECK_THROWS_AS(init_mlp({1, 0, 1}, 0), ConfigError);
}

TEST_CASE("mlp_forward: hand-checked examples") {
    // Zero parameters -> zero output.
    Mlp zero = init_mlp({2, 3, 1}, 0);
    for (auto& w : zero.weights) std::fill(w.begin(), w.end(), 0.0);
    CHECK(mlp_forward(zero, {0.4, -0.7})[0] == doctest::Approx(0.0));

    // [1,1,1] with unit weights: tanh passthrough on the hidden layer.
    Mlp net = init_mlp({1, 1, 1}, 0);
    net.weights[0] = {1.0};
    net.weights[1] = {1.0};
    net.biases[0] = {0.0};
    net.biases[1] = {0.0};
    CHECK(mlp_forward(net, {0.5})[0] == doctest::Approx(0.4621171573).epsilon(1e-9));

    // [1,1] is a plain affine map.
    Mlp aff = init_mlp({1, 1}, 0);
    aff.weights[0] = {2.0};
    aff.biases[0] = {1.0};
    CHECK(mlp_forward(aff, {3.0})[0] == doctest::Approx(7.0));
}

TEST_CASE("mlp_forward: width mismatch is a shape error") {
    Mlp net = init_mlp({2, 3, 1}, 0);
    CHECK_THROWS_AS(mlp_forward(net, {1.0}), ShapeError);
}

TEST_CASE("flatten/unflatten round trip") {
    Mlp net = init_mlp({2, 5, 3}, 42);
    auto flat = net.flatten();
    Mlp other = init_mlp({2, 5, 3}, 7);
    other.unflatten(flat);
    CHECK(other.flatten() == flat);
}

namespace {

// Central-difference check of dL/dtheta where L = sum(c .* y(theta)).
void check_param_grads(const Mlp& net, const std::vector<double>& x,
                       const std::vector<double>& coeff, const std::vector<double>& got) {
    Mlp pert = net;
    auto flat = net.flatten();
    const double h = 1e-6;
    for (size_t p = 0; p < flat.size(); ++p) {
        auto fp = flat, fm = flat;
        fp[p] += h;
        fm[p] -= h;
        pert.unflatten(fp);
        auto yp = mlp_forward(pert, x);
        pert.unflatten(fm);
        auto ym = mlp_forward(pert, x);
        double lp = 0, lm = 0;
        for (size_t r = 0; r < coeff.size(); ++r) {
            lp += coeff[r] * yp[r];
            lm += coeff[r] * ym[r];
        }
        const double fd = (lp - lm) / (2 * h);
        const double err = std::abs(got[p] - fd);
        const double scale = std::max(std::abs(fd), 1e-8 / 1e-5);
        CHECK(err / scale < 1e-5);
    }
}

}  // namespace

TEST_CASE("mlp_forward_tape: gradients match finite differences") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        Mlp net = init_mlp({1, 20, 20, 1}, 1000 + static_cast<std::uint64_t>(trial));
        const std::vector<double> x{unif(rng)};
        Tape tape;
        std::vector<Tape::Index> inputs{tape.leaf(x[0])};
        std::vector<Tape::Index> params;
        auto out = mlp_forward_tape(net, tape, inputs, &params);
        REQUIRE(out.size() == 1);
        CHECK(tape.val(out[0]) == doctest::Approx(mlp_forward(net, x)[0]).epsilon(1e-12));

        auto adj = tape.backward(out[0]);
        std::vector<double> got(params.size());
        for (size_t p = 0; p < params.size(); ++p) got[p] = adj[static_cast<size_t>(params[p])];
        check_param_grads(net, x, {1.0}, got);

        // Input gradient too.
        const double h = 1e-6;
        const double fd =
            (mlp_forward(net, {x[0] + h})[0] - mlp_forward(net, {x[0] - h})[0]) / (2 * h);
        CHECK(adj[static_cast<size_t>(inputs[0])] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("MlpWorkspace: forward agrees with mlp_forward") {
    Mlp net = init_mlp({2, 7, 4, 3}, 5);
    MlpWorkspace ws;
    const std::vector<double> x{0.3, -0.8};
    auto ya = mlp_forward(net, x);
    auto yb = ws.forward(net, x);
    REQUIRE(ya.size() == yb.size());
    for (size_t i = 0; i < ya.size(); ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-14));
}

TEST_CASE("MlpWorkspace: backward gradients match finite differences") {
    Mlp net = init_mlp({2, 8, 8, 3}, 9);
    MlpWorkspace ws;
    const std::vector<double> x{0.4, -0.2};
    const std::vector<double> gy{0.7, -1.1, 0.3};
    ws.forward(net, x);
    MlpGrad grad(net);
    std::vector<double> gx;
    ws.backward(net, gy, grad, &gx);
    check_param_grads(net, x, gy, grad.flatten());

    // Input gradient.
    const double h = 1e-6;
    for (size_t c = 0; c < x.size(); ++c) {
        auto xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        auto yp = mlp_forward(net, xp);
        auto ym = mlp_forward(net, xm);
        double fd = 0;
        for (size_t r = 0; r < gy.size(); ++r) fd += gy[r] * (yp[r] - ym[r]) / (2 * h);
        CHECK(gx[c] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("MlpWorkspace: tangent forward matches finite differences") {
    Mlp net = init_mlp({1, 10, 10, 2}, 77);
    MlpWorkspace ws;
    const double t = 0.35, h = 1e-6;
    std::vector<double> ydot;
    auto y = ws.forward_with_tangent(net, {t}, {1.0}, &ydot);
    auto yp = mlp_forward(net, {t + h});
    auto ym = mlp_forward(net, {t - h});
    for (size_t r = 0; r < y.size(); ++r) {
        CHECK(ydot[r] == doctest::Approx((yp[r] - ym[r]) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("MlpWorkspace: backward_with_tangent matches finite differences") {
    // L(theta) = sum(gy .* y) + sum(gydot .* dy/dt); check dL/dtheta and dL/dt.
    Mlp net = init_mlp({1, 6, 6, 2}, 31);
    MlpWorkspace ws;
    const double t = -0.4;
    const std::vector<double> gy{0.9, -0.5}, gydot{0.2, 1.4};

    auto eval = [&](const Mlp& m, double tt) {
        MlpWorkspace w;
        std::vector<double> yd;
        auto y = w.forward_with_tangent(m, {tt}, {1.0}, &yd);
        double L = 0;
        for (size_t r = 0; r < y.size(); ++r) L += gy[r] * y[r] + gydot[r] * yd[r];
        return L;
    };

    std::vector<double> ydot;
    ws.forward_with_tangent(net, {t}, {1.0}, &ydot);
    MlpGrad grad(net);
    std::vector<double> gx, gxdot;
    ws.backward_with_tangent(net, gy, gydot, grad, &gx, &gxdot);

    auto flat = net.flatten();
    auto got = grad.flatten();
    Mlp pert = net;
    const double h = 1e-6;
    for (size_t p = 0; p < flat.size(); ++p) {
        auto fp = flat, fm = flat;
        fp[p] += h;
        fm[p] -= h;
        pert.unflatten(fp);
        const double lp = eval(pert, t);
        pert.unflatten(fm);
        const double lm = eval(pert, t);
        const double fd = (lp - lm) / (2 * h);
        const double scale = std::max(std::abs(fd), 1e-3);
        CHECK(std::abs(got[p] - fd) / scale < 1e-5);
    }
    const double fdt = (eval(net, t + h) - eval(net, t - h)) / (2 * h);
    CHECK(gx[0] == doctest::Approx(fdt).epsilon(1e-5));
}

TEST_CASE("MlpWorkspace: backward before forward is a usage error") {
    Mlp net = init_mlp({1, 3, 1}, 2);
    MlpWorkspace ws;
    MlpGrad grad(net);
    ws.forward(net, {0.1});
    CHECK_THROWS_AS(ws.backward_with_tangent(net, {1.0}, {0.0}, grad), UsageError);
}

TEST_CASE("adam: bias-corrected first step") {
    std::vector<double> p{1.0};
    AdamState st(1);
    adam_step(p, {1.0}, st, 1e-3);
    CHECK(1.0 - p[0] == doctest::Approx(9.99999995e-4).epsilon(1e-6));
}

TEST_CASE("adam: zero gradient with zero moments leaves parameters unchanged") {
    std::vector<double> p{2.5};
    AdamState st(1);
    adam_step(p, {0.0}, st, 1e-3);
    CHECK(p[0] == 2.5);
}

TEST_CASE("adam: identical runs give identical trajectories") {
    std::vector<double> a{0.3, -0.7}, b{0.3, -0.7};
    AdamState sa(2), sb(2);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> g{std::sin(0.1 * i), std::cos(0.2 * i)};
        adam_step(a, g, sa, 1e-3);
        adam_step(b, g, sb, 1e-3);
    }
    CHECK(a == b);
}

TEST_CASE("adam: size mismatch is a shape error") {
    std::vector<double> p{1.0, 2.0};
    AdamState st(1);
    CHECK_THROWS_AS(adam_step(p, {1.0, 1.0}, st, 1e-3), ShapeError);
}

namespace {

// Batched results must agree with per-sample MlpWorkspace sweeps.
struct BatchFixture {
    Mlp net = init_mlp({2, 16, 16, 3}, 17);
    int batch = 5;
    std::vector<double> x, x_dot;  // (r, b) = r*batch + b

    BatchFixture() {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> dist(-1.5, 1.5);
        x.resize(static_cast<size_t>(2 * batch));
        x_dot.resize(x.size());
        for (auto& v : x) v = dist(rng);
        for (auto& v : x_dot) v = dist(rng);
    }

    std::vector<double> sample(const std::vector<double>& m, int rows, int b) const {
        std::vector<double> out(static_cast<size_t>(rows));
        for (int r = 0; r < rows; ++r)
            out[static_cast<size_t>(r)] = m[static_cast<size_t>(r * batch + b)];
        return out;
    }
};

}  // namespace

TEST_CASE("MlpBatchWorkspace: forward matches per-sample workspace") {
    BatchFixture f;
    MlpBatchWorkspace bw;
    const std::vector<double>& y = bw.forward(f.net, f.x, f.batch);
    MlpWorkspace ws;
    for (int b = 0; b < f.batch; ++b) {
        const std::vector<double> yb = ws.forward(f.net, f.sample(f.x, 2, b));
        for (int r = 0; r < 3; ++r) {
            CHECK(y[static_cast<size_t>(r * f.batch + b)] ==
                  doctest::Approx(yb[static_cast<size_t>(r)]).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(bw.forward(f.net, std::vector<double>(3), 5), ShapeError);
}

TEST_CASE("MlpBatchWorkspace: tangent forward matches per-sample workspace") {
    BatchFixture f;
    MlpBatchWorkspace bw;
    std::vector<double> y_dot;
    const std::vector<double>& y = bw.forward_with_tangent(f.net, f.x, f.x_dot, f.batch, &y_dot);
    CHECK(&y == &bw.outputs());
    CHECK(y_dot == bw.output_tangents());
    MlpWorkspace ws;
    for (int b = 0; b < f.batch; ++b) {
        std::vector<double> yd;
        const std::vector<double> yb =
            ws.forward_with_tangent(f.net, f.sample(f.x, 2, b), f.sample(f.x_dot, 2, b), &yd);
        for (int r = 0; r < 3; ++r) {
            CHECK(y[static_cast<size_t>(r * f.batch + b)] ==
                  doctest::Approx(yb[static_cast<size_t>(r)]).epsilon(1e-10));
            CHECK(y_dot[static_cast<size_t>(r * f.batch + b)] ==
                  doctest::Approx(yd[static_cast<size_t>(r)]).epsilon(1e-10));
        }
    }
}

TEST_CASE("MlpBatchWorkspace: backward sums per-sample gradients") {
    BatchFixture f;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> gy(static_cast<size_t>(3 * f.batch));
    for (auto& v : gy) v = dist(rng);

    MlpBatchWorkspace bw;
    bw.forward(f.net, f.x, f.batch);
    MlpGrad grad(f.net);
    std::vector<double> gx;
    bw.backward(f.net, gy, grad, &gx);

    MlpWorkspace ws;
    MlpGrad ref(f.net);
    std::vector<std::vector<double>> gx_ref(static_cast<size_t>(f.batch));
    for (int b = 0; b < f.batch; ++b) {
        ws.forward(f.net, f.sample(f.x, 2, b));
        ws.backward(f.net, f.sample(gy, 3, b), ref, &gx_ref[static_cast<size_t>(b)]);
    }
    const std::vector<double> got = grad.flatten(), want = ref.flatten();
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }
    for (int b = 0; b < f.batch; ++b) {
        for (int r = 0; r < 2; ++r) {
            CHECK(gx[static_cast<size_t>(r * f.batch + b)] ==
                  doctest::Approx(gx_ref[static_cast<size_t>(b)][static_cast<size_t>(r)])
                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("MlpBatchWorkspace: tangent backward sums per-sample gradients") {
    BatchFixture f;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> gy(static_cast<size_t>(3 * f.batch)), gyd(gy.size());
    for (auto& v : gy) v = dist(rng);
    for (auto& v : gyd) v = dist(rng);

    MlpBatchWorkspace bw;
    bw.forward_with_tangent(f.net, f.x, f.x_dot, f.batch, nullptr);
    MlpGrad grad(f.net);
    std::vector<double> gx, gxd;
    bw.backward_with_tangent(f.net, gy, gyd, grad, &gx, &gxd);

    MlpWorkspace ws;
    MlpGrad ref(f.net);
    for (int b = 0; b < f.batch; ++b) {
        std::vector<double> yd, gxb, gxdb;
        ws.forward_with_tangent(f.net, f.sample(f.x, 2, b), f.sample(f.x_dot, 2, b), &yd);
        ws.backward_with_tangent(f.net, f.sample(gy, 3, b), f.sample(gyd, 3, b), ref, &gxb,
                                 &gxdb);
        for (int r = 0; r < 2; ++r) {
            CHECK(gx[static_cast<size_t>(r * f.batch + b)] ==
                  doctest::Approx(gxb[static_cast<size_t>(r)]).epsilon(1e-10));
            CHECK(gxd[static_cast<size_t>(r * f.batch + b)] ==
                  doctest::Approx(gxdb[static_cast<size_t>(r)]).epsilon(1e-10));
        }
    }
    const std::vector<double> got = grad.flatten(), want = ref.flatten();
    for (size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }

    MlpBatchWorkspace plain;
    plain.forward(f.net, f.x, f.batch);
    MlpGrad g2(f.net);
    CHECK_THROWS_AS(plain.backward_with_tangent(f.net, gy, gyd, g2), UsageError);
}
