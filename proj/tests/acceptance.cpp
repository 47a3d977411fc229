// End-to-end acceptance gate. Each criterion prints exactly one
// "CRITERION <n>: PASS|FAIL" line; the process exits nonzero when any
// requested criterion fails.
//
// Usage: acceptance [n]   (run criterion n only; default runs all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "uniqode/adam.hpp"
#include "uniqode/experiments.hpp"
#include "uniqode/identify.hpp"
#include "uniqode/mlp.hpp"
#include "uniqode/ode.hpp"
#include "uniqode/training.hpp"

using uniqode::ode::Trajectory;
using uniqode::ode::Vec;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            detail = msg;
        }
    }
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Randomized structured-row instances shared by criteria 1-3. States are
// (y, c) with C(x) = c, so matched pairs are rows with equal y and distinct c.

struct Poly {
    std::vector<double> coeffs;
    double operator()(double y) const {
        double acc = 0.0;
        for (size_t k = coeffs.size(); k-- > 0;) acc = acc * y + coeffs[k];
        return acc;
    }
};

Poly random_poly(std::mt19937_64& rng, int degree, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Poly p;
    p.coeffs.resize(static_cast<size_t>(degree) + 1);
    for (auto& c : p.coeffs) c = dist(rng);
    return p;
}

struct Instance {
    Trajectory data;
    Poly g, c_of_y_unused, d, u, psi;  // c is the second state directly
    double beta = 0.0;
    std::vector<double> y_values;
};

uniqode::identify::H1Fn h1_first() {
    return [](const Vec& x) { return Vec{x[0]}; };
}
uniqode::identify::CxFn c_second() {
    return [](double, const Vec& x) { return x[1]; };
}

// Exact Theorem-1 data: rows 0/1 share y with c offset by >= 1, plus extra
// rows at distinct y values for the Corollary-1 extension.
Instance t1_instance(std::mt19937_64& rng) {
    Instance ins;
    std::uniform_real_distribution<double> beta_dist(-5.0, 5.0);
    std::uniform_real_distribution<double> y_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> c_dist(0.5, 2.5);
    ins.beta = beta_dist(rng);
    ins.g = random_poly(rng, 3);
    ins.d = random_poly(rng, 2);
    ins.u = random_poly(rng, 2);
    // Keep |g(y0)| well away from the hypothesis threshold.
    double y0 = 0.0;
    do {
        y0 = y_dist(rng);
    } while (std::abs(ins.g(y0)) < 1e-3);

    ins.data.has_derivatives = true;
    auto push = [&](double y, double c) {
        const double xdot = ins.beta * ins.g(y) + c * ins.u(y) + ins.d(y);
        ins.data.times.push_back(static_cast<double>(ins.data.size()));
        ins.data.states.push_back({y, c});
        ins.data.derivatives.push_back({xdot, 0.0});
        ins.y_values.push_back(y);
    };
    const double c0 = c_dist(rng);
    push(y0, c0);
    push(y0, c0 + 1.0);  // guaranteed C gap
    for (int k = 0; k < 6; ++k) push(y_dist(rng), c_dist(rng));
    return ins;
}

// Exact Theorem-2 data: four distinct y groups, two rows each.
Instance t2_instance(std::mt19937_64& rng) {
    Instance ins;
    std::uniform_real_distribution<double> y_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> c_dist(0.5, 2.5);
    ins.psi = random_poly(rng, 3);
    ins.d = random_poly(rng, 2);
    ins.u = random_poly(rng, 2);

    ins.data.has_derivatives = true;
    for (int grp = 0; grp < 4; ++grp) {
        const double y = y_dist(rng);
        const double c0 = c_dist(rng);
        for (double c : {c0, c0 + 1.0}) {
            const double xdot = ins.psi(y) + c * ins.u(y) + ins.d(y);
            ins.data.times.push_back(static_cast<double>(ins.data.size()));
            ins.data.states.push_back({y, c});
            ins.data.derivatives.push_back({xdot, 0.0});
            ins.y_values.push_back(y);
        }
    }
    return ins;
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// ---------------------------------------------------------------------------
// Criteria

// 1: Theorem-1 exact recovery over 1000 randomized instances.
Check criterion1() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        Instance ins = t1_instance(rng);
        const auto pairs = uniqode::identify::find_matched_pairs(ins.data, h1_first(),
                                                                 c_second(), 1e-12);
        c.require(!pairs.empty(), "trial " + std::to_string(trial) + ": no matched pair");
        if (!c.ok) break;
        const auto g_fn = [&](const Vec& y) { return ins.g(y[0]); };
        const auto d_fn = [&](double, const Vec& x) { return ins.d(x[0]); };
        const auto cert = uniqode::identify::recover_t1(pairs.front(), ins.data, g_fn,
                                                        c_second(), d_fn, h1_first(), 0);
        c.require(cert.recovered_beta.has_value(), "missing beta");
        if (!c.ok) break;
        c.require(rel_err(*cert.recovered_beta, ins.beta) < 1e-10,
                  "trial " + std::to_string(trial) +
                      ": beta rel err " + fmt(rel_err(*cert.recovered_beta, ins.beta)));
        for (const auto& [p, u_val] : cert.recovered_u_values) {
            c.require(rel_err(u_val, ins.u(ins.y_values[p])) < 1e-10,
                      "trial " + std::to_string(trial) + ": u rel err at index " +
                          std::to_string(p));
        }
    }
    const double secs = elapsed_since(t0);
    c.require(secs < 10.0, "runtime " + fmt(secs) + "s exceeds 10s");
    if (c.ok) c.detail = "1000 instances, " + fmt(secs) + "s";
    return c;
}

// 2: Theorem-2 recovery of u(Y) and g(Y) under the same protocol.
Check criterion2() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        Instance ins = t2_instance(rng);
        const auto pairs = uniqode::identify::find_matched_pairs(ins.data, h1_first(),
                                                                 c_second(), 1e-12);
        const auto d_fn = [&](double, const Vec& x) { return ins.d(x[0]); };
        const auto cert = uniqode::identify::recover_t2_all(pairs, ins.data, c_second(), d_fn,
                                                            h1_first(), 0);
        c.require(cert.recovered_u_values.size() == ins.data.size(),
                  "trial " + std::to_string(trial) + ": not every index recovered");
        for (const auto& [p, u_val] : cert.recovered_u_values) {
            c.require(rel_err(u_val, ins.u(ins.y_values[p])) < 1e-10,
                      "trial " + std::to_string(trial) + ": u rel err at " + std::to_string(p));
        }
        for (const auto& [p, g_val] : cert.recovered_g_values) {
            c.require(rel_err(g_val, ins.psi(ins.y_values[p])) < 1e-10,
                      "trial " + std::to_string(trial) + ": g rel err at " + std::to_string(p));
        }
    }
    const double secs = elapsed_since(t0);
    c.require(secs < 10.0, "runtime " + fmt(secs) + "s exceeds 10s");
    if (c.ok) c.detail = "1000 instances, " + fmt(secs) + "s";
    return c;
}

// 3: Lipschitz bound containment, 1000 instances per theorem, D in [0, 0.2].
Check criterion3() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> d_dist(0.0, 0.2);
    std::uniform_real_distribution<double> y_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> c_dist(0.5, 2.5);
    std::uniform_real_distribution<double> slope(-1.0, 1.0);
    std::uniform_real_distribution<double> beta_dist(-5.0, 5.0);

    // Theorem 3 / Remark 1 (growth shape known, constant unknown).
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const double D = (trial == 0) ? 0.0 : d_dist(rng);
        const double L = 1.5;
        const double beta = beta_dist(rng);
        const double a = slope(rng) * L, b = slope(rng);  // u(y) = a y + b, |a| <= L
        Poly g = random_poly(rng, 2);
        Poly d = random_poly(rng, 2);
        double yi = y_dist(rng);
        while (std::abs(g(yi)) < 1e-2) yi = y_dist(rng);
        const double yj = yi + D * (slope(rng) >= 0 ? 1.0 : -1.0);
        const double ci = c_dist(rng), cj = ci + 1.0;

        Trajectory data;
        data.has_derivatives = true;
        std::vector<double> ys;
        auto push = [&](double y, double cc, double gy) {
            data.times.push_back(static_cast<double>(data.size()));
            data.states.push_back({y, cc});
            data.derivatives.push_back({beta * gy + cc * (a * y + b) + d(y), 0.0});
            ys.push_back(y);
        };
        // The pair shares the growth value g(y_i): the proof's matched-pair
        // hypothesis treats y_i and y_j as the same reduced coordinate.
        push(yi, ci, g(yi));
        push(yj, cj, g(yi));
        for (int k = 0; k < 4; ++k) {
            const double y = y_dist(rng);
            push(y, c_dist(rng), g(y));
        }

        uniqode::identify::MatchedPair pair;
        pair.i = 0;
        pair.j = 1;
        pair.y_distance = D;
        pair.c_gap = ci - cj;
        const auto c_fn = c_second();
        const auto d_fn = [&](double, const Vec& x) { return d(x[0]); };
        const uniqode::identify::GyFn g_fn = [&](const Vec& y) {
            // growth value as generated: the pair shares g(y_i)
            return (std::abs(y[0] - yj) < 1e-15 && D > 0.0) ? g(yi) : g(y[0]);
        };
        const auto vals =
            uniqode::identify::pair_values(pair, data, c_fn, d_fn, &g_fn, h1_first(), 0);

        std::vector<double> c_values, g_values, xdot_q, d_values;
        for (size_t p = 0; p < data.size(); ++p) {
            c_values.push_back(data.states[p][1]);
            g_values.push_back(g_fn({ys[p]}));
            xdot_q.push_back(data.derivatives[p][0]);
            d_values.push_back(d(ys[p]));
        }
        const auto report = uniqode::identify::bound_t3(
            {pair}, {vals}, L, D, c_values, g_values, xdot_q, d_values,
            uniqode::identify::FormulaVariant::Alternative);

        if (D == 0.0) {
            c.require(report.beta_radius == 0.0, "T3: beta radius not exactly 0 at D=0");
        }
        c.require(std::abs(*report.beta_estimate - beta) <= report.beta_radius + 1e-12,
                  "T3 trial " + std::to_string(trial) + ": beta outside radius");
        for (const auto& [p, radius] : report.u_radii) {
            if (D == 0.0) c.require(radius == 0.0, "T3: u radius not exactly 0 at D=0");
            const double truth = a * ys[p] + b;
            c.require(std::abs(report.u_estimates.at(p) - truth) <= radius + 1e-12,
                      "T3 trial " + std::to_string(trial) + ": u outside radius at " +
                          std::to_string(p));
        }
    }

    // Theorem 4 / Remark 2 (growth entirely unknown).
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const double D = (trial == 0) ? 0.0 : d_dist(rng);
        const double L1 = 2.0, L2 = 1.5;
        const double a1 = slope(rng) * L1, b1 = slope(rng);  // psi(y) = a1 y + b1
        const double a2 = slope(rng) * L2, b2 = slope(rng);  // u(y)  = a2 y + b2
        Poly d = random_poly(rng, 2);
        const double yi = y_dist(rng);
        const double yj = yi + D * (slope(rng) >= 0 ? 1.0 : -1.0);
        const double ci = c_dist(rng), cj = ci + 1.0;

        Trajectory data;
        data.has_derivatives = true;
        auto xdot = [&](double y, double cc) {
            return (a1 * y + b1) + cc * (a2 * y + b2) + d(y);
        };
        data.times = {0.0, 1.0};
        data.states = {{yi, ci}, {yj, cj}};
        data.derivatives = {{xdot(yi, ci), 0.0}, {xdot(yj, cj), 0.0}};

        uniqode::identify::MatchedPair pair;
        pair.i = 0;
        pair.j = 1;
        pair.y_distance = D;
        pair.c_gap = ci - cj;
        const auto d_fn = [&](double, const Vec& x) { return d(x[0]); };
        const auto vals =
            uniqode::identify::pair_values(pair, data, c_second(), d_fn, nullptr, h1_first(), 0);
        const auto report = uniqode::identify::bound_t4({pair}, {vals}, L1, L2, D);

        const size_t i = pair.i;
        if (D == 0.0) {
            c.require(report.u_radii.at(i) == 0.0, "T4: u radius not exactly 0 at D=0");
            c.require(report.g_radii.at(i) == 0.0, "T4: g radius not exactly 0 at D=0");
        }
        c.require(std::abs(report.u_estimates.at(i) - (a2 * yi + b2)) <=
                      report.u_radii.at(i) + 1e-12,
                  "T4 trial " + std::to_string(trial) + ": u outside radius");
        c.require(std::abs(report.g_estimates.at(i) - (a1 * yi + b1)) <=
                      report.g_radii.at(i) + 1e-12,
                  "T4 trial " + std::to_string(trial) + ": g outside radius");
    }

    const double secs = elapsed_since(t0);
    c.require(secs < 30.0, "runtime " + fmt(secs) + "s exceeds 30s");
    if (c.ok) c.detail = "1000 instances per theorem, " + fmt(secs) + "s";
    return c;
}

// 4: the non-uniqueness construction reproduces the dynamics identically.
Check criterion4() {
    Check c;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> beta_dist(-5.0, 5.0);
    const double beta_true = 1.0;
    const auto u_true = [](double x) { return x; };
    const auto g = [](double x) { return x * (1.0 - x); };
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double beta_bar = beta_dist(rng);
        const auto u_bar =
            uniqode::identify::counterexample_shift(beta_true, beta_bar, u_true, g);
        for (int k = 0; k <= 100; ++k) {
            const double x = k / 100.0;
            const double residual =
                std::abs((beta_bar * g(x) + u_bar(x)) - (beta_true * g(x) + u_true(x)));
            worst = std::max(worst, residual);
        }
    }
    c.require(worst < 1e-12, "max residual " + fmt(worst));
    if (c.ok) c.detail = "100 shifts, max residual " + fmt(worst);
    return c;
}

double constant_error(const uniqode::experiments::CaseReport& r, const std::string& name) {
    for (const auto& cst : r.constants)
        if (cst.name == name) return cst.percent_error;
    return std::numeric_limits<double>::infinity();
}

// 5: case-1 direct fit for both u*(N) = N and u*(N) = N^2.
Check criterion5() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    for (auto which : {uniqode::experiments::Case::Case1UN,
                       uniqode::experiments::Case::Case1UN2}) {
        const auto report = uniqode::experiments::run_case(which);
        const double err = constant_error(report, "beta");
        c.require(err < 1.0, report.case_id + ": beta error " + fmt(err) + "%");
        c.require(report.total_loss < 1e-4,
                  report.case_id + ": final loss " + fmt(report.total_loss));
    }
    const double secs = elapsed_since(t0);
    c.require(secs < 300.0, "runtime " + fmt(secs) + "s exceeds 5min");
    if (c.ok) c.detail = "both variants within 1%, " + fmt(secs) + "s";
    return c;
}

// 6: case-3 direct fit; constants within 1%, functions within 5% on the
// interior 80% of the observed range.
Check criterion6() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = uniqode::experiments::run_case(uniqode::experiments::Case::Case3);
    c.require(constant_error(report, "alpha") < 1.0,
              "alpha error " + fmt(constant_error(report, "alpha")) + "%");
    c.require(constant_error(report, "gamma") < 1.0,
              "gamma error " + fmt(constant_error(report, "gamma")) + "%");
    for (const auto& fc : report.functions) {
        const size_t n = fc.grid.size();
        const size_t lo = n / 10, hi = n - n / 10;
        for (size_t k = lo; k < hi; ++k) {
            const double err = rel_err(fc.predicted[k], fc.truth[k]);
            c.require(err < 0.05, fc.name + ": rel err " + fmt(err) + " at y=" +
                                      fmt(fc.grid[k]));
        }
    }
    const double secs = elapsed_since(t0);
    c.require(secs < 300.0, "runtime " + fmt(secs) + "s exceeds 5min");
    if (c.ok) c.detail = "constants and functions in tolerance, " + fmt(secs) + "s";
    return c;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

// 7: noise robustness at {0, 10, 30}%, medians over 3 seeds.
Check criterion7() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> levels = {0.0, 0.10, 0.30};
    const std::vector<double> alpha_bars = {1.0, 4.0, 8.0};
    const std::vector<double> r2_bars = {0.999, 0.999, 0.99};
    const auto reports = uniqode::experiments::sweep_noise(levels, {0, 1, 2});
    for (size_t li = 0; li < levels.size(); ++li) {
        std::vector<double> errs, r2s;
        for (size_t s = 0; s < 3; ++s) {
            const auto& r = reports[li * 3 + s];
            errs.push_back(constant_error(r, "alpha"));
            r2s.push_back(r.r2);
        }
        c.require(median(errs) <= alpha_bars[li],
                  "noise " + fmt(levels[li]) + ": median alpha error " + fmt(median(errs)) +
                      "% > " + fmt(alpha_bars[li]) + "%");
        c.require(median(r2s) >= r2_bars[li], "noise " + fmt(levels[li]) + ": median R^2 " +
                                                  fmt(median(r2s)));
    }
    const double secs = elapsed_since(t0);
    c.require(secs < 1800.0, "runtime " + fmt(secs) + "s exceeds 30min");
    if (c.ok) c.detail = "3 levels x 3 seeds, " + fmt(secs) + "s";
    return c;
}

// 8: dataset-length robustness at {1024, 64, 8}, medians over 3 seeds, plus
// a completing length-4 run.
Check criterion8() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<size_t> lengths = {1024, 64, 8};
    const std::vector<double> beta_bars = {0.3, 0.5, 5.0};
    std::vector<std::vector<double>> errs(lengths.size());
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        uniqode::experiments::Overrides ov;
        ov.seed = seed;
        const auto reports = uniqode::experiments::sweep_length(lengths, ov);
        for (size_t li = 0; li < lengths.size(); ++li) {
            errs[li].push_back(constant_error(reports[li], "beta"));
        }
    }
    for (size_t li = 0; li < lengths.size(); ++li) {
        c.require(median(errs[li]) <= beta_bars[li],
                  "length " + std::to_string(lengths[li]) + ": median beta error " +
                      fmt(median(errs[li])) + "% > " + fmt(beta_bars[li]) + "%");
    }
    // Length 4 must complete and report its (possibly large) error. Short
    // epochs suffice: only graceful completion is gated.
    uniqode::experiments::Overrides ov4;
    ov4.dataset_length = 4;
    ov4.epochs = 1000;
    const auto r4 = uniqode::experiments::run_case(uniqode::experiments::Case::Case5, ov4);
    c.require(std::isfinite(constant_error(r4, "beta")), "length 4 reported no error value");
    const double secs = elapsed_since(t0);
    c.require(secs < 1800.0, "runtime " + fmt(secs) + "s exceeds 30min");
    if (c.ok) {
        c.detail = "medians " + fmt(median(errs[0])) + "% / " + fmt(median(errs[1])) + "% / " +
                   fmt(median(errs[2])) + "%, length-4 error " +
                   fmt(constant_error(r4, "beta")) + "%, " + fmt(secs) + "s";
    }
    return c;
}

// 9: finite-difference validation of 100 random network gradients.
Check criterion9() {
    Check c;
    std::mt19937_64 rng(909);
    std::uniform_int_distribution<int> width(2, 12);
    std::uniform_int_distribution<int> depth(1, 3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        std::vector<int> shape{width(rng)};
        const int hidden = depth(rng);
        for (int l = 0; l < hidden; ++l) shape.push_back(width(rng));
        shape.push_back(width(rng));
        const uniqode::ad::Mlp net =
            uniqode::ad::init_mlp(shape, static_cast<std::uint64_t>(trial) + 1);

        std::vector<double> x(static_cast<size_t>(shape.front()));
        std::vector<double> wout(static_cast<size_t>(shape.back()));
        for (auto& v : x) v = unit(rng);
        for (auto& v : wout) v = unit(rng);

        // Scalar loss sum_r wout_r * y_r; directional derivative against a
        // random parameter direction.
        uniqode::ad::MlpWorkspace ws;
        ws.forward(net, x);
        uniqode::ad::MlpGrad grad(net);
        ws.backward(net, wout, grad);
        const std::vector<double> gflat = grad.flatten();

        std::vector<double> dir(gflat.size());
        for (auto& v : dir) v = unit(rng);
        double analytic = 0.0;
        for (size_t k = 0; k < gflat.size(); ++k) analytic += gflat[k] * dir[k];

        const double h = 1e-6;
        auto loss_at = [&](double eps) {
            uniqode::ad::Mlp shifted = net;
            std::vector<double> flat = net.flatten();
            for (size_t k = 0; k < flat.size(); ++k) flat[k] += eps * dir[k];
            shifted.unflatten(flat);
            const std::vector<double> y = uniqode::ad::mlp_forward(shifted, x);
            double acc = 0.0;
            for (size_t r = 0; r < y.size(); ++r) acc += wout[r] * y[r];
            return acc;
        };
        const double fd = (loss_at(h) - loss_at(-h)) / (2.0 * h);
        const double err = std::abs(analytic - fd) / std::max(std::abs(fd), 1e-8);
        c.require(err < 1e-5,
                  "trial " + std::to_string(trial) + ": rel err " + fmt(err));
    }
    if (c.ok) c.detail = "100 networks";
    return c;
}

// 10: RK4 convergence order and Lotka-Volterra first-integral drift.
Check criterion10() {
    Check c;
    uniqode::ode::StructuredSystem decay;
    decay.n = 1;
    decay.is_structured = {false};
    decay.known.resize(1);
    decay.known[0].f = [](double, const Vec& x) { return -x[0]; };

    auto final_error = [&](double dt) {
        const auto traj = uniqode::ode::rk4_integrate(decay, {1.0}, 0.0, 1.0, dt);
        return std::abs(traj.states.back()[0] - std::exp(-1.0));
    };
    const double ratio = final_error(0.1) / final_error(0.05);
    c.require(ratio >= 14.0 && ratio <= 18.0, "order ratio " + fmt(ratio));

    const auto lv =
        uniqode::ode::builtin_system(uniqode::ode::BuiltinCase::LotkaVolterra);
    const auto traj = uniqode::ode::rk4_integrate(lv, lv.x0, 0.0, 10.0, 1e-3);
    auto invariant = [](const Vec& s) {
        return s[0] - std::log(s[0]) + s[1] - std::log(s[1]);
    };
    const double v0 = invariant(traj.states.front());
    double drift = 0.0;
    for (const auto& s : traj.states) drift = std::max(drift, std::abs(invariant(s) - v0));
    c.require(drift < 1e-6, "first-integral drift " + fmt(drift));
    if (c.ok) c.detail = "ratio " + fmt(ratio) + ", drift " + fmt(drift);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Check()>> criteria = {
        criterion1, criterion2, criterion3, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9, criterion10};

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "usage: %s [1..%zu]\n", argv[0], criteria.size());
        return 2;
    }

    bool all_ok = true;
    for (size_t k = 0; k < criteria.size(); ++k) {
        if (only != 0 && static_cast<size_t>(only) != k + 1) continue;
        const Check c = criteria[k]();
        std::printf("CRITERION %zu: %s%s%s\n", k + 1, c.ok ? "PASS" : "FAIL",
                    c.detail.empty() ? "" : " — ", c.detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && c.ok;
    }
    return all_ok ? 0 : 1;
}
