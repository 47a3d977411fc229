#include "uniqode/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "uniqode/adam.hpp"

namespace uniqode::training {

using ad::AdamState;
using ad::Mlp;
using ad::MlpGrad;
using ad::MlpBatchWorkspace;
using ad::MlpWorkspace;
using ode::StructuredRow;

namespace {

struct NetSlot {
    Mlp net;
    MlpGrad grad;
    AdamState adam;
    std::vector<double> flat_params, flat_grads;
    bool active = false;

    void init(Mlp n) {
        net = std::move(n);
        grad = MlpGrad(net);
        adam = AdamState(static_cast<size_t>(net.param_count()));
        active = true;
    }
    void step(double lr) {
        flat_params = net.flatten();
        flat_grads = grad.flatten();
        ad::adam_step(flat_params, flat_grads, adam, lr);
        net.unflatten(flat_params);
        grad.zero();
    }
};

struct TrainState {
    std::vector<double> constants;          // one per growth-known component
    std::vector<double> constant_grads;
    AdamState constant_adam;
    std::vector<NetSlot> u_nets, psi_nets;  // indexed per unknown component
    NetSlot traj;

    void step(double lr) {
        if (!constants.empty()) {
            ad::adam_step(constants, constant_grads, constant_adam, lr);
            std::fill(constant_grads.begin(), constant_grads.end(), 0.0);
        }
        for (auto& s : u_nets)
            if (s.active) s.step(lr);
        for (auto& s : psi_nets)
            if (s.active) s.step(lr);
        if (traj.active) traj.step(lr);
    }
};

TrainState make_state(const StructuredSystem& system, const UnknownSpec& unknowns,
                      const TrainConfig& cfg, bool with_trajectory) {
    TrainState st;
    st.u_nets.resize(unknowns.components.size());
    st.psi_nets.resize(unknowns.components.size());
    for (size_t k = 0; k < unknowns.components.size(); ++k) {
        const UnknownComponent& comp = unknowns.components[k];
        const StructuredRow& row = system.row(comp.row);
        std::vector<int> u_shape = comp.u_net_shape;
        u_shape.front() = static_cast<int>(row.y_indices.size());
        st.u_nets[k].init(ad::init_mlp(u_shape, cfg.seed + 11 + 13 * k));
        if (comp.growth_known) {
            st.constants.push_back(comp.constant_initial);
        } else {
            std::vector<int> p_shape = comp.psi_net_shape;
            p_shape.front() = static_cast<int>(row.y_indices.size());
            st.psi_nets[k].init(ad::init_mlp(p_shape, cfg.seed + 17 + 13 * k));
        }
    }
    st.constant_grads.assign(st.constants.size(), 0.0);
    st.constant_adam = AdamState(st.constants.size());
    if (with_trajectory) {
        std::vector<int> shape = unknowns.trajectory_net_shape;
        if (shape.empty()) shape = {1, 20, 20, 20, 20, system.n};
        shape.front() = 1;
        shape.back() = system.n;
        st.traj.init(ad::init_mlp(shape, cfg.seed + 29));
    }
    return st;
}

// Maps component index -> position in TrainState::constants.
std::vector<int> constant_slots(const UnknownSpec& unknowns) {
    std::vector<int> slots(unknowns.components.size(), -1);
    int next = 0;
    for (size_t k = 0; k < unknowns.components.size(); ++k) {
        if (unknowns.components[k].growth_known) slots[k] = next++;
    }
    return slots;
}

void fill_result(FitResult& fit, const TrainState& st, const UnknownSpec& unknowns) {
    const std::vector<int> slots = constant_slots(unknowns);
    for (size_t k = 0; k < unknowns.components.size(); ++k) {
        const UnknownComponent& comp = unknowns.components[k];
        if (comp.growth_known) {
            fit.constants[comp.constant_name] = {comp.constant_initial,
                                                 st.constants[static_cast<size_t>(slots[k])]};
        }
        fit.u_nets.push_back(st.u_nets[k].net);
        fit.psi_nets.push_back(st.psi_nets[k].active ? st.psi_nets[k].net : Mlp{});
    }
    if (st.traj.active) {
        fit.trajectory_net = st.traj.net;
        fit.has_trajectory_net = true;
    }
}

bool plateaued(const std::vector<double>& history, int window, double rel_tol) {
    if (window <= 0 || static_cast<int>(history.size()) <= window) return false;
    const double before = history[history.size() - 1 - static_cast<size_t>(window)];
    const double now = history.back();
    return (before - now) < rel_tol * std::max(std::abs(before), 1e-300);
}

}  // namespace

FitResult direct_fit(const Trajectory& data, const StructuredSystem& system,
                     const UnknownSpec& unknowns, const TrainConfig& cfg) {
    if (!data.has_derivatives || data.derivatives.size() != data.size()) {
        throw DataError("direct_fit: exact derivatives are required");
    }
    if (data.size() == 0) throw DataError("direct_fit: empty dataset");

    TrainState st = make_state(system, unknowns, cfg, false);
    const std::vector<int> slots = constant_slots(unknowns);
    const size_t m = data.size();
    const size_t kcomp = unknowns.components.size();
    const double inv_mk = 1.0 / static_cast<double>(m * kcomp);

    FitResult fit;
    fit.config = cfg;
    MlpWorkspace ws_u, ws_psi;

    auto residual_and_grads = [&](bool accumulate) {
        double loss = 0.0;
        for (size_t s = 0; s < m; ++s) {
            const double t = data.times[s];
            const Vec& x = data.states[s];
            for (size_t k = 0; k < kcomp; ++k) {
                const UnknownComponent& comp = unknowns.components[k];
                const StructuredRow& row = system.row(comp.row);
                const Vec y = row.project_y(x);
                const double cval = row.C(t, x);
                const double dval = row.d_value(t, x);
                const double uval = ws_u.forward(st.u_nets[k].net, y)[0];
                double growth;
                if (comp.growth_known) {
                    growth = st.constants[static_cast<size_t>(slots[k])] * row.g(y);
                } else {
                    growth = ws_psi.forward(st.psi_nets[k].net, y)[0];
                }
                const double pred = growth + cval * uval + dval;
                const double r = data.derivatives[s][static_cast<size_t>(comp.row)] - pred;
                loss += r * r * inv_mk;
                if (!accumulate) continue;
                const double gpred = -2.0 * r * inv_mk;  // dL/dpred
                if (comp.growth_known) {
                    st.constant_grads[static_cast<size_t>(slots[k])] += gpred * row.g(y);
                } else {
                    ws_psi.backward(st.psi_nets[k].net, {gpred}, st.psi_nets[k].grad);
                }
                ws_u.backward(st.u_nets[k].net, {gpred * cval}, st.u_nets[k].grad);
            }
        }
        return loss;
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double loss = residual_and_grads(true);
        if (!std::isfinite(loss)) {
            throw DivergenceError("direct_fit: non-finite loss at epoch " + std::to_string(epoch),
                                  epoch);
        }
        fit.loss_total.push_back(loss);
        fit.loss_data.push_back(loss);
        fit.loss_ode.push_back(0.0);
        st.step(cfg.learning_rate);
        fit.epochs_run = epoch + 1;
        if (plateaued(fit.loss_total, cfg.plateau_window, cfg.plateau_rel_tol)) break;
    }

    fill_result(fit, st, unknowns);

    // Metrics: structured-row predictions against the supplied derivatives.
    std::vector<Vec> preds(m, Vec(kcomp)), refs(m, Vec(kcomp));
    for (size_t s = 0; s < m; ++s) {
        const double t = data.times[s];
        const Vec& x = data.states[s];
        for (size_t k = 0; k < kcomp; ++k) {
            const UnknownComponent& comp = unknowns.components[k];
            const StructuredRow& row = system.row(comp.row);
            const Vec y = row.project_y(x);
            double growth = comp.growth_known
                                ? st.constants[static_cast<size_t>(slots[k])] * row.g(y)
                                : ws_psi.forward(st.psi_nets[k].net, y)[0];
            preds[s][k] = growth + row.C(t, x) * ws_u.forward(st.u_nets[k].net, y)[0] +
                          row.d_value(t, x);
            refs[s][k] = data.derivatives[s][static_cast<size_t>(comp.row)];
        }
    }
    fit.metrics = evaluate_metrics(preds, refs);
    if (!data.times.empty()) {
        fit.time_lo = data.times.front();
        fit.time_hi = data.times.back();
    }
    return fit;
}

namespace {

// Everything needed to evaluate/differentiate the UPINN losses for one
// parameter state. Shared by the trainer and by loss_components.
struct UpinnEval {
    const StructuredSystem& system;
    const UnknownSpec& unknowns;
    const std::vector<int>& slots;
    double time_lo, time_hi;

    double t_norm(double t) const { return 2.0 * (t - time_lo) / (time_hi - time_lo) - 1.0; }
    double t_scale() const { return 2.0 / (time_hi - time_lo); }
};

}  // namespace

FitResult upinn_fit(const Trajectory& data, const StructuredSystem& system,
                    const UnknownSpec& unknowns, const TrainConfig& cfg) {
    if (data.size() < 2) throw DataError("upinn_fit: need at least two samples");
    if (cfg.omega_de > 0.0 && cfg.collocation_count <= 0) {
        throw ConfigError("upinn_fit: omega_de > 0 requires collocation points");
    }

    TrainState st = make_state(system, unknowns, cfg, true);
    const std::vector<int> slots = constant_slots(unknowns);
    const size_t m = data.size();
    const int n = system.n;
    const double time_lo = data.times.front();
    const double time_hi = data.times.back();
    UpinnEval ev{system, unknowns, slots, time_lo, time_hi};
    const double tscale = ev.t_scale();

    std::vector<double> colloc;
    if (cfg.omega_de > 0.0) {
        colloc.reserve(static_cast<size_t>(cfg.collocation_count));
        for (int i = 0; i < cfg.collocation_count; ++i) {
            const double a = cfg.collocation_count == 1
                                 ? 0.5
                                 : static_cast<double>(i) / (cfg.collocation_count - 1);
            colloc.push_back(time_lo + a * (time_hi - time_lo));
        }
    }
    const size_t nc = colloc.size();

    FitResult fit;
    fit.config = cfg;
    fit.time_lo = time_lo;
    fit.time_hi = time_hi;

    const double inv_data = 1.0 / static_cast<double>(m * static_cast<size_t>(n));
    const double inv_ode = nc == 0 ? 0.0 : 1.0 / static_cast<double>(nc * static_cast<size_t>(n));
    const size_t kcomp = unknowns.components.size();

    // Lookup: which unknown component (if any) drives each structured row.
    std::vector<int> comp_of_row(static_cast<size_t>(n), -1);
    for (size_t k = 0; k < kcomp; ++k) {
        comp_of_row[static_cast<size_t>(unknowns.components[k].row)] = static_cast<int>(k);
    }

    // Whole-batch sweeps: one workspace per network, normalized-time inputs
    // precomputed once.
    MlpBatchWorkspace bw_data, bw_coll;
    std::vector<MlpBatchWorkspace> bw_u(kcomp), bw_psi(kcomp);
    std::vector<double> t_data(m), t_coll(nc), ones_coll(nc, 1.0);
    for (size_t s = 0; s < m; ++s) t_data[s] = ev.t_norm(data.times[s]);
    for (size_t b = 0; b < nc; ++b) t_coll[b] = ev.t_norm(colloc[b]);

    std::vector<double> gy_data(static_cast<size_t>(n) * m);
    std::vector<double> gy(static_cast<size_t>(n) * nc), gydot(static_cast<size_t>(n) * nc);
    std::vector<std::vector<double>> u_in(kcomp), u_val(kcomp), u_seed(kcomp), psi_val(kcomp),
        psi_seed(kcomp);
    std::vector<double> gx_net;
    Vec xp(static_cast<size_t>(n)), y_val(1), grad_tmp(static_cast<size_t>(n)), dg_tmp;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double data_loss = 0.0, ode_loss = 0.0;

        // Data misfit on the observed samples, whole batch at once.
        const std::vector<double>& xd = bw_data.forward(st.traj.net, t_data, static_cast<int>(m));
        for (int r = 0; r < n; ++r) {
            const double* row = xd.data() + static_cast<size_t>(r) * m;
            double* g = gy_data.data() + static_cast<size_t>(r) * m;
            for (size_t s = 0; s < m; ++s) {
                const double e = row[s] - data.states[s][static_cast<size_t>(r)];
                data_loss += e * e * inv_data;
                g[s] = 2.0 * e * inv_data;
            }
        }
        bw_data.backward(st.traj.net, gy_data, st.traj.grad);

        // ODE residual at the collocation grid.
        if (nc > 0) {
            const std::vector<double>& xc =
                bw_coll.forward_with_tangent(st.traj.net, t_coll, ones_coll, static_cast<int>(nc));
            const std::vector<double>& tc_dot = bw_coll.output_tangents();
            std::fill(gy.begin(), gy.end(), 0.0);
            std::fill(gydot.begin(), gydot.end(), 0.0);

            // Unknown networks over the whole grid first.
            for (size_t k = 0; k < kcomp; ++k) {
                const UnknownComponent& comp = unknowns.components[k];
                const StructuredRow& row = system.row(comp.row);
                const size_t w = row.y_indices.size();
                u_in[k].resize(w * nc);
                for (size_t yi = 0; yi < w; ++yi) {
                    const double* src =
                        xc.data() + static_cast<size_t>(row.y_indices[yi]) * nc;
                    std::copy(src, src + nc, u_in[k].data() + yi * nc);
                }
                u_val[k] = bw_u[k].forward(st.u_nets[k].net, u_in[k], static_cast<int>(nc));
                u_seed[k].assign(nc, 0.0);
                if (!comp.growth_known) {
                    psi_val[k] =
                        bw_psi[k].forward(st.psi_nets[k].net, u_in[k], static_cast<int>(nc));
                    psi_seed[k].assign(nc, 0.0);
                }
            }

            for (size_t b = 0; b < nc; ++b) {
                const double tc = colloc[b];
                for (int r = 0; r < n; ++r) xp[static_cast<size_t>(r)] = xc[static_cast<size_t>(r) * nc + b];

                for (int r = 0; r < n; ++r) {
                    const double xdot_r = tc_dot[static_cast<size_t>(r) * nc + b] * tscale;
                    double f_r;
                    const int k = system.is_structured[static_cast<size_t>(r)]
                                      ? comp_of_row[static_cast<size_t>(r)]
                                      : -1;

                    if (!system.is_structured[static_cast<size_t>(r)]) {
                        f_r = system.known[static_cast<size_t>(r)].f(tc, xp);
                    } else if (k < 0) {
                        f_r = system.row(r).rhs_true(tc, xp);
                    } else {
                        const StructuredRow& row = system.row(r);
                        row.project_y_into(xp, y_val);
                        const double cval = row.C(tc, xp);
                        const double uval = u_val[static_cast<size_t>(k)][b];
                        const double growth =
                            unknowns.components[static_cast<size_t>(k)].growth_known
                                ? st.constants[static_cast<size_t>(slots[static_cast<size_t>(k)])] *
                                      row.g(y_val)
                                : psi_val[static_cast<size_t>(k)][b];
                        f_r = growth + cval * uval + row.d_value(tc, xp);
                    }

                    const double res = xdot_r - f_r;
                    ode_loss += res * res * inv_ode;
                    const double a = cfg.omega_de * 2.0 * res * inv_ode;  // dL/dres
                    gydot[static_cast<size_t>(r) * nc + b] += a * tscale;
                    const double gf = -a;  // dL/df_r

                    if (!system.is_structured[static_cast<size_t>(r)]) {
                        const auto& kr = system.known[static_cast<size_t>(r)];
                        if (!kr.df_dx) {
                            throw ConfigError("upinn_fit: known row lacks a state gradient");
                        }
                        kr.df_dx(tc, xp, grad_tmp);
                        for (int j = 0; j < n; ++j) {
                            gy[static_cast<size_t>(j) * nc + b] += gf * grad_tmp[static_cast<size_t>(j)];
                        }
                    } else if (k < 0) {
                        // Fully known structured row: differentiate its true parts.
                        const StructuredRow& row = system.row(r);
                        row.project_y_into(xp, y_val);
                        const double cval = row.C(tc, xp);
                        row.dC_dx(tc, xp, grad_tmp);
                        const double utrue = row.u_true(y_val);
                        for (int j = 0; j < n; ++j) {
                            gy[static_cast<size_t>(j) * nc + b] +=
                                gf * utrue * grad_tmp[static_cast<size_t>(j)];
                        }
                        const double h = 1e-6;
                        for (size_t yi = 0; yi < row.y_indices.size(); ++yi) {
                            Vec yp = y_val, ym = y_val;
                            yp[yi] += h;
                            ym[yi] -= h;
                            const double dfy = (row.true_growth(yp) + cval * row.u_true(yp) -
                                                row.true_growth(ym) - cval * row.u_true(ym)) /
                                               (2.0 * h);
                            gy[static_cast<size_t>(row.y_indices[yi]) * nc + b] += gf * dfy;
                        }
                        if (row.dd_dx) {
                            row.dd_dx(tc, xp, grad_tmp);
                            for (int j = 0; j < n; ++j) {
                                gy[static_cast<size_t>(j) * nc + b] +=
                                    gf * grad_tmp[static_cast<size_t>(j)];
                            }
                        }
                    } else {
                        const StructuredRow& row = system.row(r);
                        const UnknownComponent& comp = unknowns.components[static_cast<size_t>(k)];
                        row.project_y_into(xp, y_val);
                        const double cval = row.C(tc, xp);
                        const double uval = u_val[static_cast<size_t>(k)][b];

                        // C(x) contribution.
                        row.dC_dx(tc, xp, grad_tmp);
                        for (int j = 0; j < n; ++j) {
                            gy[static_cast<size_t>(j) * nc + b] +=
                                gf * uval * grad_tmp[static_cast<size_t>(j)];
                        }
                        // d(x) contribution.
                        if (row.dd_dx) {
                            row.dd_dx(tc, xp, grad_tmp);
                            for (int j = 0; j < n; ++j) {
                                gy[static_cast<size_t>(j) * nc + b] +=
                                    gf * grad_tmp[static_cast<size_t>(j)];
                            }
                        }
                        // u-net output adjoint; parameters and the input
                        // adjoint are pulled back after this loop.
                        u_seed[static_cast<size_t>(k)][b] = gf * cval;
                        // Growth term.
                        if (comp.growth_known) {
                            const double gval = row.g(y_val);
                            st.constant_grads[static_cast<size_t>(slots[static_cast<size_t>(k)])] +=
                                gf * gval;
                            Vec& dg = dg_tmp;
                            dg.resize(row.y_indices.size());
                            row.dg_dy(y_val, dg);
                            const double beta =
                                st.constants[static_cast<size_t>(slots[static_cast<size_t>(k)])];
                            for (size_t yi = 0; yi < row.y_indices.size(); ++yi) {
                                gy[static_cast<size_t>(row.y_indices[yi]) * nc + b] +=
                                    gf * beta * dg[yi];
                            }
                        } else {
                            psi_seed[static_cast<size_t>(k)][b] = gf;
                        }
                    }
                }
            }

            // Pull the network adjoints back onto parameters and xhat.
            for (size_t k = 0; k < kcomp; ++k) {
                const UnknownComponent& comp = unknowns.components[k];
                const StructuredRow& row = system.row(comp.row);
                bw_u[k].backward(st.u_nets[k].net, u_seed[k], st.u_nets[k].grad, &gx_net);
                for (size_t yi = 0; yi < row.y_indices.size(); ++yi) {
                    const double* src = gx_net.data() + yi * nc;
                    double* dst = gy.data() + static_cast<size_t>(row.y_indices[yi]) * nc;
                    for (size_t b = 0; b < nc; ++b) dst[b] += src[b];
                }
                if (!comp.growth_known) {
                    bw_psi[k].backward(st.psi_nets[k].net, psi_seed[k], st.psi_nets[k].grad,
                                       &gx_net);
                    for (size_t yi = 0; yi < row.y_indices.size(); ++yi) {
                        const double* src = gx_net.data() + yi * nc;
                        double* dst = gy.data() + static_cast<size_t>(row.y_indices[yi]) * nc;
                        for (size_t b = 0; b < nc; ++b) dst[b] += src[b];
                    }
                }
            }
            bw_coll.backward_with_tangent(st.traj.net, gy, gydot, st.traj.grad);
        }

        const double total = data_loss + cfg.omega_de * ode_loss;
        if (!std::isfinite(total)) {
            throw DivergenceError("upinn_fit: non-finite loss at epoch " + std::to_string(epoch),
                                  epoch);
        }
        fit.loss_total.push_back(total);
        fit.loss_data.push_back(data_loss);
        fit.loss_ode.push_back(ode_loss);
        st.step(cfg.learning_rate);
        fit.epochs_run = epoch + 1;
        if (plateaued(fit.loss_total, cfg.plateau_window, cfg.plateau_rel_tol)) break;
    }

    fill_result(fit, st, unknowns);

    // Metrics: trajectory-net outputs against the training samples.
    std::vector<Vec> preds(m);
    for (size_t s = 0; s < m; ++s) {
        preds[s] = ad::mlp_forward(st.traj.net, {ev.t_norm(data.times[s])});
    }
    fit.metrics = evaluate_metrics(preds, data.states);
    return fit;
}

std::pair<double, double> loss_components(const FitResult& state, const Trajectory& data,
                                          const StructuredSystem& system,
                                          const std::vector<double>& collocation_times,
                                          double omega_de) {
    if (!state.has_trajectory_net) {
        throw UsageError("loss_components: state has no trajectory network");
    }
    if (omega_de > 0.0 && collocation_times.empty()) {
        throw ConfigError("loss_components: omega_de > 0 requires collocation points");
    }
    MlpWorkspace ws_traj, ws_net;
    const size_t m = data.size();
    const int n = system.n;
    const double tscale = 2.0 / (state.time_hi - state.time_lo);
    auto t_norm = [&](double t) {
        return 2.0 * (t - state.time_lo) / (state.time_hi - state.time_lo) - 1.0;
    };

    double data_loss = 0.0;
    for (size_t s = 0; s < m; ++s) {
        const Vec xhat = ws_traj.forward(state.trajectory_net, {t_norm(data.times[s])});
        for (int r = 0; r < n; ++r) {
            const double e = xhat[static_cast<size_t>(r)] - data.states[s][static_cast<size_t>(r)];
            data_loss += e * e / static_cast<double>(m * static_cast<size_t>(n));
        }
    }

    double ode_loss = 0.0;
    if (!collocation_times.empty()) {
        // FitResult stores nets ordered as in the UnknownSpec that produced
        // it; here we key by the system's structured rows in order.
        std::vector<int> comp_of_row(static_cast<size_t>(n), -1);
        for (size_t k = 0; k < state.u_nets.size() && k < system.structured.size(); ++k) {
            comp_of_row[static_cast<size_t>(system.structured[k].q)] = static_cast<int>(k);
        }
        std::vector<double> betas;
        for (const auto& [name, c] : state.constants) betas.push_back(c.fitted);

        Vec ydot;
        size_t beta_pos = 0;
        std::vector<double> beta_of_comp(state.u_nets.size(), 0.0);
        for (size_t k = 0; k < state.u_nets.size(); ++k) {
            const bool growth_known =
                k >= state.psi_nets.size() || state.psi_nets[k].layer_sizes.empty();
            if (growth_known && beta_pos < betas.size()) beta_of_comp[k] = betas[beta_pos++];
        }

        for (double tc : collocation_times) {
            const Vec xhat =
                ws_traj.forward_with_tangent(state.trajectory_net, {t_norm(tc)}, {1.0}, &ydot);
            for (int r = 0; r < n; ++r) {
                const double xdot_r = ydot[static_cast<size_t>(r)] * tscale;
                double f_r;
                const int k = system.is_structured[static_cast<size_t>(r)] ? comp_of_row[static_cast<size_t>(r)] : -1;
                if (!system.is_structured[static_cast<size_t>(r)]) {
                    f_r = system.known[static_cast<size_t>(r)].f(tc, xhat);
                } else if (k < 0) {
                    f_r = system.row(r).rhs_true(tc, xhat);
                } else {
                    const StructuredRow& row = system.row(r);
                    const Vec y = row.project_y(xhat);
                    const double uval = ws_net.forward(state.u_nets[static_cast<size_t>(k)], y)[0];
                    const bool growth_known = state.psi_nets[static_cast<size_t>(k)].layer_sizes.empty();
                    const double growth =
                        growth_known ? beta_of_comp[static_cast<size_t>(k)] * row.g(y)
                                     : ws_net.forward(state.psi_nets[static_cast<size_t>(k)], y)[0];
                    f_r = growth + row.C(tc, xhat) * uval + row.d_value(tc, xhat);
                }
                const double res = xdot_r - f_r;
                ode_loss += res * res /
                            static_cast<double>(collocation_times.size() * static_cast<size_t>(n));
            }
        }
    }
    return {data_loss, ode_loss};
}

Metrics evaluate_metrics(const std::vector<Vec>& predictions, const std::vector<Vec>& reference) {
    if (reference.empty()) throw UsageError("evaluate_metrics: empty reference");
    if (predictions.size() != reference.size()) {
        throw ShapeError("evaluate_metrics: prediction/reference lengths differ");
    }
    const size_t m = reference.size();
    const size_t k = reference.front().size();

    Metrics out;
    double sse = 0.0;
    double mape_sum = 0.0;
    size_t mape_count = 0;
    double r2_sum = 0.0;

    for (size_t c = 0; c < k; ++c) {
        double mean = 0.0;
        for (size_t s = 0; s < m; ++s) mean += reference[s][c];
        mean /= static_cast<double>(m);
        double ss_res = 0.0, ss_tot = 0.0;
        for (size_t s = 0; s < m; ++s) {
            const double e = predictions[s][c] - reference[s][c];
            ss_res += e * e;
            const double d = reference[s][c] - mean;
            ss_tot += d * d;
            sse += e * e;
            if (std::abs(reference[s][c]) >= 1e-12) {
                mape_sum += std::abs(e / reference[s][c]) * 100.0;
                ++mape_count;
            } else {
                ++out.mape_skipped;
            }
        }
        if (ss_tot > 0.0) {
            r2_sum += 1.0 - ss_res / ss_tot;
        } else {
            r2_sum += (ss_res == 0.0) ? 1.0 : 0.0;
        }
    }
    out.mse = sse / static_cast<double>(m * k);
    out.r2 = r2_sum / static_cast<double>(k);
    out.mape = mape_count > 0 ? mape_sum / static_cast<double>(mape_count) : 0.0;
    return out;
}

Metrics evaluate_metrics(const std::vector<double>& predictions,
                         const std::vector<double>& reference) {
    std::vector<Vec> p(predictions.size()), r(reference.size());
    for (size_t i = 0; i < predictions.size(); ++i) p[i] = {predictions[i]};
    for (size_t i = 0; i < reference.size(); ++i) r[i] = {reference[i]};
    return evaluate_metrics(p, r);
}

Vec predict_trajectory(const FitResult& fit, double t) {
    if (!fit.has_trajectory_net) {
        throw UsageError("predict_trajectory: fit has no trajectory network");
    }
    const double tn = 2.0 * (t - fit.time_lo) / (fit.time_hi - fit.time_lo) - 1.0;
    return ad::mlp_forward(fit.trajectory_net, {tn});
}

nlohmann::json fit_result_to_json(const FitResult& fit) {
    nlohmann::json j;
    nlohmann::json consts = nlohmann::json::object();
    for (const auto& [name, c] : fit.constants) {
        consts[name] = {{"initial", c.initial}, {"fitted", c.fitted}};
    }
    j["constants"] = consts;
    j["epochs_run"] = fit.epochs_run;
    j["final_loss"] = {{"total", fit.loss_total.empty() ? 0.0 : fit.loss_total.back()},
                       {"data", fit.loss_data.empty() ? 0.0 : fit.loss_data.back()},
                       {"ode", fit.loss_ode.empty() ? 0.0 : fit.loss_ode.back()}};
    j["metrics"] = {{"mse", fit.metrics.mse},
                    {"r2", fit.metrics.r2},
                    {"mape", fit.metrics.mape},
                    {"mape_skipped", fit.metrics.mape_skipped}};
    j["config"] = {{"learning_rate", fit.config.learning_rate},
                   {"epochs", fit.config.epochs},
                   {"omega_de", fit.config.omega_de},
                   {"collocation_count", fit.config.collocation_count},
                   {"seed", fit.config.seed}};
    return j;
}

std::string loss_history_csv(const FitResult& fit) {
    std::ostringstream ss;
    ss << "epoch,total,data,ode\n";
    char buf[96];
    for (size_t e = 0; e < fit.loss_total.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e, fit.loss_total[e],
                      fit.loss_data[e], fit.loss_ode[e]);
        ss << buf;
    }
    return ss.str();
}

}  // namespace uniqode::training
