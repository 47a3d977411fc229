#include "uniqode/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace uniqode::experiments {

using ode::BuiltinCase;
using ode::StructuredSystem;
using ode::Trajectory;
using ode::Vec;
using training::FitResult;
using training::TrainConfig;
using training::UnknownComponent;
using training::UnknownSpec;

Case case_from_name(const std::string& name) {
    if (name == "case1" || name == "case1_u_n") return Case::Case1UN;
    if (name == "case1_u_n2") return Case::Case1UN2;
    if (name == "case2") return Case::Case2;
    if (name == "case3") return Case::Case3;
    if (name == "case4") return Case::Case4;
    if (name == "case5") return Case::Case5;
    throw ConfigError("unknown case id: " + name);
}

std::string case_name(Case c) {
    switch (c) {
        case Case::Case1UN: return "case1_u_n";
        case Case::Case1UN2: return "case1_u_n2";
        case Case::Case2: return "case2";
        case Case::Case3: return "case3";
        case Case::Case4: return "case4";
        case Case::Case5: return "case5";
    }
    throw ConfigError("unknown case");
}

namespace {

constexpr size_t kDirectSamples = 256;
constexpr size_t kNoiseSamples = 256;
constexpr int kComparisonGrid = 200;

struct CaseSetup {
    StructuredSystem system;
    Trajectory data;          // training data
    Trajectory clean_data;    // same sampling, no noise
    UnknownSpec unknowns;
    TrainConfig cfg;
    bool upinn = false;
};

TrainConfig base_config(const Overrides& ov, int default_epochs, double default_omega,
                        int default_colloc, int default_plateau) {
    TrainConfig cfg;
    cfg.epochs = ov.epochs.value_or(default_epochs);
    cfg.learning_rate = ov.learning_rate.value_or(1e-3);
    cfg.omega_de = ov.omega_de.value_or(default_omega);
    cfg.collocation_count = ov.collocation_count.value_or(default_colloc);
    cfg.seed = ov.seed.value_or(0);
    cfg.plateau_window = ov.plateau_window.value_or(default_plateau);
    return cfg;
}

CaseSetup make_setup(Case c, const Overrides& ov) {
    CaseSetup s;
    switch (c) {
        case Case::Case1UN:
        case Case::Case1UN2: {
            s.system = ode::builtin_system(BuiltinCase::ChemoInjection);
            if (c == Case::Case1UN2) {
                s.system.structured[0].u_true = [](const Vec& y) { return y[0] * y[0]; };
            }
            s.data = ode::sample_dataset(ode::rk4_integrate(s.system),
                                         ov.dataset_length.value_or(kDirectSamples));
            s.clean_data = s.data;
            UnknownComponent comp;
            comp.row = 0;
            comp.constant_name = "beta";
            comp.constant_initial = 2.0;
            s.unknowns.components = {comp};
            s.cfg = base_config(ov, 10000, 0.0, 0, 0);
            break;
        }
        case Case::Case2: {
            s.system = ode::builtin_system(BuiltinCase::ChemoUnknownGrowth);
            s.data = ode::sample_dataset(ode::rk4_integrate(s.system),
                                         ov.dataset_length.value_or(kDirectSamples));
            s.clean_data = s.data;
            UnknownComponent comp;
            comp.row = 0;
            comp.growth_known = false;
            s.unknowns.components = {comp};
            s.cfg = base_config(ov, 10000, 0.0, 0, 0);
            break;
        }
        case Case::Case3: {
            s.system = ode::builtin_system(BuiltinCase::LotkaVolterra);
            s.data = ode::sample_dataset(ode::rk4_integrate(s.system),
                                         ov.dataset_length.value_or(kDirectSamples));
            s.clean_data = s.data;
            UnknownComponent prey;
            prey.row = 0;
            prey.constant_name = "alpha";
            prey.constant_initial = 2.0;
            UnknownComponent predator;
            predator.row = 1;
            predator.constant_name = "gamma";
            predator.constant_initial = 2.0;
            s.unknowns.components = {prey, predator};
            s.cfg = base_config(ov, 15000, 0.0, 0, 0);
            break;
        }
        case Case::Case4: {
            s.system = ode::builtin_system(BuiltinCase::LotkaVolterra);
            s.cfg = base_config(ov, 20000, 0.1, 1024, 500);
            s.clean_data = ode::sample_dataset(ode::rk4_integrate(s.system),
                                               ov.dataset_length.value_or(kNoiseSamples));
            ode::NoiseSpec noise;
            noise.fraction = ov.noise_fraction.value_or(0.0);
            noise.seed = s.cfg.seed + 500;
            s.data = ode::inject_noise(s.clean_data, noise);
            s.data.has_derivatives = false;
            s.data.derivatives.clear();
            UnknownComponent prey;
            prey.row = 0;
            prey.constant_name = "alpha";
            prey.constant_initial = 1.5;
            UnknownComponent predator;
            predator.row = 1;
            predator.constant_name = "gamma";
            predator.constant_initial = 0.5;
            s.unknowns.components = {prey, predator};
            s.unknowns.trajectory_net_shape = {1, 20, 20, 20, 20, 2};
            s.upinn = true;
            break;
        }
        case Case::Case5: {
            s.system = ode::builtin_system(BuiltinCase::ChemoScaledInjection);
            // Short datasets converge slowly; the plateau heuristic fires
            // long before the growth constant settles, so it stays off here.
            s.cfg = base_config(ov, 50000, 0.001, 1024, 0);
            s.clean_data = ode::sample_dataset(ode::rk4_integrate(s.system),
                                               ov.dataset_length.value_or(1024));
            s.data = s.clean_data;
            s.data.has_derivatives = false;
            s.data.derivatives.clear();
            UnknownComponent comp;
            comp.row = 0;
            comp.constant_name = "beta";
            comp.constant_initial = 1.5;
            comp.u_net_shape = {1, 10, 10, 1};
            s.unknowns.components = {comp};
            s.unknowns.trajectory_net_shape = {1, 20, 20, 20, 2};
            s.upinn = true;
            break;
        }
    }
    return s;
}

// 200 uniform points over the y-range observed in training; no
// extrapolation beyond it.
std::vector<double> observed_grid(const Trajectory& data, int y_index) {
    double lo = data.states.front()[static_cast<size_t>(y_index)];
    double hi = lo;
    for (const Vec& x : data.states) {
        lo = std::min(lo, x[static_cast<size_t>(y_index)]);
        hi = std::max(hi, x[static_cast<size_t>(y_index)]);
    }
    std::vector<double> grid(kComparisonGrid);
    for (int i = 0; i < kComparisonGrid; ++i) {
        grid[static_cast<size_t>(i)] = lo + (hi - lo) * i / (kComparisonGrid - 1);
    }
    return grid;
}

double percent_error(double predicted, double truth) {
    return 100.0 * std::abs(predicted - truth) / std::abs(truth);
}

}  // namespace

CaseReport run_case(Case c, const Overrides& overrides) {
    const auto t_start = std::chrono::steady_clock::now();
    CaseSetup s = make_setup(c, overrides);

    FitResult fit = s.upinn ? training::upinn_fit(s.data, s.system, s.unknowns, s.cfg)
                            : training::direct_fit(s.data, s.system, s.unknowns, s.cfg);

    CaseReport report;
    report.case_id = case_name(c);
    report.fit = fit;
    report.config_echo = {{"case", report.case_id},
                          {"seed", s.cfg.seed},
                          {"epochs", s.cfg.epochs},
                          {"epochs_run", fit.epochs_run},
                          {"learning_rate", s.cfg.learning_rate},
                          {"omega_de", s.cfg.omega_de},
                          {"collocation_count", s.cfg.collocation_count},
                          {"dataset_length", s.data.size()},
                          {"noise_fraction", overrides.noise_fraction.value_or(0.0)}};
    report.total_loss = fit.loss_total.empty() ? 0.0 : fit.loss_total.back();
    report.data_loss = fit.loss_data.empty() ? 0.0 : fit.loss_data.back();
    report.ode_loss = fit.loss_ode.empty() ? 0.0 : fit.loss_ode.back();

    // Constants with percent errors against the generating values.
    for (size_t k = 0; k < s.unknowns.components.size(); ++k) {
        const UnknownComponent& comp = s.unknowns.components[k];
        if (!comp.growth_known) continue;
        const double truth = s.system.row(comp.row).beta_true;
        const double predicted = fit.constants.at(comp.constant_name).fitted;
        report.constants.push_back(
            {comp.constant_name, truth, predicted, percent_error(predicted, truth)});
    }

    // Evaluation metrics against noiseless ground truth.
    if (s.upinn) {
        std::vector<Vec> preds(s.clean_data.size());
        for (size_t i = 0; i < s.clean_data.size(); ++i) {
            preds[i] = training::predict_trajectory(fit, s.clean_data.times[i]);
        }
        const training::Metrics m = training::evaluate_metrics(preds, s.clean_data.states);
        report.r2 = m.r2;
        report.mape = m.mape;
    } else {
        report.r2 = fit.metrics.r2;
        report.mape = fit.metrics.mape;
    }

    // True-vs-predicted unknown functions on the observed y range.
    ad::MlpWorkspace ws;
    for (size_t k = 0; k < s.unknowns.components.size(); ++k) {
        const UnknownComponent& comp = s.unknowns.components[k];
        const ode::StructuredRow& row = s.system.row(comp.row);
        const int y_index = row.y_indices.front();
        const std::vector<double> grid = observed_grid(s.data, y_index);

        FunctionComparison ufc;
        ufc.name = (c == Case::Case3 || c == Case::Case4)
                       ? (comp.row == 0 ? "beta_x" : "delta_y")
                       : "u";
        ufc.grid = grid;
        for (double y : grid) {
            ufc.truth.push_back(row.u_true({y}));
            ufc.predicted.push_back(ws.forward(fit.u_nets[k], {y})[0]);
        }
        report.functions.push_back(std::move(ufc));

        if (!comp.growth_known) {
            FunctionComparison pfc;
            pfc.name = "psi";
            pfc.grid = grid;
            for (double y : grid) {
                pfc.truth.push_back(row.psi_true({y}));
                pfc.predicted.push_back(ws.forward(fit.psi_nets[k], {y})[0]);
            }
            report.functions.push_back(std::move(pfc));
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

std::vector<CaseReport> sweep_noise(const std::vector<double>& levels,
                                    const std::vector<std::uint64_t>& seeds,
                                    const Overrides& overrides) {
    std::vector<CaseReport> reports;
    for (double level : levels) {
        if (level < 0.0 || level > 1.0) {
            throw ConfigError("sweep_noise: levels must lie in [0,1]");
        }
        for (std::uint64_t seed : seeds) {
            Overrides ov = overrides;
            ov.noise_fraction = level;
            ov.seed = seed;
            reports.push_back(run_case(Case::Case4, ov));
        }
    }
    return reports;
}

std::vector<CaseReport> sweep_length(const std::vector<size_t>& lengths,
                                     const Overrides& overrides) {
    std::vector<CaseReport> reports;
    for (size_t len : lengths) {
        if (len < 1) throw ConfigError("sweep_length: lengths must be >= 1");
        Overrides ov = overrides;
        ov.dataset_length = len;
        reports.push_back(run_case(Case::Case5, ov));
    }
    return reports;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double constant_value(const CaseReport& r, const std::string& name) {
    for (const auto& c : r.constants)
        if (c.name == name) return c.predicted;
    throw UsageError("report has no constant named " + name);
}

double constant_error(const CaseReport& r, const std::string& name) {
    for (const auto& c : r.constants)
        if (c.name == name) return c.percent_error;
    throw UsageError("report has no constant named " + name);
}

}  // namespace

std::string noise_table_csv(const std::vector<CaseReport>& reports,
                            const std::vector<double>& levels) {
    if (levels.empty() || reports.size() % levels.size() != 0) {
        throw UsageError("noise_table_csv: reports do not tile the level list");
    }
    const size_t per_level = reports.size() / levels.size();
    std::ostringstream ss;
    ss << "noise,pred_alpha,pred_gamma,alpha_pct_error,gamma_pct_error,"
          "data_loss,ode_loss,r2,mape\n";
    char buf[256];
    for (size_t li = 0; li < levels.size(); ++li) {
        std::vector<double> a, g, ae, ge, dl, ol, r2, mp;
        for (size_t s = 0; s < per_level; ++s) {
            const CaseReport& r = reports[li * per_level + s];
            a.push_back(constant_value(r, "alpha"));
            g.push_back(constant_value(r, "gamma"));
            ae.push_back(constant_error(r, "alpha"));
            ge.push_back(constant_error(r, "gamma"));
            dl.push_back(r.data_loss);
            ol.push_back(r.ode_loss);
            r2.push_back(r.r2);
            mp.push_back(r.mape);
        }
        std::snprintf(buf, sizeof buf, "%g,%.6g,%.6g,%.5g,%.5g,%.4g,%.4g,%.7g,%.5g\n",
                      levels[li] * 100.0, median(a), median(g), median(ae), median(ge),
                      median(dl), median(ol), median(r2), median(mp));
        ss << buf;
    }
    return ss.str();
}

std::string length_table_csv(const std::vector<CaseReport>& reports,
                             const std::vector<size_t>& lengths) {
    if (reports.size() != lengths.size()) {
        throw UsageError("length_table_csv: one report per length expected");
    }
    std::ostringstream ss;
    ss << "length,pred_beta,beta_pct_error,data_loss,ode_loss,r2,mape\n";
    char buf[256];
    for (size_t i = 0; i < lengths.size(); ++i) {
        const CaseReport& r = reports[i];
        std::snprintf(buf, sizeof buf, "%zu,%.6g,%.5g,%.4g,%.4g,%.7g,%.5g\n", lengths[i],
                      constant_value(r, "beta"), constant_error(r, "beta"), r.data_loss,
                      r.ode_loss, r.r2, r.mape);
        ss << buf;
    }
    return ss.str();
}

std::string function_comparison_csv(const FunctionComparison& fc) {
    std::ostringstream ss;
    ss << "y,true,predicted\n";
    char buf[128];
    for (size_t i = 0; i < fc.grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", fc.grid[i], fc.truth[i],
                      fc.predicted[i]);
        ss << buf;
    }
    return ss.str();
}

nlohmann::json case_report_to_json(const CaseReport& report) {
    nlohmann::json j;
    j["case"] = report.case_id;
    j["config"] = report.config_echo;
    nlohmann::json consts = nlohmann::json::array();
    for (const auto& c : report.constants) {
        consts.push_back({{"name", c.name},
                          {"true", c.true_value},
                          {"predicted", c.predicted},
                          {"percent_error", c.percent_error}});
    }
    j["constants"] = consts;
    j["losses"] = {{"total", report.total_loss},
                   {"data", report.data_loss},
                   {"ode", report.ode_loss}};
    j["metrics"] = {{"r2", report.r2}, {"mape", report.mape}};
    j["wall_seconds"] = report.wall_seconds;
    return j;
}

}  // namespace uniqode::experiments
