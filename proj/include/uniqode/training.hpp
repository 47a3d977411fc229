#ifndef UNIQODE_TRAINING_HPP
#define UNIQODE_TRAINING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "uniqode/mlp.hpp"
#include "uniqode/ode.hpp"

namespace uniqode::training {

using ode::StructuredSystem;
using ode::Trajectory;
using ode::Vec;

// What is unknown in one structured row and how to parameterize it.
struct UnknownComponent {
    int row = 0;
    bool growth_known = true;           // true: trainable constant + known g
    std::string constant_name = "beta"; // reported name of the trainable constant
    double constant_initial = 1.0;
    std::vector<int> u_net_shape = {1, 20, 20, 20, 20, 1};
    std::vector<int> psi_net_shape = {1, 20, 20, 20, 20, 1};  // growth unknown only
};

struct UnknownSpec {
    std::vector<UnknownComponent> components;
    std::vector<int> trajectory_net_shape;  // UPINN only; {} -> [1,20,20,20,20,n]
};

struct TrainConfig {
    double learning_rate = 1e-3;
    int epochs = 1000;
    double omega_de = 0.1;
    int collocation_count = 1024;
    std::uint64_t seed = 0;
    // Early stop: quit once the total loss improves by less than
    // plateau_rel_tol (relatively) over plateau_window epochs. Window <= 0
    // disables it.
    int plateau_window = 0;
    double plateau_rel_tol = 1e-6;
};

struct Metrics {
    double mse = 0.0;
    double r2 = 0.0;
    double mape = 0.0;
    size_t mape_skipped = 0;  // reference entries with |ref| < 1e-12
};

struct ConstantResult {
    double initial = 0.0;
    double fitted = 0.0;
};

struct FitResult {
    std::map<std::string, ConstantResult> constants;
    std::vector<ad::Mlp> u_nets;    // one per unknown component
    std::vector<ad::Mlp> psi_nets;  // empty slots for growth-known components
    ad::Mlp trajectory_net;         // UPINN only
    bool has_trajectory_net = false;
    std::vector<double> loss_total, loss_data, loss_ode;
    int epochs_run = 0;
    Metrics metrics;
    TrainConfig config;
    // Time window used for the trajectory net's input normalization.
    double time_lo = 0.0, time_hi = 1.0;
};

// Residual regression against exact derivatives (the theorems' regime):
// minimizes the mean squared residual of each structured row.
FitResult direct_fit(const Trajectory& data, const StructuredSystem& system,
                     const UnknownSpec& unknowns, const TrainConfig& cfg);

// Full UPINN: a trajectory network fits the samples while the ODE residual,
// with d/dt obtained by differentiating that network, constrains the unknown
// constants and networks. Loss = data + omega_de * ode.
FitResult upinn_fit(const Trajectory& data, const StructuredSystem& system,
                    const UnknownSpec& unknowns, const TrainConfig& cfg);

// Pure evaluation of (data_loss, ode_loss) for a trained/initialized UPINN
// state; no optimizer step.
std::pair<double, double> loss_components(const FitResult& state, const Trajectory& data,
                                          const StructuredSystem& system,
                                          const std::vector<double>& collocation_times,
                                          double omega_de);

Metrics evaluate_metrics(const std::vector<Vec>& predictions, const std::vector<Vec>& reference);
Metrics evaluate_metrics(const std::vector<double>& predictions,
                         const std::vector<double>& reference);

// Trajectory-network prediction at time t (handles the internal time
// normalization).
Vec predict_trajectory(const FitResult& fit, double t);

nlohmann::json fit_result_to_json(const FitResult& fit);
std::string loss_history_csv(const FitResult& fit);

}  // namespace uniqode::training

#endif
