#ifndef UNIQODE_EXPERIMENTS_HPP
#define UNIQODE_EXPERIMENTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uniqode/ode.hpp"
#include "uniqode/training.hpp"

namespace uniqode::experiments {

enum class Case {
    Case1UN,   // chemo injection, u*(N) = N, direct fit
    Case1UN2,  // chemo injection, u*(N) = N^2, direct fit
    Case2,     // unknown growth chemo, direct fit
    Case3,     // Lotka-Volterra, direct fit
    Case4,     // Lotka-Volterra UPINN (noise study)
    Case5,     // scaled-injection chemo UPINN (dataset-length study)
};

Case case_from_name(const std::string& name);
std::string case_name(Case c);

// Knobs a caller may override; everything unset falls back to the case's
// defaults.
struct Overrides {
    std::optional<int> epochs;
    std::optional<double> learning_rate;
    std::optional<double> omega_de;
    std::optional<int> collocation_count;
    std::optional<std::uint64_t> seed;
    std::optional<size_t> dataset_length;
    std::optional<double> noise_fraction;
    std::optional<int> plateau_window;
};

struct FunctionComparison {
    std::string name;                      // e.g. "u", "psi", "beta_x"
    std::vector<double> grid;              // y values (observed range only)
    std::vector<double> truth, predicted;
};

struct ConstantRow {
    std::string name;
    double true_value = 0.0;
    double predicted = 0.0;
    double percent_error = 0.0;
};

struct CaseReport {
    std::string case_id;
    nlohmann::json config_echo;
    std::vector<ConstantRow> constants;
    double data_loss = 0.0, ode_loss = 0.0, total_loss = 0.0;
    double r2 = 0.0, mape = 0.0;
    double wall_seconds = 0.0;
    std::vector<FunctionComparison> functions;
    training::FitResult fit;
};

CaseReport run_case(Case c, const Overrides& overrides = {});

// Case 4 at each noise level; one report per (level, seed).
std::vector<CaseReport> sweep_noise(const std::vector<double>& levels,
                                    const std::vector<std::uint64_t>& seeds,
                                    const Overrides& overrides = {});

// Case 5 at each dataset length, identical seed per row.
std::vector<CaseReport> sweep_length(const std::vector<size_t>& lengths,
                                     const Overrides& overrides = {});

// Table-style CSV (columns as in the noise/length result tables).
std::string noise_table_csv(const std::vector<CaseReport>& reports,
                            const std::vector<double>& levels);
std::string length_table_csv(const std::vector<CaseReport>& reports,
                             const std::vector<size_t>& lengths);
std::string function_comparison_csv(const FunctionComparison& fc);
nlohmann::json case_report_to_json(const CaseReport& report);

}  // namespace uniqode::experiments

#endif
