// Command-line front end: simulation, identification, error bounds, fitting,
// and table reproduction over JSON configs and CSV data files.
//
// Exit codes: 0 success, 2 configuration error, 3 identifiability failure,
// 4 data error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uniqode/errors.hpp"
#include "uniqode/experiments.hpp"
#include "uniqode/identify.hpp"
#include "uniqode/ode.hpp"
#include "uniqode/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIdentify = 3;
constexpr int kExitData = 4;

// ---------------------------------------------------------------------------
// Config plumbing

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    if (!obj.is_object()) {
        throw uniqode::ConfigError(where + ": expected a JSON object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) ok = true;
        if (!ok) {
            throw uniqode::ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw uniqode::ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::parse_error& e) {
        throw uniqode::ConfigError("config " + path + ": " + e.what());
    }
    reject_unknown_keys(cfg, {"system", "data", "unknowns", "train", "identify"}, path);
    return cfg;
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw uniqode::ConfigError("config key \"" + key + "\": " + e.what());
    }
}

// Seed precedence: UNIQODE_SEED env > --seed flag > config value.
std::optional<std::uint64_t> seed_override(const std::optional<std::uint64_t>& flag_seed) {
    if (const char* env = std::getenv("UNIQODE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw uniqode::ConfigError("UNIQODE_SEED is not an integer: " + std::string(env));
        }
    }
    return flag_seed;
}

uniqode::ode::StructuredSystem system_from_config(const json& cfg) {
    if (!cfg.contains("system")) {
        throw uniqode::ConfigError("config: missing \"system\" section");
    }
    const json& sys = cfg.at("system");
    uniqode::ode::StructuredSystem system;
    if (sys.is_string()) {
        system = uniqode::ode::builtin_system(
            uniqode::ode::builtin_case_from_name(sys.get<std::string>()));
    } else {
        reject_unknown_keys(sys, {"builtin", "x0", "t0", "t1", "dt"}, "system");
        if (!sys.contains("builtin")) {
            throw uniqode::ConfigError("system: \"builtin\" name is required");
        }
        system = uniqode::ode::builtin_system(
            uniqode::ode::builtin_case_from_name(sys.at("builtin").get<std::string>()));
        if (sys.contains("x0")) system.x0 = sys.at("x0").get<uniqode::ode::Vec>();
        system.t0 = get_or(sys, "t0", system.t0);
        system.t1 = get_or(sys, "t1", system.t1);
        system.dt = get_or(sys, "dt", system.dt);
    }
    return system;
}

struct DataSpec {
    std::optional<size_t> samples;
    uniqode::ode::NoiseSpec noise;
};

DataSpec data_from_config(const json& cfg, uniqode::ode::StructuredSystem& system,
                          const std::optional<std::uint64_t>& seed) {
    DataSpec spec;
    if (!cfg.contains("data")) return spec;
    const json& data = cfg.at("data");
    reject_unknown_keys(data, {"t0", "t1", "dt", "samples", "noise"}, "data");
    system.t0 = get_or(data, "t0", system.t0);
    system.t1 = get_or(data, "t1", system.t1);
    system.dt = get_or(data, "dt", system.dt);
    if (data.contains("samples")) spec.samples = data.at("samples").get<size_t>();
    if (data.contains("noise")) {
        const json& noise = data.at("noise");
        reject_unknown_keys(noise, {"fraction", "seed"}, "data.noise");
        spec.noise.fraction = get_or(noise, "fraction", 0.0);
        spec.noise.seed = get_or<std::uint64_t>(noise, "seed", 0);
    }
    if (seed) spec.noise.seed = *seed;
    return spec;
}

uniqode::training::UnknownSpec unknowns_from_config(const json& cfg) {
    uniqode::training::UnknownSpec spec;
    if (!cfg.contains("unknowns")) {
        uniqode::training::UnknownComponent comp;
        spec.components = {comp};
        return spec;
    }
    const json& unk = cfg.at("unknowns");
    reject_unknown_keys(unk, {"components", "trajectory_net_shape"}, "unknowns");
    if (unk.contains("trajectory_net_shape")) {
        spec.trajectory_net_shape = unk.at("trajectory_net_shape").get<std::vector<int>>();
    }
    if (!unk.contains("components")) {
        throw uniqode::ConfigError("unknowns: \"components\" list is required");
    }
    for (const json& jc : unk.at("components")) {
        reject_unknown_keys(jc,
                            {"row", "growth_known", "constant_name", "constant_initial",
                             "u_net_shape", "psi_net_shape"},
                            "unknowns.components[]");
        uniqode::training::UnknownComponent comp;
        comp.row = get_or(jc, "row", 0);
        comp.growth_known = get_or(jc, "growth_known", true);
        comp.constant_name = get_or<std::string>(jc, "constant_name", "beta");
        comp.constant_initial = get_or(jc, "constant_initial", 1.0);
        if (jc.contains("u_net_shape"))
            comp.u_net_shape = jc.at("u_net_shape").get<std::vector<int>>();
        if (jc.contains("psi_net_shape"))
            comp.psi_net_shape = jc.at("psi_net_shape").get<std::vector<int>>();
        spec.components.push_back(comp);
    }
    return spec;
}

uniqode::training::TrainConfig train_from_config(const json& cfg,
                                                 const std::optional<std::uint64_t>& seed) {
    uniqode::training::TrainConfig train;
    if (cfg.contains("train")) {
        const json& t = cfg.at("train");
        reject_unknown_keys(t,
                            {"learning_rate", "epochs", "omega_de", "collocation", "seed",
                             "plateau_window", "plateau_rel_tol"},
                            "train");
        train.learning_rate = get_or(t, "learning_rate", train.learning_rate);
        train.epochs = get_or(t, "epochs", train.epochs);
        train.omega_de = get_or(t, "omega_de", train.omega_de);
        train.collocation_count = get_or(t, "collocation", train.collocation_count);
        train.seed = get_or<std::uint64_t>(t, "seed", train.seed);
        train.plateau_window = get_or(t, "plateau_window", train.plateau_window);
        train.plateau_rel_tol = get_or(t, "plateau_rel_tol", train.plateau_rel_tol);
    }
    if (seed) train.seed = *seed;
    return train;
}

struct IdentifySpec {
    double d_tol = 1e-9;
    int q = -1;  // -1: first structured row
    std::optional<double> lipschitz_u;
    std::optional<double> lipschitz_g;
    std::optional<double> d_used;
    uniqode::identify::FormulaVariant variant = uniqode::identify::FormulaVariant::Verbatim;
};

IdentifySpec identify_from_config(const json& cfg, const std::string& variant_flag) {
    IdentifySpec spec;
    if (cfg.contains("identify")) {
        const json& id = cfg.at("identify");
        reject_unknown_keys(
            id, {"d_tol", "q", "lipschitz_u", "lipschitz_g", "d_used", "formula_variant"},
            "identify");
        spec.d_tol = get_or(id, "d_tol", spec.d_tol);
        spec.q = get_or(id, "q", spec.q);
        if (id.contains("lipschitz_u")) spec.lipschitz_u = id.at("lipschitz_u").get<double>();
        if (id.contains("lipschitz_g")) spec.lipschitz_g = id.at("lipschitz_g").get<double>();
        if (id.contains("d_used")) spec.d_used = id.at("d_used").get<double>();
        if (id.contains("formula_variant")) {
            spec.variant = uniqode::identify::formula_variant_from_name(
                id.at("formula_variant").get<std::string>());
        }
    }
    if (!variant_flag.empty()) {
        spec.variant = uniqode::identify::formula_variant_from_name(variant_flag);
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Atomic output: every artifact is staged in memory and written through a
// temp file plus rename, so a failed command leaves nothing behind.

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw uniqode::DataError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw uniqode::DataError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

struct OutputSet {
    std::vector<std::pair<fs::path, std::string>> files;

    void add(const fs::path& path, const std::string& content) {
        files.emplace_back(path, content);
    }
    void commit() const {
        for (const auto& [path, content] : files) write_atomic(path, content);
    }
};

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Structured-row accessors shared by identify/bounds.

struct RowContext {
    const uniqode::ode::StructuredRow* row = nullptr;
    uniqode::identify::H1Fn h1;
    uniqode::identify::CxFn c;
    uniqode::identify::DxFn d;
    uniqode::identify::GyFn g;
};

RowContext row_context(const uniqode::ode::StructuredSystem& system, int q) {
    if (system.structured.empty()) {
        throw uniqode::ConfigError("system has no structured rows to identify");
    }
    const uniqode::ode::StructuredRow& row =
        (q < 0) ? system.structured.front() : system.row(q);
    RowContext ctx;
    ctx.row = &row;
    ctx.h1 = [&row](const uniqode::ode::Vec& x) { return row.project_y(x); };
    ctx.c = [&row](double t, const uniqode::ode::Vec& x) { return row.C(t, x); };
    ctx.d = [&row](double t, const uniqode::ode::Vec& x) { return row.d_value(t, x); };
    if (row.growth_known) {
        ctx.g = [&row](const uniqode::ode::Vec& y) { return row.g(y); };
    }
    return ctx;
}

// Diagnostic listing of the closest-in-y pairs (including degenerate ones)
// for failed identification runs.
json nearest_miss_pairs(const uniqode::ode::Trajectory& data, const RowContext& ctx) {
    uniqode::identify::Thresholds all;
    all.c_gap = -1.0;  // keep degenerate pairs in the listing
    const auto pairs = uniqode::identify::find_matched_pairs(
        data, ctx.h1, ctx.c, std::numeric_limits<double>::infinity(), all);
    json list = json::array();
    for (size_t k = 0; k < pairs.size() && k < 5; ++k) {
        list.push_back({{"i", pairs[k].i},
                        {"j", pairs[k].j},
                        {"y_distance", pairs[k].y_distance},
                        {"c_gap", pairs[k].c_gap}});
    }
    return list;
}

uniqode::ode::Trajectory load_data(const std::string& path) {
    return uniqode::ode::read_trajectory_csv(path);
}

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(const std::string& config_path, const fs::path& out_dir,
                 const std::optional<std::uint64_t>& seed) {
    const json cfg = load_config(config_path);
    uniqode::ode::StructuredSystem system = system_from_config(cfg);
    const DataSpec spec = data_from_config(cfg, system, seed);

    uniqode::ode::Trajectory traj = uniqode::ode::rk4_integrate(system);
    if (spec.samples) traj = uniqode::ode::sample_dataset(traj, *spec.samples);
    if (spec.noise.fraction > 0.0) traj = uniqode::ode::inject_noise(traj, spec.noise);

    std::ostringstream csv;
    uniqode::ode::write_trajectory_csv(traj, csv);
    OutputSet out;
    out.add(out_dir / "trajectory.csv", csv.str());
    out.commit();
    std::cout << "wrote " << (out_dir / "trajectory.csv").string() << " (" << traj.size()
              << " rows)\n";
    return kExitOk;
}

int cmd_identify(const std::string& config_path, const std::string& data_path,
                 const fs::path& out_dir, const std::string& variant_flag,
                 bool require_bounds) {
    const json cfg = load_config(config_path);
    const uniqode::ode::StructuredSystem system = system_from_config(cfg);
    const IdentifySpec spec = identify_from_config(cfg, variant_flag);
    if (require_bounds && !spec.lipschitz_u) {
        throw uniqode::ConfigError("bounds: identify.lipschitz_u is required");
    }
    const uniqode::ode::Trajectory data = load_data(data_path);
    if (!data.has_derivatives) {
        throw uniqode::DataError("identify: data file has no derivative columns");
    }
    const RowContext ctx = row_context(system, spec.q);

    const auto pairs =
        uniqode::identify::find_matched_pairs(data, ctx.h1, ctx.c, spec.d_tol);
    if (pairs.empty()) {
        json diag = {{"error", "no matched pair at tolerance " + std::to_string(spec.d_tol)},
                     {"nearest_miss_pairs", nearest_miss_pairs(data, ctx)}};
        std::cerr << diag.dump(2) << "\n";
        return kExitIdentify;
    }

    json result;
    if (ctx.row->growth_known) {
        const auto cert = uniqode::identify::recover_t1(pairs.front(), data, ctx.g, ctx.c,
                                                        ctx.d, ctx.h1, ctx.row->q);
        result["certificate"] = uniqode::identify::certificate_to_json(cert);
    } else {
        const auto cert = uniqode::identify::recover_t2_all(pairs, data, ctx.c, ctx.d,
                                                            ctx.h1, ctx.row->q);
        result["certificate"] = uniqode::identify::certificate_to_json(cert);
    }

    // Lipschitz constants in the config additionally request error radii.
    if (spec.lipschitz_u) {
        std::vector<uniqode::identify::PairValues> values;
        values.reserve(pairs.size());
        const uniqode::identify::GyFn* g_ptr = ctx.row->growth_known ? &ctx.g : nullptr;
        for (const auto& p : pairs) {
            values.push_back(uniqode::identify::pair_values(p, data, ctx.c, ctx.d, g_ptr,
                                                            ctx.h1, ctx.row->q));
        }
        const double d_used = spec.d_used.value_or(spec.d_tol);
        if (ctx.row->growth_known) {
            std::vector<double> c_values, g_values, xdot_q, d_values;
            for (size_t p = 0; p < data.size(); ++p) {
                const double t = data.times[p];
                const uniqode::ode::Vec& x = data.states[p];
                c_values.push_back(ctx.c(t, x));
                g_values.push_back(ctx.g(ctx.h1(x)));
                xdot_q.push_back(data.derivatives[p][static_cast<size_t>(ctx.row->q)]);
                d_values.push_back(ctx.d(t, x));
            }
            const auto report = uniqode::identify::bound_t3(
                pairs, values, *spec.lipschitz_u, d_used, c_values, g_values, xdot_q,
                d_values, spec.variant);
            result["bounds"] = uniqode::identify::bound_report_to_json(report);
        } else {
            if (!spec.lipschitz_g) {
                throw uniqode::ConfigError(
                    "identify: unknown-growth bounds need identify.lipschitz_g");
            }
            const auto report = uniqode::identify::bound_t4(pairs, values, *spec.lipschitz_g,
                                                            *spec.lipschitz_u, d_used);
            result["bounds"] = uniqode::identify::bound_report_to_json(report);
        }
    }

    OutputSet out;
    out.add(out_dir / "certificate.json", pretty(result));
    out.commit();
    std::cout << "wrote " << (out_dir / "certificate.json").string() << "\n";
    return kExitOk;
}

int cmd_fit(const std::string& config_path, const std::string& data_path,
            const fs::path& out_dir, const std::string& mode,
            const std::optional<std::uint64_t>& seed, const std::optional<int>& epochs) {
    const json cfg = load_config(config_path);
    const uniqode::ode::StructuredSystem system = system_from_config(cfg);
    const uniqode::training::UnknownSpec unknowns = unknowns_from_config(cfg);
    uniqode::training::TrainConfig train = train_from_config(cfg, seed);
    if (epochs) train.epochs = *epochs;
    const uniqode::ode::Trajectory data = load_data(data_path);

    uniqode::training::FitResult fit;
    if (mode == "direct") {
        fit = uniqode::training::direct_fit(data, system, unknowns, train);
    } else if (mode == "upinn") {
        fit = uniqode::training::upinn_fit(data, system, unknowns, train);
    } else {
        throw uniqode::ConfigError("fit: --mode must be direct or upinn, got " + mode);
    }

    OutputSet out;
    out.add(out_dir / "fit.json", pretty(uniqode::training::fit_result_to_json(fit)));
    out.add(out_dir / "loss.csv", uniqode::training::loss_history_csv(fit));
    out.commit();
    std::cout << "wrote " << (out_dir / "fit.json").string() << " and loss.csv ("
              << fit.epochs_run << " epochs)\n";
    return kExitOk;
}

// Column subsets of the merged sweep CSVs, matching the published tables.
std::string slice_csv_columns(const std::string& csv, const std::vector<size_t>& cols) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        for (size_t k = 0; k < cols.size(); ++k) {
            out << fields.at(cols[k]) << (k + 1 < cols.size() ? "," : "\n");
        }
    }
    return out.str();
}

const std::vector<double> kPaperNoiseLevels = {0.0, 0.05, 0.075, 0.10, 0.125, 0.15, 0.30};
const std::vector<size_t> kPaperLengths = {1024, 512, 256, 128, 64, 32, 16, 8, 4};

uniqode::experiments::Overrides sweep_overrides(const std::optional<int>& epochs,
                                                const std::optional<std::uint64_t>& seed) {
    uniqode::experiments::Overrides ov;
    if (epochs) ov.epochs = *epochs;
    if (seed) ov.seed = *seed;
    return ov;
}

int cmd_reproduce(const std::string& id, const fs::path& out_dir,
                  const std::optional<int>& epochs, const std::optional<std::uint64_t>& seed,
                  const std::vector<std::uint64_t>& seeds) {
    OutputSet out;
    if (id == "table1" || id == "table2") {
        const auto reports = uniqode::experiments::sweep_noise(kPaperNoiseLevels, seeds,
                                                               sweep_overrides(epochs, seed));
        const std::string merged =
            uniqode::experiments::noise_table_csv(reports, kPaperNoiseLevels);
        // table1: noise, pred alpha, pred gamma, percent errors.
        // table2: noise, data loss, ODE loss, R^2, MAPE.
        const std::string csv = (id == "table1")
                                    ? slice_csv_columns(merged, {0, 1, 2, 3, 4})
                                    : slice_csv_columns(merged, {0, 5, 6, 7, 8});
        out.add(out_dir / (id + ".csv"), csv);
        json bundle = json::array();
        for (const auto& r : reports) bundle.push_back(uniqode::experiments::case_report_to_json(r));
        out.add(out_dir / (id + "_reports.json"), pretty(bundle));
    } else if (id == "table3" || id == "table4") {
        const auto reports =
            uniqode::experiments::sweep_length(kPaperLengths, sweep_overrides(epochs, seed));
        const std::string merged =
            uniqode::experiments::length_table_csv(reports, kPaperLengths);
        // table3: length, pred beta, percent error.
        // table4: length, data loss, ODE loss, R^2, MAPE.
        const std::string csv = (id == "table3") ? slice_csv_columns(merged, {0, 1, 2})
                                                 : slice_csv_columns(merged, {0, 3, 4, 5, 6});
        out.add(out_dir / (id + ".csv"), csv);
        json bundle = json::array();
        for (const auto& r : reports) bundle.push_back(uniqode::experiments::case_report_to_json(r));
        out.add(out_dir / (id + "_reports.json"), pretty(bundle));
    } else {
        const uniqode::experiments::Case c = uniqode::experiments::case_from_name(id);
        const auto report = uniqode::experiments::run_case(c, sweep_overrides(epochs, seed));
        out.add(out_dir / (report.case_id + ".json"),
                pretty(uniqode::experiments::case_report_to_json(report)));
        for (const auto& fc : report.functions) {
            out.add(out_dir / (report.case_id + "_" + fc.name + ".csv"),
                    uniqode::experiments::function_comparison_csv(fc));
        }
    }
    out.commit();
    std::cout << "wrote " << id << " artifacts to " << out_dir.string() << "\n";
    return kExitOk;
}

int cmd_sweep_noise(const std::vector<double>& levels, const std::vector<std::uint64_t>& seeds,
                    const fs::path& out_dir, const std::optional<int>& epochs,
                    const std::optional<std::uint64_t>& seed) {
    const auto reports =
        uniqode::experiments::sweep_noise(levels, seeds, sweep_overrides(epochs, seed));
    OutputSet out;
    out.add(out_dir / "noise_table.csv", uniqode::experiments::noise_table_csv(reports, levels));
    json bundle = json::array();
    for (const auto& r : reports) bundle.push_back(uniqode::experiments::case_report_to_json(r));
    out.add(out_dir / "noise_reports.json", pretty(bundle));
    out.commit();
    std::cout << "wrote noise sweep artifacts to " << out_dir.string() << "\n";
    return kExitOk;
}

int cmd_sweep_length(const std::vector<size_t>& lengths, const fs::path& out_dir,
                     const std::optional<int>& epochs, const std::optional<std::uint64_t>& seed) {
    const auto reports =
        uniqode::experiments::sweep_length(lengths, sweep_overrides(epochs, seed));
    OutputSet out;
    out.add(out_dir / "length_table.csv",
            uniqode::experiments::length_table_csv(reports, lengths));
    json bundle = json::array();
    for (const auto& r : reports) bundle.push_back(uniqode::experiments::case_report_to_json(r));
    out.add(out_dir / "length_reports.json", pretty(bundle));
    out.commit();
    std::cout << "wrote length sweep artifacts to " << out_dir.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ODE inverse problems: simulation, identifiability, and fitting"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_str = ".", variant_flag, mode = "direct";
    std::optional<std::uint64_t> flag_seed;
    std::optional<int> flag_epochs;
    std::string repro_id;
    std::vector<double> levels = kPaperNoiseLevels;
    std::vector<size_t> lengths = kPaperLengths;
    std::vector<std::uint64_t> sweep_seeds = {0, 1, 2};

    app.add_option("--config", config_path, "RunConfig JSON path");
    app.add_option("--out", out_str, "Output directory");
    app.add_option("--seed", flag_seed, "Override all config seeds");
    app.add_option("--formula-variant", variant_flag,
                   "Bound denominator reading: verbatim|alternative")
        ->check(CLI::IsMember({"", "verbatim", "alternative"}));

    CLI::App* sim = app.add_subcommand("simulate", "Integrate a system to a trajectory CSV");
    CLI::App* ident =
        app.add_subcommand("identify", "Exact recovery certificates from derivative data");
    ident->add_option("--data", data_path, "Trajectory CSV with derivative columns")
        ->required();
    CLI::App* bounds = app.add_subcommand(
        "bounds", "Lipschitz error radii for approximately matched pairs");
    bounds->add_option("--data", data_path, "Trajectory CSV with derivative columns")
        ->required();
    CLI::App* fit = app.add_subcommand("fit", "Fit unknown constants/functions to data");
    fit->add_option("--data", data_path, "Trajectory CSV")->required();
    fit->add_option("--mode", mode, "direct|upinn")->check(CLI::IsMember({"direct", "upinn"}));
    fit->add_option("--epochs", flag_epochs, "Override training epochs");
    CLI::App* repro = app.add_subcommand(
        "reproduce", "Regenerate a study: case1..case5 or table1..table4");
    repro->add_option("id", repro_id, "case or table id")->required();
    repro->add_option("--epochs", flag_epochs, "Override training epochs");
    repro->add_option("--seeds", sweep_seeds, "Seeds for table1/table2 medians");
    CLI::App* sn = app.add_subcommand("sweep-noise", "Noise-robustness sweep (UPINN)");
    sn->add_option("--levels", levels, "Noise fractions in [0,1]");
    sn->add_option("--seeds", sweep_seeds, "Seeds; medians taken per level");
    sn->add_option("--epochs", flag_epochs, "Override training epochs");
    CLI::App* sl = app.add_subcommand("sweep-length", "Dataset-length sweep (UPINN)");
    sl->add_option("--lengths", lengths, "Dataset lengths");
    sl->add_option("--epochs", flag_epochs, "Override training epochs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        const std::optional<std::uint64_t> seed = seed_override(flag_seed);
        const fs::path out_dir(out_str);
        if (sim->parsed()) {
            if (config_path.empty()) throw uniqode::ConfigError("simulate: --config is required");
            return cmd_simulate(config_path, out_dir, seed);
        }
        if (ident->parsed() || bounds->parsed()) {
            if (config_path.empty()) throw uniqode::ConfigError("identify: --config is required");
            return cmd_identify(config_path, data_path, out_dir, variant_flag, bounds->parsed());
        }
        if (fit->parsed()) {
            if (config_path.empty()) throw uniqode::ConfigError("fit: --config is required");
            return cmd_fit(config_path, data_path, out_dir, mode, seed, flag_epochs);
        }
        if (repro->parsed()) return cmd_reproduce(repro_id, out_dir, flag_epochs, seed, sweep_seeds);
        if (sn->parsed()) return cmd_sweep_noise(levels, sweep_seeds, out_dir, flag_epochs, seed);
        if (sl->parsed()) return cmd_sweep_length(lengths, out_dir, flag_epochs, seed);
        throw uniqode::ConfigError("no command given");
    } catch (const uniqode::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const uniqode::ShapeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const uniqode::UsageError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const uniqode::NoMatchedPairError& e) {
        std::cerr << "identifiability failure: " << e.what() << "\n";
        return kExitIdentify;
    } catch (const uniqode::DegeneratePairError& e) {
        std::cerr << "identifiability failure: " << e.what() << "\n";
        return kExitIdentify;
    } catch (const uniqode::GZeroError& e) {
        std::cerr << "identifiability failure: " << e.what() << "\n";
        return kExitIdentify;
    } catch (const uniqode::UnboundedCertificateError& e) {
        std::cerr << "identifiability failure: " << e.what() << "\n";
        return kExitIdentify;
    } catch (const uniqode::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const uniqode::IntegrationBlowupError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const uniqode::DivergenceError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
}
