#ifndef UNIQODE_IDENTIFY_HPP
#define UNIQODE_IDENTIFY_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uniqode/ode.hpp"

namespace uniqode::identify {

using ode::StructuredRow;
using ode::Trajectory;
using ode::Vec;

// Numerical stand-ins for the theorems' "nonzero" hypotheses.
struct Thresholds {
    double y_match = 1e-12;    // default tolerance for "y_i = y_j"
    double c_gap = 1e-9;       // |C(x_i) - C(x_j)| below this is degenerate
    double g_zero = 1e-9;      // |g(y_i)| below this fails the g != 0 hypothesis
    double c_zero = 1e-9;      // |C(x_p)| below this excludes index p
    double denominator = 1e-9; // bound formula denominator floor
};

struct MatchedPair {
    size_t i = 0, j = 0;
    double y_distance = 0.0;             // ||y_i - y_j|| (infinity norm)
    double c_gap = 0.0;                  // C(x_i) - C(x_j)
    std::optional<double> g_at_yi;       // absent in the unknown-growth form
};

enum class Theorem { T1, T2, T3, T4 };

struct Certificate {
    Theorem theorem = Theorem::T1;
    MatchedPair pair;
    bool y_match_ok = false;
    bool c_gap_ok = false;
    bool g_nonzero_ok = false;  // always true for the unknown-growth form
    std::optional<double> recovered_beta;
    std::map<size_t, double> recovered_u_values;
    std::map<size_t, double> recovered_g_values;  // unknown-growth form only

    bool conditions_met() const { return y_match_ok && c_gap_ok && g_nonzero_ok; }
};

// Which reading of the printed beta-error denominator to use:
//   Verbatim:    g(y_i)*(C(x_i)-C(x_j)) - (C(x_i)-C(x_j))   (as printed)
//   Alternative: g(y_i)*(C(x_i)-C(x_j))                     (consistent with
//                the interval construction in the proof)
enum class FormulaVariant { Verbatim, Alternative };

FormulaVariant formula_variant_from_name(const std::string& name);
std::string formula_variant_name(FormulaVariant v);

struct BoundReport {
    Theorem theorem = Theorem::T3;
    MatchedPair pair;
    FormulaVariant variant = FormulaVariant::Verbatim;
    double lipschitz_u = 0.0;  // L (T3) or L2 (T4)
    double lipschitz_g = 0.0;  // L1 (T4 only)
    double d_used = 0.0;
    double beta_radius = 0.0;                 // T3 only
    std::map<size_t, double> u_radii;
    std::map<size_t, double> g_radii;         // T4 only
    std::optional<double> beta_estimate;      // interval midpoint, when computable
    std::map<size_t, double> u_estimates;
    std::map<size_t, double> g_estimates;
};

using H1Fn = std::function<Vec(const Vec& x)>;
using CxFn = std::function<double(double t, const Vec& x)>;
using DxFn = std::function<double(double t, const Vec& x)>;
using GyFn = std::function<double(const Vec& y)>;

// All (i, j) with ||y_i - y_j||_inf <= d_tol and a C gap above working
// precision, sorted by y_distance ascending then |c_gap| descending.
std::vector<MatchedPair> find_matched_pairs(const Trajectory& data, const H1Fn& h1,
                                            const CxFn& c, double d_tol,
                                            const Thresholds& th = {});

// Exact closed-form recovery under Theorem 1 hypotheses; extends u to every
// dataset index with |C(x_p)| above threshold (Corollary 1).
Certificate recover_t1(const MatchedPair& pair, const Trajectory& data, const GyFn& g,
                       const CxFn& c, const DxFn& d, const H1Fn& h1, int q,
                       const Thresholds& th = {});

// Recovery with the growth term unknown (Theorem 2): u(Y) and g(Y) at the
// pair's y value.
Certificate recover_t2(const MatchedPair& pair, const Trajectory& data, const CxFn& c,
                       const DxFn& d, const H1Fn& h1, int q, const Thresholds& th = {});

// Corollary 2: recover u(y_i), g(y_i) for every index that participates in
// some matched pair, each from its own best pair.
Certificate recover_t2_all(const std::vector<MatchedPair>& pairs, const Trajectory& data,
                           const CxFn& c, const DxFn& d, const H1Fn& h1, int q,
                           const Thresholds& th = {});

// Per-pair numerical context for the bound formulas.
struct PairValues {
    double c_i = 0.0, c_j = 0.0;
    double g_at_yi = 0.0;               // unused for T4
    double xdot_i = 0.0, xdot_j = 0.0;  // q-th derivative components
    double d_i = 0.0, d_j = 0.0;
};

PairValues pair_values(const MatchedPair& pair, const Trajectory& data, const CxFn& c,
                       const DxFn& d, const GyFn* g, const H1Fn& h1, int q);

// Error radii for Theorem 3 / Remark 1. `c_values` and `g_values` are the
// per-index C(x_p) and g(y_p); indices with |C(x_p)| below threshold are
// skipped. When several candidate pairs are supplied, the one minimizing
// beta_radius wins (tie-break on smaller y_distance).
BoundReport bound_t3(const std::vector<MatchedPair>& candidates,
                     const std::vector<PairValues>& values, double lipschitz_u, double d_used,
                     const std::vector<double>& c_values, const std::vector<double>& g_values,
                     const std::vector<double>& xdot_q, const std::vector<double>& d_values,
                     FormulaVariant variant = FormulaVariant::Verbatim,
                     const Thresholds& th = {});

// Error radii for Theorem 4's remark; u and g radii at the pair indices.
BoundReport bound_t4(const std::vector<MatchedPair>& candidates,
                     const std::vector<PairValues>& values, double lipschitz_g,
                     double lipschitz_u, double d_used, const Thresholds& th = {});

// The non-uniqueness construction: u_bar(x) = u*(x) + (beta* - beta_bar) g(x),
// so beta_bar*g + u_bar reproduces beta**g + u* identically.
std::function<double(double)> counterexample_shift(double beta_true, double beta_bar,
                                                   const std::function<double(double)>& u_true,
                                                   const std::function<double(double)>& g);

nlohmann::json certificate_to_json(const Certificate& cert);
nlohmann::json bound_report_to_json(const BoundReport& report);

}  // namespace uniqode::identify

#endif
