#include "uniqode/identify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uniqode::identify {

FormulaVariant formula_variant_from_name(const std::string& name) {
    if (name == "verbatim") return FormulaVariant::Verbatim;
    if (name == "alternative") return FormulaVariant::Alternative;
    throw ConfigError("unknown formula variant: " + name);
}

std::string formula_variant_name(FormulaVariant v) {
    return v == FormulaVariant::Verbatim ? "verbatim" : "alternative";
}

namespace {

double inf_norm_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

const char* theorem_name(Theorem t) {
    switch (t) {
        case Theorem::T1: return "T1";
        case Theorem::T2: return "T2";
        case Theorem::T3: return "T3";
        case Theorem::T4: return "T4";
    }
    return "?";
}

void require_derivatives(const Trajectory& data) {
    if (!data.has_derivatives || data.derivatives.size() != data.size()) {
        throw DataError("exact derivatives are required but absent from the dataset");
    }
}

}  // namespace

std::vector<MatchedPair> find_matched_pairs(const Trajectory& data, const H1Fn& h1,
                                            const CxFn& c, double d_tol, const Thresholds& th) {
    if (d_tol < 0.0) throw ConfigError("find_matched_pairs: d_tol must be >= 0");
    std::vector<MatchedPair> out;
    const size_t m = data.size();
    if (m < 2) return out;

    std::vector<Vec> ys(m);
    std::vector<double> cs(m);
    for (size_t i = 0; i < m; ++i) {
        ys[i] = h1(data.states[i]);
        cs[i] = c(data.times[i], data.states[i]);
    }
    for (size_t i = 0; i + 1 < m; ++i) {
        for (size_t j = i + 1; j < m; ++j) {
            const double dist = inf_norm_diff(ys[i], ys[j]);
            if (dist > d_tol) continue;
            const double gap = cs[i] - cs[j];
            if (std::abs(gap) <= th.c_gap) continue;
            out.push_back({i, j, dist, gap, std::nullopt});
        }
    }
    std::sort(out.begin(), out.end(), [](const MatchedPair& a, const MatchedPair& b) {
        if (a.y_distance != b.y_distance) return a.y_distance < b.y_distance;
        return std::abs(a.c_gap) > std::abs(b.c_gap);
    });
    return out;
}

PairValues pair_values(const MatchedPair& pair, const Trajectory& data, const CxFn& c,
                       const DxFn& d, const GyFn* g, const H1Fn& h1, int q) {
    require_derivatives(data);
    PairValues v;
    const double ti = data.times[pair.i], tj = data.times[pair.j];
    const Vec& xi = data.states[pair.i];
    const Vec& xj = data.states[pair.j];
    v.c_i = c(ti, xi);
    v.c_j = c(tj, xj);
    v.d_i = d ? d(ti, xi) : 0.0;
    v.d_j = d ? d(tj, xj) : 0.0;
    v.xdot_i = data.derivatives[pair.i][static_cast<size_t>(q)];
    v.xdot_j = data.derivatives[pair.j][static_cast<size_t>(q)];
    if (g) v.g_at_yi = (*g)(h1(xi));
    return v;
}

Certificate recover_t1(const MatchedPair& pair, const Trajectory& data, const GyFn& g,
                       const CxFn& c, const DxFn& d, const H1Fn& h1, int q,
                       const Thresholds& th) {
    require_derivatives(data);
    Certificate cert;
    cert.theorem = Theorem::T1;
    cert.pair = pair;

    const Vec yi = h1(data.states[pair.i]);
    const Vec yj = h1(data.states[pair.j]);
    const Vec ybar = yi;
    cert.y_match_ok = inf_norm_diff(yi, yj) <= std::max(th.y_match, pair.y_distance);

    const PairValues v = pair_values(pair, data, c, d, &g, h1, q);
    cert.pair.g_at_yi = v.g_at_yi;
    cert.c_gap_ok = std::abs(v.c_i - v.c_j) > th.c_gap;
    if (!cert.c_gap_ok) {
        throw DegeneratePairError("recover_t1: C(x_i) - C(x_j) is below the gap threshold");
    }
    cert.g_nonzero_ok = std::abs(v.g_at_yi) > th.g_zero;
    if (!cert.g_nonzero_ok) {
        throw GZeroError("recover_t1: |g(y_i)| is below threshold, Theorem 1 does not apply");
    }

    // u(ybar) = ((xdot_i - xdot_j)_q + d(x_j) - d(x_i)) / (C(x_i) - C(x_j))
    const double u_bar = (v.xdot_i - v.xdot_j + v.d_j - v.d_i) / (v.c_i - v.c_j);
    // beta = ((xdot_i)_q - C(x_i) u(ybar) - d(x_i)) / g(ybar)
    const double beta = (v.xdot_i - v.c_i * u_bar - v.d_i) / v.g_at_yi;
    cert.recovered_beta = beta;
    cert.recovered_u_values[pair.i] = u_bar;

    // Corollary 1: u(y_p) wherever C(x_p) is usably nonzero.
    for (size_t p = 0; p < data.size(); ++p) {
        const double tp = data.times[p];
        const Vec& xp = data.states[p];
        const double cp = c(tp, xp);
        if (std::abs(cp) <= th.c_zero) continue;
        const Vec yp = h1(xp);
        const double dp = d ? d(tp, xp) : 0.0;
        cert.recovered_u_values[p] =
            (data.derivatives[p][static_cast<size_t>(q)] - beta * g(yp) - dp) / cp;
    }
    return cert;
}

Certificate recover_t2(const MatchedPair& pair, const Trajectory& data, const CxFn& c,
                       const DxFn& d, const H1Fn& h1, int q, const Thresholds& th) {
    require_derivatives(data);
    Certificate cert;
    cert.theorem = Theorem::T2;
    cert.pair = pair;
    cert.g_nonzero_ok = true;  // no g != 0 hypothesis in Theorem 2

    const Vec yi = h1(data.states[pair.i]);
    const Vec yj = h1(data.states[pair.j]);
    cert.y_match_ok = inf_norm_diff(yi, yj) <= std::max(th.y_match, pair.y_distance);

    const PairValues v = pair_values(pair, data, c, d, nullptr, h1, q);
    cert.c_gap_ok = std::abs(v.c_i - v.c_j) > th.c_gap;
    if (!cert.c_gap_ok) {
        throw DegeneratePairError("recover_t2: C(x_i) - C(x_j) is below the gap threshold");
    }

    const double u_Y = (v.xdot_i - v.xdot_j + v.d_j - v.d_i) / (v.c_i - v.c_j);
    const double g_Y = v.xdot_i - v.c_i * u_Y - v.d_i;
    cert.recovered_u_values[pair.i] = u_Y;
    cert.recovered_u_values[pair.j] = u_Y;
    cert.recovered_g_values[pair.i] = g_Y;
    cert.recovered_g_values[pair.j] = g_Y;
    return cert;
}

Certificate recover_t2_all(const std::vector<MatchedPair>& pairs, const Trajectory& data,
                           const CxFn& c, const DxFn& d, const H1Fn& h1, int q,
                           const Thresholds& th) {
    if (pairs.empty()) {
        throw NoMatchedPairError("recover_t2_all: no matched pairs supplied");
    }
    Certificate cert = recover_t2(pairs.front(), data, c, d, h1, q, th);
    // Pairs arrive sorted best-first; keep the first recovery seen per index.
    for (const MatchedPair& p : pairs) {
        if (cert.recovered_u_values.count(p.i) && cert.recovered_u_values.count(p.j)) continue;
        Certificate one = recover_t2(p, data, c, d, h1, q, th);
        for (const auto& [idx, val] : one.recovered_u_values) {
            cert.recovered_u_values.emplace(idx, val);
        }
        for (const auto& [idx, val] : one.recovered_g_values) {
            cert.recovered_g_values.emplace(idx, val);
        }
    }
    return cert;
}

namespace {

double t3_denominator(const PairValues& v, FormulaVariant variant) {
    const double gap = v.c_i - v.c_j;
    return variant == FormulaVariant::Verbatim ? v.g_at_yi * gap - gap : v.g_at_yi * gap;
}

}  // namespace

BoundReport bound_t3(const std::vector<MatchedPair>& candidates,
                     const std::vector<PairValues>& values, double lipschitz_u, double d_used,
                     const std::vector<double>& c_values, const std::vector<double>& g_values,
                     const std::vector<double>& xdot_q, const std::vector<double>& d_values,
                     FormulaVariant variant, const Thresholds& th) {
    if (lipschitz_u < 0.0 || d_used < 0.0) {
        throw ConfigError("bound_t3: L and D must be nonnegative");
    }
    if (candidates.empty() || candidates.size() != values.size()) {
        throw UsageError("bound_t3: candidate pairs and values must align and be nonempty");
    }

    BoundReport report;
    report.theorem = Theorem::T3;
    report.variant = variant;
    report.lipschitz_u = lipschitz_u;
    report.d_used = d_used;

    // Remark 1 directs the bound to the pair minimizing the inequality.
    size_t best = candidates.size();
    double best_radius = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < candidates.size(); ++k) {
        const PairValues& v = values[k];
        if (std::abs(v.c_i - v.c_j) <= th.c_gap) continue;
        if (std::abs(v.g_at_yi) <= th.g_zero) continue;
        const double den = t3_denominator(v, variant);
        if (std::abs(den) <= th.denominator) continue;
        const double radius = std::abs(v.c_i * v.c_j * lipschitz_u * d_used / den);
        const bool better = radius < best_radius ||
                            (radius == best_radius && best < candidates.size() &&
                             candidates[k].y_distance < candidates[best].y_distance);
        if (better) {
            best = k;
            best_radius = radius;
        }
    }
    if (best == candidates.size()) {
        throw UnboundedCertificateError(
            "bound_t3: every candidate pair has a denominator below threshold; "
            "no finite radius can be certified");
    }
    const MatchedPair& pair = candidates[best];
    const PairValues& v = values[best];
    report.pair = pair;
    report.pair.g_at_yi = v.g_at_yi;
    report.beta_radius = best_radius;

    // Interval midpoint from the proof's construction (d folded back in).
    const double den = t3_denominator(v, variant);
    report.beta_estimate = (v.c_i * (v.xdot_j - v.d_j) - v.c_j * (v.xdot_i - v.d_i)) / den;

    if (c_values.size() != g_values.size() ||
        (!xdot_q.empty() && xdot_q.size() != c_values.size()) ||
        (!d_values.empty() && d_values.size() != c_values.size())) {
        throw ShapeError("bound_t3: per-index arrays disagree in length");
    }
    for (size_t p = 0; p < c_values.size(); ++p) {
        if (std::abs(c_values[p]) <= th.c_zero) continue;
        report.u_radii[p] = std::abs(g_values[p] / c_values[p]) * report.beta_radius;
        if (!xdot_q.empty()) {
            const double dp = d_values.empty() ? 0.0 : d_values[p];
            report.u_estimates[p] =
                (xdot_q[p] - *report.beta_estimate * g_values[p] - dp) / c_values[p];
        }
    }
    return report;
}

BoundReport bound_t4(const std::vector<MatchedPair>& candidates,
                     const std::vector<PairValues>& values, double lipschitz_g,
                     double lipschitz_u, double d_used, const Thresholds& th) {
    if (lipschitz_g < 0.0 || lipschitz_u < 0.0 || d_used < 0.0) {
        throw ConfigError("bound_t4: L1, L2 and D must be nonnegative");
    }
    if (candidates.empty() || candidates.size() != values.size()) {
        throw UsageError("bound_t4: candidate pairs and values must align and be nonempty");
    }

    BoundReport report;
    report.theorem = Theorem::T4;
    report.lipschitz_g = lipschitz_g;
    report.lipschitz_u = lipschitz_u;
    report.d_used = d_used;

    size_t best = candidates.size();
    double best_radius = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < candidates.size(); ++k) {
        const PairValues& v = values[k];
        const double gap = v.c_i - v.c_j;
        if (std::abs(gap) <= th.c_gap) continue;
        const double radius = std::abs(d_used * (lipschitz_g + v.c_j * lipschitz_u) / gap);
        const bool better = radius < best_radius ||
                            (radius == best_radius && best < candidates.size() &&
                             candidates[k].y_distance < candidates[best].y_distance);
        if (better) {
            best = k;
            best_radius = radius;
        }
    }
    if (best == candidates.size()) {
        throw UnboundedCertificateError(
            "bound_t4: every candidate pair is degenerate; no finite radius");
    }
    const MatchedPair& pair = candidates[best];
    const PairValues& v = values[best];
    report.pair = pair;

    const double u_radius = best_radius;
    const double g_radius = std::abs(v.c_i) * u_radius;
    report.u_radii[pair.i] = u_radius;
    report.u_radii[pair.j] = u_radius;
    report.g_radii[pair.i] = g_radius;
    report.g_radii[pair.j] = g_radius;

    const double u_mid = (v.xdot_i - v.xdot_j + v.d_j - v.d_i) / (v.c_i - v.c_j);
    const double g_mid = v.xdot_i - v.c_i * u_mid - v.d_i;
    report.u_estimates[pair.i] = u_mid;
    report.g_estimates[pair.i] = g_mid;
    return report;
}

std::function<double(double)> counterexample_shift(double beta_true, double beta_bar,
                                                   const std::function<double(double)>& u_true,
                                                   const std::function<double(double)>& g) {
    return [=](double x) { return u_true(x) + (beta_true - beta_bar) * g(x); };
}

nlohmann::json certificate_to_json(const Certificate& cert) {
    nlohmann::json j;
    j["theorem"] = theorem_name(cert.theorem);
    j["pair"] = {{"i", cert.pair.i},
                 {"j", cert.pair.j},
                 {"y_distance", cert.pair.y_distance},
                 {"c_gap", cert.pair.c_gap}};
    if (cert.pair.g_at_yi) j["pair"]["g_at_yi"] = *cert.pair.g_at_yi;
    j["conditions"] = {{"y_match", cert.y_match_ok},
                       {"c_gap_nonzero", cert.c_gap_ok},
                       {"g_nonzero", cert.g_nonzero_ok}};
    if (cert.recovered_beta) j["recovered_beta"] = *cert.recovered_beta;
    nlohmann::json uj = nlohmann::json::object();
    for (const auto& [idx, val] : cert.recovered_u_values) uj[std::to_string(idx)] = val;
    j["recovered_u_values"] = uj;
    if (!cert.recovered_g_values.empty()) {
        nlohmann::json gj = nlohmann::json::object();
        for (const auto& [idx, val] : cert.recovered_g_values) gj[std::to_string(idx)] = val;
        j["recovered_g_values"] = gj;
    }
    return j;
}

nlohmann::json bound_report_to_json(const BoundReport& report) {
    nlohmann::json j;
    j["theorem"] = theorem_name(report.theorem);
    j["formula_variant"] = formula_variant_name(report.variant);
    j["pair"] = {{"i", report.pair.i},
                 {"j", report.pair.j},
                 {"y_distance", report.pair.y_distance},
                 {"c_gap", report.pair.c_gap}};
    j["lipschitz_u"] = report.lipschitz_u;
    if (report.theorem == Theorem::T4) j["lipschitz_g"] = report.lipschitz_g;
    j["d_used"] = report.d_used;
    if (report.theorem == Theorem::T3) j["beta_radius"] = report.beta_radius;
    if (report.beta_estimate) j["beta_estimate"] = *report.beta_estimate;
    auto map_to_json = [](const std::map<size_t, double>& m) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [idx, val] : m) out[std::to_string(idx)] = val;
        return out;
    };
    j["u_radii"] = map_to_json(report.u_radii);
    if (!report.g_radii.empty()) j["g_radii"] = map_to_json(report.g_radii);
    if (!report.u_estimates.empty()) j["u_estimates"] = map_to_json(report.u_estimates);
    if (!report.g_estimates.empty()) j["g_estimates"] = map_to_json(report.g_estimates);
    return j;
}

}  // namespace uniqode::identify
