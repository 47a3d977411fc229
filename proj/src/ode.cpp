#include "uniqode/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "uniqode/io.hpp"

namespace uniqode::ode {

void StructuredSystem::rhs(double t, const Vec& x, Vec& out) const {
    out.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<size_t>(i)] = is_structured[static_cast<size_t>(i)]
                                          ? row(i).rhs_true(t, x)
                                          : known[static_cast<size_t>(i)].f(t, x);
    }
}

BuiltinCase builtin_case_from_name(const std::string& name) {
    if (name == "chemo_injection") return BuiltinCase::ChemoInjection;
    if (name == "chemo_unknown_growth") return BuiltinCase::ChemoUnknownGrowth;
    if (name == "lotka_volterra") return BuiltinCase::LotkaVolterra;
    if (name == "chemo_scaled_injection") return BuiltinCase::ChemoScaledInjection;
    throw ConfigError("unknown builtin system: " + name);
}

std::string builtin_case_name(BuiltinCase c) {
    switch (c) {
        case BuiltinCase::ChemoInjection: return "chemo_injection";
        case BuiltinCase::ChemoUnknownGrowth: return "chemo_unknown_growth";
        case BuiltinCase::LotkaVolterra: return "lotka_volterra";
        case BuiltinCase::ChemoScaledInjection: return "chemo_scaled_injection";
    }
    throw ConfigError("unknown builtin case");
}

namespace {

StructuredSystem chemo_system(double gamma, double injection_scale, double beta_true,
                              bool growth_known, YFn u_true, const Vec& x0,
                              const std::string& name) {
    StructuredSystem sys;
    sys.n = 2;
    sys.name = name;
    sys.x0 = x0;
    sys.is_structured = {true, false};

    StructuredRow r;
    r.q = 0;
    r.y_indices = {0};
    r.growth_known = growth_known;
    if (growth_known) {
        r.g = [](const Vec& y) { return y[0] * (1.0 - y[0]); };
        r.dg_dy = [](const Vec& y, Vec& grad) { grad = {1.0 - 2.0 * y[0]}; };
        r.beta_true = beta_true;
    } else {
        r.psi_true = [beta_true](const Vec& y) { return beta_true * y[0] * (1.0 - y[0]); };
    }
    // The drug term enters as -C(t) u(N), so the theorem-form C(x) is -x2.
    r.C = [](double, const Vec& x) { return -x[1]; };
    r.dC_dx = [](double, const Vec&, Vec& grad) { grad = {0.0, -1.0}; };
    r.u_true = std::move(u_true);
    sys.structured.push_back(std::move(r));

    sys.known.resize(2);
    sys.known[1].f = [gamma, injection_scale](double t, const Vec& x) {
        const double dtc = t - 4.0;
        return -gamma * x[0] * x[1] + injection_scale * std::exp(-5.0 * dtc * dtc);
    };
    sys.known[1].df_dx = [gamma](double, const Vec& x, Vec& grad) {
        grad = {-gamma * x[1], -gamma * x[0]};
    };
    return sys;
}

}  // namespace

StructuredSystem builtin_system(BuiltinCase c) {
    switch (c) {
        case BuiltinCase::ChemoInjection:
            return chemo_system(0.3, 1.0, 1.0, true, [](const Vec& y) { return y[0]; },
                                {1.0, 1.0}, "chemo_injection");
        case BuiltinCase::ChemoUnknownGrowth:
            return chemo_system(0.5, 1.0, 1.0, false, [](const Vec& y) { return y[0]; },
                                {0.01, 0.1}, "chemo_unknown_growth");
        case BuiltinCase::ChemoScaledInjection:
            return chemo_system(0.3, 5.0, 2.0, true, [](const Vec& y) { return 2.0 * y[0]; },
                                {0.01, 0.1}, "chemo_scaled_injection");
        case BuiltinCase::LotkaVolterra: {
            StructuredSystem sys;
            sys.n = 2;
            sys.name = "lotka_volterra";
            sys.x0 = {2.0, 4.0};
            sys.is_structured = {true, true};
            sys.known.resize(2);

            // dx/dt = alpha*x - (beta*x)*y: g = x, C = -y, u = beta*x.
            StructuredRow prey;
            prey.q = 0;
            prey.y_indices = {0};
            prey.g = [](const Vec& y) { return y[0]; };
            prey.dg_dy = [](const Vec&, Vec& grad) { grad = {1.0}; };
            prey.beta_true = 1.0;  // alpha
            prey.C = [](double, const Vec& x) { return -x[1]; };
            prey.dC_dx = [](double, const Vec&, Vec& grad) { grad = {0.0, -1.0}; };
            prey.u_true = [](const Vec& y) { return y[0]; };
            sys.structured.push_back(std::move(prey));

            // dy/dt = -gamma*y + (delta*y)*x: g = -y, C = x, u = delta*y.
            StructuredRow predator;
            predator.q = 1;
            predator.y_indices = {1};
            predator.g = [](const Vec& y) { return -y[0]; };
            predator.dg_dy = [](const Vec&, Vec& grad) { grad = {-1.0}; };
            predator.beta_true = 1.0;  // gamma
            predator.C = [](double, const Vec& x) { return x[0]; };
            predator.dC_dx = [](double, const Vec&, Vec& grad) { grad = {1.0, 0.0}; };
            predator.u_true = [](const Vec& y) { return y[0]; };
            sys.structured.push_back(std::move(predator));
            return sys;
        }
    }
    throw ConfigError("unknown builtin case");
}

Trajectory rk4_integrate(const StructuredSystem& system, const Vec& x0, double t0, double t1,
                         double dt) {
    if (dt <= 0.0) throw ConfigError("rk4_integrate: dt must be positive");
    if (t1 <= t0) throw ConfigError("rk4_integrate: t1 must exceed t0");
    if (static_cast<int>(x0.size()) != system.n) {
        throw ShapeError("rk4_integrate: x0 width does not match system dimension");
    }

    Trajectory traj;
    traj.has_derivatives = true;
    Vec x = x0, k1, k2, k3, k4, tmp(x0.size());

    auto check_finite = [](const Vec& v, double t) {
        for (double s : v) {
            if (!std::isfinite(s)) {
                throw IntegrationBlowupError(
                    "rk4_integrate: non-finite state at t=" + std::to_string(t), t);
            }
        }
    };

    double t = t0;
    const auto store = [&](double tt, const Vec& xx) {
        check_finite(xx, tt);
        traj.times.push_back(tt);
        traj.states.push_back(xx);
        traj.derivatives.push_back(system.rhs(tt, xx));
    };
    store(t, x);

    // Track the step count so t carries no accumulated rounding error; a
    // remainder below dt*1e-9 counts as landing on t1 exactly.
    std::size_t step = 0;
    while (t1 - t > dt * 1e-9) {
        const double h = std::min(dt, t1 - t);
        system.rhs(t, x, k1);
        for (size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        system.rhs(t + 0.5 * h, tmp, k2);
        for (size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        system.rhs(t + 0.5 * h, tmp, k3);
        for (size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + h * k3[i];
        system.rhs(t + h, tmp, k4);
        for (size_t i = 0; i < x.size(); ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        ++step;
        t = (h == dt) ? t0 + static_cast<double>(step) * dt : t1;
        store(t, x);
    }
    return traj;
}

Trajectory rk4_integrate(const StructuredSystem& system) {
    return rk4_integrate(system, system.x0, system.t0, system.t1, system.dt);
}

Trajectory sample_dataset(const Trajectory& traj, size_t m) {
    if (m == 0) throw ConfigError("sample_dataset: m must be >= 1");
    if (m > traj.size()) throw ConfigError("sample_dataset: m exceeds stored sample count");
    Trajectory out;
    out.has_derivatives = traj.has_derivatives;
    const size_t last = traj.size() - 1;
    for (size_t r = 0; r < m; ++r) {
        const size_t idx =
            (m == 1) ? 0
                     : static_cast<size_t>(std::llround(static_cast<double>(r) *
                                                        static_cast<double>(last) /
                                                        static_cast<double>(m - 1)));
        out.times.push_back(traj.times[idx]);
        out.states.push_back(traj.states[idx]);
        if (traj.has_derivatives) out.derivatives.push_back(traj.derivatives[idx]);
    }
    return out;
}

Trajectory inject_noise(const Trajectory& traj, const NoiseSpec& spec) {
    if (spec.fraction < 0.0 || spec.fraction > 1.0) {
        throw ConfigError("inject_noise: fraction must lie in [0,1]");
    }
    if (spec.fraction == 0.0) return traj;
    Trajectory out;
    out.times = traj.times;
    out.states = traj.states;
    out.has_derivatives = false;  // exact derivatives do not survive perturbation
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> dist(-spec.fraction, spec.fraction);
    for (auto& row : out.states) {
        for (double& s : row) s *= 1.0 + dist(rng);
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const int n = traj.dim();
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    if (traj.has_derivatives) {
        for (int i = 1; i <= n; ++i) out << ",dx" << i;
    }
    out << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
    };
    for (size_t r = 0; r < traj.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[r]);
        out << buf;
        for (double v : traj.states[r]) put(v);
        if (traj.has_derivatives) {
            for (double v : traj.derivatives[r]) put(v);
        }
        out << "\n";
    }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ostringstream ss;
    write_trajectory_csv(traj, ss);
    io::atomic_write_file(path, ss.str());
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("trajectory CSV: empty file");
    std::vector<std::string> header;
    {
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    if (header.empty() || header[0] != "t") {
        throw DataError("trajectory CSV: header must start with 't'");
    }
    int n = 0;
    bool derivs = false;
    for (size_t i = 1; i < header.size(); ++i) {
        if (header[i].rfind("dx", 0) == 0) {
            derivs = true;
        } else if (header[i].rfind('x', 0) == 0 && !derivs) {
            ++n;
        } else if (!derivs) {
            throw DataError("trajectory CSV: unexpected header column " + header[i]);
        }
    }
    if (derivs && header.size() != static_cast<size_t>(1 + 2 * n)) {
        throw DataError("trajectory CSV: derivative columns do not match state columns");
    }
    Trajectory traj;
    traj.has_derivatives = derivs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != header.size()) {
            throw DataError("trajectory CSV: row width does not match header");
        }
        traj.times.push_back(vals[0]);
        traj.states.emplace_back(vals.begin() + 1, vals.begin() + 1 + n);
        if (derivs) traj.derivatives.emplace_back(vals.begin() + 1 + n, vals.end());
    }
    return traj;
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trajectory CSV: " + path);
    return read_trajectory_csv(in);
}

}  // namespace uniqode::ode
