#ifndef UNIQODE_ODE_HPP
#define UNIQODE_ODE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "uniqode/errors.hpp"

namespace uniqode::ode {

using Vec = std::vector<double>;
using StateFn = std::function<double(double t, const Vec& x)>;
// Gradient of a StateFn with respect to x, written into the last argument.
using StateGradFn = std::function<void(double t, const Vec& x, Vec& grad)>;
using YFn = std::function<double(const Vec& y)>;
using YGradFn = std::function<void(const Vec& y, Vec& grad)>;

// One structured right-hand-side row:
//   beta * g(y) + C(x) * u(y) + d(x)     (growth known up to the constant)
//   psi(y)      + C(x) * u(y) + d(x)     (growth entirely unknown)
// with y the projection of x onto y_indices.
struct StructuredRow {
    int q = 0;                     // row index in the system
    std::vector<int> y_indices;    // H1: y = x[y_indices]

    bool growth_known = true;
    YFn g;                         // known growth shape (growth_known)
    YGradFn dg_dy;
    double beta_true = 0.0;
    YFn psi_true;                  // true growth (growth unknown form)

    StateFn C;
    StateGradFn dC_dx;
    StateFn d;                     // null means identically zero
    StateGradFn dd_dx;

    YFn u_true;

    Vec project_y(const Vec& x) const {
        Vec y(y_indices.size());
        project_y_into(x, y);
        return y;
    }
    void project_y_into(const Vec& x, Vec& y) const {
        y.resize(y_indices.size());
        for (size_t i = 0; i < y_indices.size(); ++i) y[i] = x[static_cast<size_t>(y_indices[i])];
    }
    double d_value(double t, const Vec& x) const { return d ? d(t, x) : 0.0; }
    double true_growth(const Vec& y) const {
        return growth_known ? beta_true * g(y) : psi_true(y);
    }
    double rhs_true(double t, const Vec& x) const {
        const Vec y = project_y(x);
        return true_growth(y) + C(t, x) * u_true(y) + d_value(t, x);
    }
};

struct KnownRow {
    StateFn f;
    StateGradFn df_dx;  // may be null; required only for UPINN training
};

// n-dimensional ODE where some rows follow the structured form above and the
// rest are fully known. Rows not listed in `structured` must have an entry in
// `known`, keyed by row index.
struct StructuredSystem {
    int n = 0;
    std::vector<StructuredRow> structured;
    std::vector<KnownRow> known;     // size n; rows covered by `structured` unused
    std::vector<bool> is_structured; // size n

    Vec x0;
    double t0 = 0.0, t1 = 10.0;
    double dt = 1e-3;
    std::string name;

    const StructuredRow& row(int q) const {
        for (const auto& r : structured)
            if (r.q == q) return r;
        throw UsageError("StructuredSystem: no structured row at index " + std::to_string(q));
    }

    void rhs(double t, const Vec& x, Vec& out) const;
    Vec rhs(double t, const Vec& x) const {
        Vec out(static_cast<size_t>(n));
        rhs(t, x, out);
        return out;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> derivatives;  // empty when has_derivatives == false
    bool has_derivatives = false;

    size_t size() const { return times.size(); }
    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
};

struct NoiseSpec {
    double fraction = 0.0;  // in [0,1]
    std::uint64_t seed = 0;
};

enum class BuiltinCase {
    ChemoInjection,       // dN = beta N(1-N) - C u(N), dC = -0.3 N C + exp(-5(t-4)^2)
    ChemoUnknownGrowth,   // dN = Psi(N) - C u(N),     dC = -0.5 N C + exp(-5(t-4)^2)
    LotkaVolterra,        // dx = a x - b x y,          dy = d x y - g y (all 1)
    ChemoScaledInjection, // case 1 with I scaled by 5, u*(N)=2N, beta*=2
};

BuiltinCase builtin_case_from_name(const std::string& name);
std::string builtin_case_name(BuiltinCase c);

StructuredSystem builtin_system(BuiltinCase c);

// Classical fixed-step RK4; the last step is shortened to land exactly on t1.
// The derivatives column holds the analytic right-hand side at each stored
// state.
Trajectory rk4_integrate(const StructuredSystem& system, const Vec& x0, double t0, double t1,
                         double dt);
Trajectory rk4_integrate(const StructuredSystem& system);

// m approximately equally spaced samples (by stored index), endpoints
// included when m >= 2.
Trajectory sample_dataset(const Trajectory& traj, size_t m);

// Multiplicative perturbation s -> s*(1+eps), eps ~ U[-fraction, fraction]
// per entry. Derivative columns are dropped unless fraction == 0.
Trajectory inject_noise(const Trajectory& traj, const NoiseSpec& spec);

// CSV exchange format: header t,x1,...,xn[,dx1,...,dxn].
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace uniqode::ode

#endif
