#ifndef UNIQODE_ADAM_HPP
#define UNIQODE_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "uniqode/errors.hpp"

namespace uniqode::ad {

struct AdamState {
    std::vector<double> first_moments;
    std::vector<double> second_moments;
    std::int64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit AdamState(size_t n = 0)
        : first_moments(n, 0.0), second_moments(n, 0.0) {}
};

// Standard bias-corrected Adam update, in place.
inline void adam_step(std::vector<double>& params, const std::vector<double>& grads,
                      AdamState& state, double lr) {
    if (params.size() != grads.size() || params.size() != state.first_moments.size() ||
        params.size() != state.second_moments.size()) {
        throw ShapeError("adam_step: params/grads/state sizes disagree");
    }
    state.step_count += 1;
    const double b1 = state.beta1, b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    for (size_t i = 0; i < params.size(); ++i) {
        double& m = state.first_moments[i];
        double& v = state.second_moments[i];
        m = b1 * m + (1.0 - b1) * grads[i];
        v = b2 * v + (1.0 - b2) * grads[i] * grads[i];
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

}  // namespace uniqode::ad

#endif
