#include "uniqode/mlp.hpp"

#include <cmath>
#include <random>

#include "uniqode/errors.hpp"

namespace uniqode::ad {

int Mlp::param_count() const {
    int n = 0;
    for (int l = 0; l < num_layers(); ++l) {
        n += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
    }
    return n;
}

std::vector<double> Mlp::flatten() const {
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(param_count()));
    for (int l = 0; l < num_layers(); ++l) {
        flat.insert(flat.end(), weights[l].begin(), weights[l].end());
        flat.insert(flat.end(), biases[l].begin(), biases[l].end());
    }
    return flat;
}

void Mlp::unflatten(const std::vector<double>& flat) {
    if (static_cast<int>(flat.size()) != param_count()) {
        throw ShapeError("Mlp::unflatten: flat vector size does not match parameter count");
    }
    size_t pos = 0;
    for (int l = 0; l < num_layers(); ++l) {
        for (double& w : weights[l]) w = flat[pos++];
        for (double& b : biases[l]) b = flat[pos++];
    }
}

Mlp init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) {
        throw ConfigError("init_mlp: layer_sizes must have at least 2 entries");
    }
    for (int s : layer_sizes) {
        if (s < 1) throw ConfigError("init_mlp: all layer sizes must be >= 1");
    }
    Mlp net;
    net.layer_sizes = layer_sizes;
    std::mt19937_64 rng(seed);
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        std::vector<double> w(static_cast<size_t>(fan_in) * fan_out);
        for (double& v : w) v = dist(rng);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(static_cast<size_t>(fan_out), 0.0);
    }
    return net;
}

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != net.input_width()) {
        throw ShapeError("mlp_forward: input width does not match layer_sizes[0]");
    }
    std::vector<double> a = input, z;
    for (int l = 0; l < net.num_layers(); ++l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const double* w = net.weights[l].data();
        z.assign(static_cast<size_t>(rows), 0.0);
        for (int r = 0; r < rows; ++r) {
            double s = net.biases[l][static_cast<size_t>(r)];
            const double* wr = w + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) s += wr[c] * a[static_cast<size_t>(c)];
            z[static_cast<size_t>(r)] = (l + 1 < net.num_layers()) ? std::tanh(s) : s;
        }
        a.swap(z);
    }
    return a;
}

std::vector<Tape::Index> mlp_forward_tape(const Mlp& net, Tape& tape,
                                          const std::vector<Tape::Index>& input_vars,
                                          std::vector<Tape::Index>* param_vars) {
    if (static_cast<int>(input_vars.size()) != net.input_width()) {
        throw ShapeError("mlp_forward_tape: input width does not match layer_sizes[0]");
    }
    std::vector<Tape::Index> a = input_vars;
    for (int l = 0; l < net.num_layers(); ++l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        std::vector<Tape::Index> wv(static_cast<size_t>(rows) * cols);
        for (size_t k = 0; k < wv.size(); ++k) wv[k] = tape.leaf(net.weights[l][k]);
        std::vector<Tape::Index> bv(static_cast<size_t>(rows));
        for (int r = 0; r < rows; ++r) bv[static_cast<size_t>(r)] = tape.leaf(net.biases[l][static_cast<size_t>(r)]);
        if (param_vars) {
            param_vars->insert(param_vars->end(), wv.begin(), wv.end());
            param_vars->insert(param_vars->end(), bv.begin(), bv.end());
        }
        std::vector<Tape::Index> z(static_cast<size_t>(rows));
        for (int r = 0; r < rows; ++r) {
            Tape::Index s = bv[static_cast<size_t>(r)];
            for (int c = 0; c < cols; ++c) {
                s = tape.add(s, tape.mul(wv[static_cast<size_t>(r) * cols + c], a[static_cast<size_t>(c)]));
            }
            z[static_cast<size_t>(r)] = (l + 1 < net.num_layers()) ? tape.tanh(s) : s;
        }
        a.swap(z);
    }
    return a;
}

MlpGrad::MlpGrad(const Mlp& net) {
    for (int l = 0; l < net.num_layers(); ++l) {
        weights.emplace_back(net.weights[l].size(), 0.0);
        biases.emplace_back(net.biases[l].size(), 0.0);
    }
}

void MlpGrad::zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

std::vector<double> MlpGrad::flatten() const {
    std::vector<double> flat;
    for (size_t l = 0; l < weights.size(); ++l) {
        flat.insert(flat.end(), weights[l].begin(), weights[l].end());
        flat.insert(flat.end(), biases[l].begin(), biases[l].end());
    }
    return flat;
}

void MlpWorkspace::resize_for(const Mlp& net, bool with_tangent) {
    const size_t n = net.layer_sizes.size();
    act_.resize(n);
    adj_.resize(n);
    for (size_t l = 0; l < n; ++l) {
        act_[l].resize(static_cast<size_t>(net.layer_sizes[l]));
        adj_[l].assign(static_cast<size_t>(net.layer_sizes[l]), 0.0);
    }
    if (with_tangent) {
        tan_.resize(n);
        adj_tan_.resize(n);
        for (size_t l = 0; l < n; ++l) {
            tan_[l].resize(static_cast<size_t>(net.layer_sizes[l]));
            adj_tan_[l].assign(static_cast<size_t>(net.layer_sizes[l]), 0.0);
        }
    }
    have_tangent_ = with_tangent;
}

const std::vector<double>& MlpWorkspace::forward(const Mlp& net, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != net.input_width()) {
        throw ShapeError("MlpWorkspace::forward: input width mismatch");
    }
    resize_for(net, false);
    act_[0] = x;
    for (int l = 0; l < net.num_layers(); ++l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const double* w = net.weights[l].data();
        const double* prev = act_[static_cast<size_t>(l)].data();
        double* out = act_[static_cast<size_t>(l) + 1].data();
        const bool hidden = (l + 1 < net.num_layers());
        for (int r = 0; r < rows; ++r) {
            double s = net.biases[l][static_cast<size_t>(r)];
            const double* wr = w + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) s += wr[c] * prev[c];
            out[r] = hidden ? std::tanh(s) : s;
        }
    }
    return act_.back();
}

const std::vector<double>& MlpWorkspace::forward_with_tangent(const Mlp& net,
                                                              const std::vector<double>& x,
                                                              const std::vector<double>& x_dot,
                                                              std::vector<double>* y_dot) {
    if (static_cast<int>(x.size()) != net.input_width() || x_dot.size() != x.size()) {
        throw ShapeError("MlpWorkspace::forward_with_tangent: input width mismatch");
    }
    resize_for(net, true);
    act_[0] = x;
    tan_[0] = x_dot;
    for (int l = 0; l < net.num_layers(); ++l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const double* w = net.weights[l].data();
        const double* prev = act_[static_cast<size_t>(l)].data();
        const double* prev_t = tan_[static_cast<size_t>(l)].data();
        double* out = act_[static_cast<size_t>(l) + 1].data();
        double* out_t = tan_[static_cast<size_t>(l) + 1].data();
        const bool hidden = (l + 1 < net.num_layers());
        for (int r = 0; r < rows; ++r) {
            double s = net.biases[l][static_cast<size_t>(r)];
            double sd = 0.0;
            const double* wr = w + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) {
                s += wr[c] * prev[c];
                sd += wr[c] * prev_t[c];
            }
            if (hidden) {
                const double a = std::tanh(s);
                out[r] = a;
                out_t[r] = (1.0 - a * a) * sd;
            } else {
                out[r] = s;
                out_t[r] = sd;
            }
        }
    }
    if (y_dot) *y_dot = tan_.back();
    return act_.back();
}

void MlpWorkspace::backward(const Mlp& net, const std::vector<double>& grad_y, MlpGrad& grad,
                            std::vector<double>* grad_x) {
    if (static_cast<int>(grad_y.size()) != net.output_width()) {
        throw ShapeError("MlpWorkspace::backward: output adjoint width mismatch");
    }
    adj_.back() = grad_y;
    std::vector<double>& zbar = zbar_;
    for (int l = net.num_layers() - 1; l >= 0; --l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const bool hidden = (l + 1 < net.num_layers());
        const double* a_out = act_[static_cast<size_t>(l) + 1].data();
        const double* a_in = act_[static_cast<size_t>(l)].data();
        const double* abar = adj_[static_cast<size_t>(l) + 1].data();
        zbar.assign(static_cast<size_t>(rows), 0.0);
        for (int r = 0; r < rows; ++r) {
            zbar[static_cast<size_t>(r)] = hidden ? abar[r] * (1.0 - a_out[r] * a_out[r]) : abar[r];
        }
        double* wg = grad.weights[static_cast<size_t>(l)].data();
        double* bg = grad.biases[static_cast<size_t>(l)].data();
        const double* w = net.weights[static_cast<size_t>(l)].data();
        std::fill(adj_[static_cast<size_t>(l)].begin(), adj_[static_cast<size_t>(l)].end(), 0.0);
        double* __restrict__ abar_in = adj_[static_cast<size_t>(l)].data();
        for (int r = 0; r < rows; ++r) {
            const double zb = zbar[static_cast<size_t>(r)];
            bg[r] += zb;
            double* __restrict__ wgr = wg + static_cast<size_t>(r) * cols;
            const double* __restrict__ wr = w + static_cast<size_t>(r) * cols;
            const double* __restrict__ ain = a_in;
            for (int c = 0; c < cols; ++c) {
                wgr[c] += zb * ain[c];
                abar_in[c] += wr[c] * zb;
            }
        }
    }
    if (grad_x) *grad_x = adj_[0];
}

void MlpWorkspace::backward_with_tangent(const Mlp& net, const std::vector<double>& grad_y,
                                         const std::vector<double>& grad_y_dot, MlpGrad& grad,
                                         std::vector<double>* grad_x,
                                         std::vector<double>* grad_x_dot) {
    if (!have_tangent_) {
        throw UsageError("backward_with_tangent requires a preceding forward_with_tangent");
    }
    adj_.back() = grad_y;
    adj_tan_.back() = grad_y_dot;
    std::vector<double>& zbar = zbar_;
    std::vector<double>& zdbar = zdbar_;
    for (int l = net.num_layers() - 1; l >= 0; --l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const bool hidden = (l + 1 < net.num_layers());
        const double* a_out = act_[static_cast<size_t>(l) + 1].data();
        const double* t_out = tan_[static_cast<size_t>(l) + 1].data();
        const double* a_in = act_[static_cast<size_t>(l)].data();
        const double* t_in = tan_[static_cast<size_t>(l)].data();
        const double* abar = adj_[static_cast<size_t>(l) + 1].data();
        const double* tbar = adj_tan_[static_cast<size_t>(l) + 1].data();
        zbar.assign(static_cast<size_t>(rows), 0.0);
        zdbar.assign(static_cast<size_t>(rows), 0.0);
        for (int r = 0; r < rows; ++r) {
            if (hidden) {
                const double sp = 1.0 - a_out[r] * a_out[r];
                // a = tanh(z), adot = sp * zdot; d(adot)/dz = -2 a adot.
                zbar[static_cast<size_t>(r)] = abar[r] * sp - tbar[r] * 2.0 * a_out[r] * t_out[r];
                zdbar[static_cast<size_t>(r)] = tbar[r] * sp;
            } else {
                zbar[static_cast<size_t>(r)] = abar[r];
                zdbar[static_cast<size_t>(r)] = tbar[r];
            }
        }
        double* wg = grad.weights[static_cast<size_t>(l)].data();
        double* bg = grad.biases[static_cast<size_t>(l)].data();
        const double* w = net.weights[static_cast<size_t>(l)].data();
        std::fill(adj_[static_cast<size_t>(l)].begin(), adj_[static_cast<size_t>(l)].end(), 0.0);
        std::fill(adj_tan_[static_cast<size_t>(l)].begin(), adj_tan_[static_cast<size_t>(l)].end(), 0.0);
        double* __restrict__ abar_in = adj_[static_cast<size_t>(l)].data();
        double* __restrict__ tbar_in = adj_tan_[static_cast<size_t>(l)].data();
        for (int r = 0; r < rows; ++r) {
            const double zb = zbar[static_cast<size_t>(r)];
            const double zdb = zdbar[static_cast<size_t>(r)];
            bg[r] += zb;
            double* __restrict__ wgr = wg + static_cast<size_t>(r) * cols;
            const double* __restrict__ wr = w + static_cast<size_t>(r) * cols;
            const double* __restrict__ ain = a_in;
            const double* __restrict__ tn = t_in;
            for (int c = 0; c < cols; ++c) {
                // z = W a + b, zdot = W adot: W feeds both paths.
                wgr[c] += zb * ain[c] + zdb * tn[c];
                abar_in[c] += wr[c] * zb;
                tbar_in[c] += wr[c] * zdb;
            }
        }
    }
    if (grad_x) *grad_x = adj_[0];
    if (grad_x_dot) *grad_x_dot = adj_tan_[0];
}

}  // namespace uniqode::ad
