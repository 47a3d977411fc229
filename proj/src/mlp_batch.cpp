#include <algorithm>
#include <cmath>

#include "uniqode/mlp.hpp"

// Batched counterparts of the MlpWorkspace sweeps. Activations are stored
// row-contiguously across the batch, so the innermost loops below run over
// `batch_` consecutive doubles and vectorize (including the tanh rows, which
// is why this translation unit is built with fast-math).

namespace uniqode::ad {

void MlpBatchWorkspace::resize_for(const Mlp& net, int batch, bool with_tangent) {
    const size_t n = net.layer_sizes.size();
    const size_t b = static_cast<size_t>(batch);
    act_.resize(n);
    adj_.resize(n);
    for (size_t l = 0; l < n; ++l) {
        act_[l].resize(static_cast<size_t>(net.layer_sizes[l]) * b);
        adj_[l].assign(static_cast<size_t>(net.layer_sizes[l]) * b, 0.0);
    }
    if (with_tangent) {
        tan_.resize(n);
        adj_tan_.resize(n);
        for (size_t l = 0; l < n; ++l) {
            tan_[l].resize(static_cast<size_t>(net.layer_sizes[l]) * b);
            adj_tan_[l].assign(static_cast<size_t>(net.layer_sizes[l]) * b, 0.0);
        }
    }
    batch_ = batch;
    have_tangent_ = with_tangent;
}

const std::vector<double>& MlpBatchWorkspace::forward(const Mlp& net, const std::vector<double>& x,
                                                      int batch) {
    if (batch <= 0 || x.size() != static_cast<size_t>(net.input_width()) * batch) {
        throw ShapeError("MlpBatchWorkspace::forward: input size does not match batch");
    }
    resize_for(net, batch, false);
    act_[0] = x;
    const size_t B = static_cast<size_t>(batch);
    for (int l = 0; l < net.num_layers(); ++l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const double* w = net.weights[static_cast<size_t>(l)].data();
        const double* prev = act_[static_cast<size_t>(l)].data();
        double* out = act_[static_cast<size_t>(l) + 1].data();
        const bool hidden = (l + 1 < net.num_layers());
        for (int r = 0; r < rows; ++r) {
            double* __restrict__ z = out + static_cast<size_t>(r) * B;
            std::fill(z, z + B, net.biases[static_cast<size_t>(l)][static_cast<size_t>(r)]);
            const double* wr = w + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) {
                const double wv = wr[c];
                const double* __restrict__ a = prev + static_cast<size_t>(c) * B;
                for (size_t b = 0; b < B; ++b) z[b] += wv * a[b];
            }
            if (hidden) {
                for (size_t b = 0; b < B; ++b) z[b] = std::tanh(z[b]);
            }
        }
    }
    return act_.back();
}

const std::vector<double>& MlpBatchWorkspace::forward_with_tangent(const Mlp& net,
                                                                   const std::vector<double>& x,
                                                                   const std::vector<double>& x_dot,
                                                                   int batch,
                                                                   std::vector<double>* y_dot) {
    if (batch <= 0 || x.size() != static_cast<size_t>(net.input_width()) * batch ||
        x_dot.size() != x.size()) {
        throw ShapeError("MlpBatchWorkspace::forward_with_tangent: input size mismatch");
    }
    resize_for(net, batch, true);
    act_[0] = x;
    tan_[0] = x_dot;
    const size_t B = static_cast<size_t>(batch);
    for (int l = 0; l < net.num_layers(); ++l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const double* w = net.weights[static_cast<size_t>(l)].data();
        const double* prev = act_[static_cast<size_t>(l)].data();
        const double* prev_t = tan_[static_cast<size_t>(l)].data();
        double* out = act_[static_cast<size_t>(l) + 1].data();
        double* out_t = tan_[static_cast<size_t>(l) + 1].data();
        const bool hidden = (l + 1 < net.num_layers());
        for (int r = 0; r < rows; ++r) {
            double* __restrict__ z = out + static_cast<size_t>(r) * B;
            double* __restrict__ zd = out_t + static_cast<size_t>(r) * B;
            std::fill(z, z + B, net.biases[static_cast<size_t>(l)][static_cast<size_t>(r)]);
            std::fill(zd, zd + B, 0.0);
            const double* wr = w + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) {
                const double wv = wr[c];
                const double* __restrict__ a = prev + static_cast<size_t>(c) * B;
                const double* __restrict__ t = prev_t + static_cast<size_t>(c) * B;
                for (size_t b = 0; b < B; ++b) {
                    z[b] += wv * a[b];
                    zd[b] += wv * t[b];
                }
            }
            if (hidden) {
                for (size_t b = 0; b < B; ++b) {
                    const double a = std::tanh(z[b]);
                    z[b] = a;
                    zd[b] *= 1.0 - a * a;
                }
            }
        }
    }
    if (y_dot) *y_dot = tan_.back();
    return act_.back();
}

void MlpBatchWorkspace::backward(const Mlp& net, const std::vector<double>& grad_y, MlpGrad& grad,
                                 std::vector<double>* grad_x) {
    const size_t B = static_cast<size_t>(batch_);
    if (batch_ <= 0 || grad_y.size() != static_cast<size_t>(net.output_width()) * B) {
        throw ShapeError("MlpBatchWorkspace::backward: output adjoint size mismatch");
    }
    adj_.back() = grad_y;
    for (int l = net.num_layers() - 1; l >= 0; --l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const bool hidden = (l + 1 < net.num_layers());
        const double* a_out = act_[static_cast<size_t>(l) + 1].data();
        const double* a_in = act_[static_cast<size_t>(l)].data();
        const double* abar = adj_[static_cast<size_t>(l) + 1].data();
        zbar_.resize(static_cast<size_t>(rows) * B);
        for (int r = 0; r < rows; ++r) {
            double* __restrict__ zb = zbar_.data() + static_cast<size_t>(r) * B;
            const double* __restrict__ ab = abar + static_cast<size_t>(r) * B;
            const double* __restrict__ ao = a_out + static_cast<size_t>(r) * B;
            if (hidden) {
                for (size_t b = 0; b < B; ++b) zb[b] = ab[b] * (1.0 - ao[b] * ao[b]);
            } else {
                std::copy(ab, ab + B, zb);
            }
        }
        double* wg = grad.weights[static_cast<size_t>(l)].data();
        double* bg = grad.biases[static_cast<size_t>(l)].data();
        const double* w = net.weights[static_cast<size_t>(l)].data();
        std::fill(adj_[static_cast<size_t>(l)].begin(), adj_[static_cast<size_t>(l)].end(), 0.0);
        double* abar_in = adj_[static_cast<size_t>(l)].data();
        for (int r = 0; r < rows; ++r) {
            const double* __restrict__ zb = zbar_.data() + static_cast<size_t>(r) * B;
            double bsum = 0.0;
            for (size_t b = 0; b < B; ++b) bsum += zb[b];
            bg[r] += bsum;
            double* wgr = wg + static_cast<size_t>(r) * cols;
            const double* wr = w + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) {
                const double* __restrict__ ai = a_in + static_cast<size_t>(c) * B;
                double* __restrict__ abi = abar_in + static_cast<size_t>(c) * B;
                const double wv = wr[c];
                double wsum = 0.0;
                for (size_t b = 0; b < B; ++b) {
                    wsum += zb[b] * ai[b];
                    abi[b] += wv * zb[b];
                }
                wgr[c] += wsum;
            }
        }
    }
    if (grad_x) *grad_x = adj_[0];
}

void MlpBatchWorkspace::backward_with_tangent(const Mlp& net, const std::vector<double>& grad_y,
                                              const std::vector<double>& grad_y_dot, MlpGrad& grad,
                                              std::vector<double>* grad_x,
                                              std::vector<double>* grad_x_dot) {
    const size_t B = static_cast<size_t>(batch_);
    if (!have_tangent_) {
        throw UsageError("batched backward_with_tangent requires a tangent forward first");
    }
    if (grad_y.size() != static_cast<size_t>(net.output_width()) * B ||
        grad_y_dot.size() != grad_y.size()) {
        throw ShapeError("MlpBatchWorkspace::backward_with_tangent: adjoint size mismatch");
    }
    adj_.back() = grad_y;
    adj_tan_.back() = grad_y_dot;
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
        zbar_.resize(static_cast<size_t>(rows) * B);
        zdbar_.resize(static_cast<size_t>(rows) * B);
        for (int r = 0; r < rows; ++r) {
            double* __restrict__ zb = zbar_.data() + static_cast<size_t>(r) * B;
            double* __restrict__ zdb = zdbar_.data() + static_cast<size_t>(r) * B;
            const double* __restrict__ ab = abar + static_cast<size_t>(r) * B;
            const double* __restrict__ tb = tbar + static_cast<size_t>(r) * B;
            const double* __restrict__ ao = a_out + static_cast<size_t>(r) * B;
            const double* __restrict__ to = t_out + static_cast<size_t>(r) * B;
            if (hidden) {
                for (size_t b = 0; b < B; ++b) {
                    const double sp = 1.0 - ao[b] * ao[b];
                    // a = tanh(z), adot = sp * zdot; d(adot)/dz = -2 a adot.
                    zb[b] = ab[b] * sp - tb[b] * 2.0 * ao[b] * to[b];
                    zdb[b] = tb[b] * sp;
                }
            } else {
                std::copy(ab, ab + B, zb);
                std::copy(tb, tb + B, zdb);
            }
        }
        double* wg = grad.weights[static_cast<size_t>(l)].data();
        double* bg = grad.biases[static_cast<size_t>(l)].data();
        const double* w = net.weights[static_cast<size_t>(l)].data();
        std::fill(adj_[static_cast<size_t>(l)].begin(), adj_[static_cast<size_t>(l)].end(), 0.0);
        std::fill(adj_tan_[static_cast<size_t>(l)].begin(), adj_tan_[static_cast<size_t>(l)].end(),
                  0.0);
        double* abar_in = adj_[static_cast<size_t>(l)].data();
        double* tbar_in = adj_tan_[static_cast<size_t>(l)].data();
        for (int r = 0; r < rows; ++r) {
            const double* __restrict__ zb = zbar_.data() + static_cast<size_t>(r) * B;
            const double* __restrict__ zdb = zdbar_.data() + static_cast<size_t>(r) * B;
            double bsum = 0.0;
            for (size_t b = 0; b < B; ++b) bsum += zb[b];
            bg[r] += bsum;
            double* wgr = wg + static_cast<size_t>(r) * cols;
            const double* wr = w + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) {
                const double* __restrict__ ai = a_in + static_cast<size_t>(c) * B;
                const double* __restrict__ ti = t_in + static_cast<size_t>(c) * B;
                double* __restrict__ abi = abar_in + static_cast<size_t>(c) * B;
                double* __restrict__ tbi = tbar_in + static_cast<size_t>(c) * B;
                const double wv = wr[c];
                double wsum = 0.0;
                for (size_t b = 0; b < B; ++b) {
                    // z = W a + b, zdot = W adot: W feeds both paths.
                    wsum += zb[b] * ai[b] + zdb[b] * ti[b];
                    abi[b] += wv * zb[b];
                    tbi[b] += wv * zdb[b];
                }
                wgr[c] += wsum;
            }
        }
    }
    if (grad_x) *grad_x = adj_[0];
    if (grad_x_dot) *grad_x_dot = adj_tan_[0];
}

}  // namespace uniqode::ad
