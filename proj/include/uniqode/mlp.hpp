#ifndef UNIQODE_MLP_HPP
#define UNIQODE_MLP_HPP

#include <cstdint>
#include <vector>

#include "uniqode/autodiff.hpp"

namespace uniqode::ad {

// Feedforward network, tanh on hidden layers, identity on the output layer.
// weights[l] is row-major (layer_sizes[l+1] x layer_sizes[l]).
struct Mlp {
    std::vector<int> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    int input_width() const { return layer_sizes.front(); }
    int output_width() const { return layer_sizes.back(); }
    int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
    int param_count() const;

    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& flat);
};

// Deterministic symmetric-uniform init scaled by sqrt(6/(fan_in+fan_out)),
// biases zero.
Mlp init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed);

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input);

// Records a forward pass on the tape. `input_vars` are already-recorded tape
// indices (one per input component). On return, `param_vars` (if non-null)
// holds the tape indices of the leaves created for each parameter, in the
// same order as Mlp::flatten().
std::vector<ad::Tape::Index> mlp_forward_tape(const Mlp& net, Tape& tape,
                                              const std::vector<ad::Tape::Index>& input_vars,
                                              std::vector<ad::Tape::Index>* param_vars = nullptr);

// Gradient accumulator matching the Mlp parameter layout.
struct MlpGrad {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    explicit MlpGrad(const Mlp& net);
    MlpGrad() = default;
    void zero();
    std::vector<double> flatten() const;
};

// Reusable buffers for repeated forward/backward sweeps through one network
// shape. backward() must follow the matching forward() on the same input.
//
// forward_with_tangent additionally propagates an input-direction tangent
// (forward mode), so the caller gets dy/dt alongside y when the input is a
// scalar path x(t); backward_with_tangent then pulls adjoints of both y and
// dy/dt back onto the parameters and the input.
class MlpWorkspace {
public:
    const std::vector<double>& forward(const Mlp& net, const std::vector<double>& x);

    const std::vector<double>& forward_with_tangent(const Mlp& net, const std::vector<double>& x,
                                                    const std::vector<double>& x_dot,
                                                    std::vector<double>* y_dot);

    // grad_y: adjoint of the output. Accumulates into `grad`; writes the
    // input adjoint into *grad_x when non-null.
    void backward(const Mlp& net, const std::vector<double>& grad_y, MlpGrad& grad,
                  std::vector<double>* grad_x = nullptr);

    // grad_y / grad_y_dot: adjoints of y and dy/dt from forward_with_tangent.
    void backward_with_tangent(const Mlp& net, const std::vector<double>& grad_y,
                               const std::vector<double>& grad_y_dot, MlpGrad& grad,
                               std::vector<double>* grad_x = nullptr,
                               std::vector<double>* grad_x_dot = nullptr);

private:
    void resize_for(const Mlp& net, bool with_tangent);

    // act_[l]: activations of layer l (act_[0] = input), tan_[l]: their
    // d/dt tangents. adj_/adj_tan_ are the reverse-sweep counterparts.
    std::vector<std::vector<double>> act_, tan_;
    std::vector<std::vector<double>> adj_, adj_tan_;
    std::vector<double> zbar_, zdbar_;  // scratch for the reverse sweeps
    bool have_tangent_ = false;
};

// Same sweeps as MlpWorkspace but over a whole batch of inputs at once, with
// per-layer activations stored contiguously so the inner loops vectorize.
// Every matrix argument and result uses the layout entry(r, b) = r*batch + b.
class MlpBatchWorkspace {
public:
    const std::vector<double>& forward(const Mlp& net, const std::vector<double>& x, int batch);

    const std::vector<double>& forward_with_tangent(const Mlp& net, const std::vector<double>& x,
                                                    const std::vector<double>& x_dot, int batch,
                                                    std::vector<double>* y_dot = nullptr);

    // Adjoints are summed over the batch into `grad`; *grad_x (input_width x
    // batch) gets the per-sample input adjoints.
    void backward(const Mlp& net, const std::vector<double>& grad_y, MlpGrad& grad,
                  std::vector<double>* grad_x = nullptr);

    void backward_with_tangent(const Mlp& net, const std::vector<double>& grad_y,
                               const std::vector<double>& grad_y_dot, MlpGrad& grad,
                               std::vector<double>* grad_x = nullptr,
                               std::vector<double>* grad_x_dot = nullptr);

    const std::vector<double>& outputs() const { return act_.back(); }
    const std::vector<double>& output_tangents() const { return tan_.back(); }

private:
    void resize_for(const Mlp& net, int batch, bool with_tangent);

    std::vector<std::vector<double>> act_, tan_;
    std::vector<std::vector<double>> adj_, adj_tan_;
    std::vector<double> zbar_, zdbar_;
    int batch_ = 0;
    bool have_tangent_ = false;
};

}  // namespace uniqode::ad

#endif
