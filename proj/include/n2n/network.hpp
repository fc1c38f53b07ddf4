#pragma once

#include <cstdint>
#include <vector>

#include "n2n/matrix.hpp"

namespace n2n {

struct NetworkSpec {
    std::vector<std::size_t> layer_dims;  // [d0, d1, ..., dL], d0 = inputs, dL = classes
    std::size_t skip_span = 2;            // layers jumped by one skip connection
    std::uint64_t seed = 0;

    std::size_t weight_layers() const { return layer_dims.empty() ? 0 : layer_dims.size() - 1; }
    void validate() const;
};

// Sparse learnable connection from activation layer `from_layer` into the
// pre-activation of layer `to_layer` (= from_layer + k).
struct SkipConn {
    std::size_t from_layer = 0;
    std::size_t to_layer = 0;
    Matrix weight;  // (dim of target pre-activation) x (dim of source activation)
    Mask mask;
};

struct Network {
    std::vector<std::size_t> layer_dims;
    std::size_t skip_span = 2;
    std::vector<Matrix> seq_weights;            // W_i: d_{i+1} x d_i
    std::vector<Mask> seq_masks;
    std::vector<std::vector<double>> biases;    // one per sequential layer, never pruned
    std::vector<SkipConn> skips;

    std::size_t weight_layers() const { return seq_weights.size(); }
    std::size_t reference_param_count() const;  // sum over layers of d_{i+1} * d_i
    std::size_t total_nnz() const;              // sequential + skip mask nnz
};

// Everything forward produces that backward needs. Activation index 0 is the
// input; index L holds the raw logits.
struct Activations {
    std::vector<std::vector<double>> a;       // a[0] = x, a[l] = g(z[l]) (a[L] = z[L])
    std::vector<std::vector<double>> z;       // z[l], l >= 1, includes skip contributions
    std::vector<std::vector<double>> skip_u;  // per skip: u = (W_skip (.) M_skip) a[from]
};

struct Gradients {
    std::vector<Matrix> seq_weights;
    std::vector<std::vector<double>> biases;
    std::vector<Matrix> skip_weights;  // aligned with Network::skips

    void add_scaled(const Gradients& other, double scale);
    void scale(double s);
};

Gradients zero_gradients_like(const Network& net);

// He-initialized dense network: weights ~ N(0, 2/fan_in), zero biases,
// all-ones masks, no skips. Deterministic in spec.seed.
Network build_network(const NetworkSpec& spec);

// z^{l+1} = (W_l (.) M_l) a^l + b_l, plus g(skip(a^src)) added to the target
// pre-activation before the outer nonlinearity. Final layer emits raw logits.
Activations forward(const Network& net, const std::vector<double>& x);

// Reverse-mode gradients of softmax cross-entropy at `label`. Gradients at
// masked positions are exactly 0; both the sequential and skip paths carry
// signal (the inner nonlinearity contributes its own relu_grad factor).
Gradients backward(const Network& net, const Activations& acts, std::size_t label);

}  // namespace n2n
