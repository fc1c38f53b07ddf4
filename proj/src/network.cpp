#include "n2n/network.hpp"

#include <cmath>
#include <string>

#include "n2n/errors.hpp"
#include "n2n/rng.hpp"

namespace n2n {

void NetworkSpec::validate() const {
    if (layer_dims.size() < 3) {
        throw ConfigError("network needs at least 3 layer dims (got " +
                          std::to_string(layer_dims.size()) + ")");
    }
    for (const std::size_t d : layer_dims) {
        if (d == 0) throw ConfigError("layer dims must be positive");
    }
    if (skip_span < 2) {
        throw ConfigError("skip span must be >= 2 (got " + std::to_string(skip_span) + ")");
    }
}

std::size_t Network::reference_param_count() const {
    std::size_t total = 0;
    for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
        total += layer_dims[i + 1] * layer_dims[i];
    }
    return total;
}

std::size_t Network::total_nnz() const {
    std::size_t total = 0;
    for (const Mask& m : seq_masks) total += m.nnz();
    for (const SkipConn& s : skips) total += s.mask.nnz();
    return total;
}

void Gradients::add_scaled(const Gradients& other, double scale) {
    for (std::size_t l = 0; l < seq_weights.size(); ++l) {
        for (std::size_t i = 0; i < seq_weights[l].data.size(); ++i) {
            seq_weights[l].data[i] += scale * other.seq_weights[l].data[i];
        }
        for (std::size_t i = 0; i < biases[l].size(); ++i) {
            biases[l][i] += scale * other.biases[l][i];
        }
    }
    for (std::size_t s = 0; s < skip_weights.size(); ++s) {
        for (std::size_t i = 0; i < skip_weights[s].data.size(); ++i) {
            skip_weights[s].data[i] += scale * other.skip_weights[s].data[i];
        }
    }
}

void Gradients::scale(double s) {
    for (Matrix& w : seq_weights)
        for (double& v : w.data) v *= s;
    for (auto& b : biases)
        for (double& v : b) v *= s;
    for (Matrix& w : skip_weights)
        for (double& v : w.data) v *= s;
}

Gradients zero_gradients_like(const Network& net) {
    Gradients g;
    for (std::size_t l = 0; l < net.seq_weights.size(); ++l) {
        g.seq_weights.emplace_back(net.seq_weights[l].rows, net.seq_weights[l].cols);
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    for (const SkipConn& s : net.skips) {
        g.skip_weights.emplace_back(s.weight.rows, s.weight.cols);
    }
    return g;
}

Network build_network(const NetworkSpec& spec) {
    spec.validate();
    Network net;
    net.layer_dims = spec.layer_dims;
    net.skip_span = spec.skip_span;
    Rng rng(spec.seed);
    for (std::size_t i = 0; i + 1 < spec.layer_dims.size(); ++i) {
        const std::size_t fan_in = spec.layer_dims[i];
        const std::size_t fan_out = spec.layer_dims[i + 1];
        Matrix w(fan_out, fan_in);
        const double sigma = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (double& v : w.data) v = rng.normal(0.0, sigma);
        net.seq_weights.push_back(std::move(w));
        net.seq_masks.emplace_back(fan_out, fan_in, 1);
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

Activations forward(const Network& net, const std::vector<double>& x) {
    const std::size_t layers = net.weight_layers();
    if (x.size() != net.layer_dims[0]) {
        throw DimensionError("forward input length " + std::to_string(x.size()) +
                             " does not match input dim " + std::to_string(net.layer_dims[0]));
    }
    Activations acts;
    acts.a.resize(layers + 1);
    acts.z.resize(layers + 1);
    acts.skip_u.resize(net.skips.size());
    acts.a[0] = x;

    for (std::size_t l = 1; l <= layers; ++l) {
        std::vector<double> z =
            masked_matvec(net.seq_weights[l - 1], net.seq_masks[l - 1], acts.a[l - 1]);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += net.biases[l - 1][i];
        // Skip branch lands on the pre-activation, inside the outer g.
        for (std::size_t s = 0; s < net.skips.size(); ++s) {
            const SkipConn& skip = net.skips[s];
            if (skip.to_layer != l) continue;
            acts.skip_u[s] = masked_matvec(skip.weight, skip.mask, acts.a[skip.from_layer]);
            const std::vector<double> gu = relu(acts.skip_u[s]);
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += gu[i];
        }
        acts.z[l] = z;
        acts.a[l] = (l == layers) ? z : relu(z);
    }
    return acts;
}

Gradients backward(const Network& net, const Activations& acts, std::size_t label) {
    const std::size_t layers = net.weight_layers();
    if (acts.a.size() != layers + 1 || acts.a[0].size() != net.layer_dims[0]) {
        throw DimensionError("activations do not match network shape");
    }
    Gradients grads = zero_gradients_like(net);

    auto [loss, dlogits] = softmax_xent(acts.a[layers], label);
    (void)loss;

    // d_a[l] accumulates contributions from every consumer of a[l] (the next
    // sequential layer plus any skip sourced at l) before conversion to dz.
    std::vector<std::vector<double>> d_a(layers + 1);
    for (std::size_t l = 0; l <= layers; ++l) d_a[l].assign(net.layer_dims[l], 0.0);
    d_a[layers] = dlogits;

    for (std::size_t l = layers; l >= 1; --l) {
        std::vector<double> dz = d_a[l];
        if (l != layers) {
            const std::vector<double> g = relu_grad(acts.z[l]);
            for (std::size_t i = 0; i < dz.size(); ++i) dz[i] *= g[i];
        }

        const Matrix& w = net.seq_weights[l - 1];
        const Mask& m = net.seq_masks[l - 1];
        Matrix& dw = grads.seq_weights[l - 1];
        const std::vector<double>& src = acts.a[l - 1];
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double dzr = dz[r];
            grads.biases[l - 1][r] += dzr;
            if (dzr == 0.0) continue;
            for (std::size_t c = 0; c < w.cols; ++c) {
                if (m(r, c)) dw(r, c) += dzr * src[c];
            }
        }
        {
            const std::vector<double> back = masked_matvec_t(w, m, dz);
            for (std::size_t c = 0; c < back.size(); ++c) d_a[l - 1][c] += back[c];
        }

        for (std::size_t s = 0; s < net.skips.size(); ++s) {
            const SkipConn& skip = net.skips[s];
            if (skip.to_layer != l) continue;
            const std::vector<double> gu = relu_grad(acts.skip_u[s]);
            std::vector<double> du(dz.size());
            for (std::size_t i = 0; i < du.size(); ++i) du[i] = dz[i] * gu[i];

            Matrix& dws = grads.skip_weights[s];
            const std::vector<double>& ssrc = acts.a[skip.from_layer];
            for (std::size_t r = 0; r < skip.weight.rows; ++r) {
                const double dur = du[r];
                if (dur == 0.0) continue;
                for (std::size_t c = 0; c < skip.weight.cols; ++c) {
                    if (skip.mask(r, c)) dws(r, c) += dur * ssrc[c];
                }
            }
            const std::vector<double> back = masked_matvec_t(skip.weight, skip.mask, du);
            for (std::size_t c = 0; c < back.size(); ++c) d_a[skip.from_layer][c] += back[c];
        }
    }
    return grads;
}

}  // namespace n2n
