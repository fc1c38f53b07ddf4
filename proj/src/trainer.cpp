#include "n2n/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "n2n/errors.hpp"
#include "n2n/rng.hpp"

namespace n2n {

namespace {

std::size_t argmax_lowest(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

void check_same_shape(const Matrix& a, const Matrix& b, const std::string& what) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw DimensionError(what + ": " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                             " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
    }
}

}  // namespace

void HyperParams::validate() const {
    if (lr0 <= 0.0) throw ConfigError("lr0 must be positive, got " + std::to_string(lr0));
    if (momentum < 0.0 || momentum >= 1.0) {
        throw ConfigError("momentum must lie in [0, 1), got " + std::to_string(momentum));
    }
    if (decay_factor <= 0.0 || decay_factor >= 1.0) {
        throw ConfigError("decay_factor must lie in (0, 1), got " + std::to_string(decay_factor));
    }
    if (decay_every == 0) throw ConfigError("decay_every must be positive");
    if (weight_decay < 0.0) {
        throw ConfigError("weight_decay must be non-negative, got " +
                          std::to_string(weight_decay));
    }
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
}

double lr_at(std::size_t epoch, const HyperParams& hp) {
    return hp.lr0 * std::pow(hp.decay_factor, static_cast<double>(epoch / hp.decay_every));
}

void sgd_step(Network& net, const Gradients& grads, Velocity& vel, double lr,
              const HyperParams& hp) {
    if (grads.seq_weights.size() != net.seq_weights.size() ||
        vel.seq_weights.size() != net.seq_weights.size() ||
        grads.skip_weights.size() != net.skips.size() ||
        vel.skip_weights.size() != net.skips.size() ||
        grads.biases.size() != net.biases.size() || vel.biases.size() != net.biases.size()) {
        throw DimensionError("gradient/velocity layout does not match the network");
    }
    for (std::size_t l = 0; l < net.seq_weights.size(); ++l) {
        Matrix& w = net.seq_weights[l];
        check_same_shape(grads.seq_weights[l], w, "gradient layer " + std::to_string(l));
        check_same_shape(vel.seq_weights[l], w, "velocity layer " + std::to_string(l));
        const Mask& m = net.seq_masks[l];
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t c = 0; c < w.cols; ++c) {
                if (!m(r, c)) continue;
                const double v = hp.momentum * vel.seq_weights[l](r, c) +
                                 grads.seq_weights[l](r, c) + hp.weight_decay * w(r, c);
                vel.seq_weights[l](r, c) = v;
                w(r, c) -= lr * v;
            }
        }
        std::vector<double>& b = net.biases[l];
        if (grads.biases[l].size() != b.size() || vel.biases[l].size() != b.size()) {
            throw DimensionError("bias gradient size mismatch at layer " + std::to_string(l));
        }
        for (std::size_t r = 0; r < b.size(); ++r) {
            const double v = hp.momentum * vel.biases[l][r] + grads.biases[l][r];
            vel.biases[l][r] = v;
            b[r] -= lr * v;
        }
    }
    for (std::size_t s = 0; s < net.skips.size(); ++s) {
        Matrix& w = net.skips[s].weight;
        check_same_shape(grads.skip_weights[s], w, "skip gradient " + std::to_string(s));
        check_same_shape(vel.skip_weights[s], w, "skip velocity " + std::to_string(s));
        const Mask& m = net.skips[s].mask;
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t c = 0; c < w.cols; ++c) {
                if (!m(r, c)) continue;
                const double v = hp.momentum * vel.skip_weights[s](r, c) +
                                 grads.skip_weights[s](r, c) + hp.weight_decay * w(r, c);
                vel.skip_weights[s](r, c) = v;
                w(r, c) -= lr * v;
            }
        }
    }
}

History train(Network& net, const Dataset& data, const HyperParams& hp, std::uint64_t seed) {
    hp.validate();
    const std::size_t n = data.train_x.rows;
    if (n == 0) throw ConfigError("training split is empty");
    if (data.train_x.cols != net.layer_dims.front()) {
        throw DimensionError("dataset features " + std::to_string(data.train_x.cols) +
                             " vs network inputs " + std::to_string(net.layer_dims.front()));
    }
    if (data.classes > net.layer_dims.back()) {
        throw DimensionError("dataset has " + std::to_string(data.classes) +
                             " classes but the network emits " +
                             std::to_string(net.layer_dims.back()) + " logits");
    }

    Velocity vel = zero_gradients_like(net);
    History hist;
    hist.records.reserve(hp.epochs);
    Rng root(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> x(data.train_x.cols);

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        const double lr = lr_at(epoch, hp);
        Rng erng = root.substream(epoch);
        erng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += hp.batch_size) {
            const std::size_t bn = std::min(hp.batch_size, n - start);
            Gradients batch = zero_gradients_like(net);
            for (std::size_t i = 0; i < bn; ++i) {
                const std::size_t row = order[start + i];
                for (std::size_t j = 0; j < x.size(); ++j) x[j] = data.train_x(row, j);
                const std::size_t label = data.train_y[row];
                const Activations acts = forward(net, x);
                const std::vector<double>& logits = acts.a.back();
                loss_sum += softmax_xent(logits, label).first;
                if (argmax_lowest(logits) == label) ++correct;
                batch.add_scaled(backward(net, acts, label), 1.0);
            }
            batch.scale(1.0 / static_cast<double>(bn));
            sgd_step(net, batch, vel, lr, hp);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = lr;
        rec.train_loss = loss_sum / static_cast<double>(n);
        rec.train_acc = static_cast<double>(correct) / static_cast<double>(n);
        rec.test_acc = evaluate(net, data.test_x, data.test_y);
        hist.records.push_back(rec);
    }
    return hist;
}

double evaluate(const Network& net, const Matrix& x, const std::vector<std::size_t>& y) {
    if (x.rows != y.size()) {
        throw DimensionError("evaluate: " + std::to_string(x.rows) + " rows vs " +
                             std::to_string(y.size()) + " labels");
    }
    if (x.rows == 0) return 0.0;
    std::vector<double> sample(x.cols);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) sample[j] = x(i, j);
        const Activations acts = forward(net, sample);
        if (argmax_lowest(acts.a.back()) == y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(x.rows);
}

void write_history_csv(const History& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write history file: " + path);
    out << "epoch,lr,train_loss,train_acc,test_acc\n";
    char buf[160];
    for (const EpochRecord& r : history.records) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.6f\n", r.epoch, r.lr, r.train_loss,
                      r.train_acc, r.test_acc);
        out << buf;
    }
    if (!out) throw ConfigError("failed while writing history file: " + path);
}

}  // namespace n2n
