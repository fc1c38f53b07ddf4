#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "n2n/dataset.hpp"
#include "n2n/network.hpp"

namespace n2n {

struct HyperParams {
    double lr0 = 0.05;
    double momentum = 0.9;
    double decay_factor = 0.5;
    std::size_t decay_every = 30;
    double weight_decay = 0.0005;
    std::size_t batch_size = 128;
    std::size_t epochs = 100;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

struct History {
    std::vector<EpochRecord> records;
};

// Momentum buffers share the Gradients layout (one slot per parameter).
using Velocity = Gradients;

// lr0 * decay_factor^floor(epoch / decay_every)
double lr_at(std::size_t epoch, const HyperParams& hp);

// Classic coupled SGD with momentum: v <- mu*v + g + wd*w; w <- w - lr*v.
// Applied only at unmasked positions; masked weights and velocities stay 0.
// Biases take no weight decay.
void sgd_step(Network& net, const Gradients& grads, Velocity& vel, double lr,
              const HyperParams& hp);

// Mini-batch SGD over shuffled epochs (seeded, deterministic). Train loss and
// accuracy are running statistics over the epoch's forward passes; test
// accuracy is evaluated after each epoch.
History train(Network& net, const Dataset& data, const HyperParams& hp, std::uint64_t seed);

// argmax(logits) == label rate; argmax ties break toward the lowest class.
double evaluate(const Network& net, const Matrix& x, const std::vector<std::size_t>& y);

// epoch,lr,train_loss,train_acc,test_acc at 6-decimal fixed point.
void write_history_csv(const History& history, const std::string& path);

}  // namespace n2n
