#pragma once

#include <string>

#include <json.hpp>

#include "n2n/network.hpp"

namespace n2n {

// Checkpoint document: layer_dims, k, per-layer {weights (flat row-major),
// bias, mask as [[r,c],...] coordinates}, and skip descriptors
// {from, to, weights, mask}. Masks round-trip value-exact; weights rely on
// nlohmann's shortest-round-trip float format (bit-exact in practice).
nlohmann::json checkpoint_to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc);

void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace n2n
