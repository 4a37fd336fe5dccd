#pragma once

// Internal JSON (de)serialization for nn types, shared by nn.cpp and
// agents.cpp. Not installed; the public surface works with strings/paths.

#include <json.hpp>

#include "mecsim/nn.hpp"

namespace mecsim::detail {

using ordered_json = nlohmann::ordered_json;

ordered_json layer_values_to_json(const Layer& layer);
Layer layer_values_from_json(const ordered_json& j, int in, int out, const char* what);

ordered_json net_checkpoint_to_json(const NetCheckpoint& ckpt);
NetCheckpoint net_checkpoint_from_json(const ordered_json& j);

}  // namespace mecsim::detail
