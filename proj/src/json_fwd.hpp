// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------
//
// JSON mappings shared by the topology and experiment readers/writers.

#pragma once

#include <json.hpp>

#include "plkey/topology.hpp"

namespace plkey {

nlohmann::ordered_json to_json(const TopologyParams& p);
TopologyParams topology_params_from_json(const nlohmann::json& j, TopologyParams defaults = {});

} // namespace plkey
