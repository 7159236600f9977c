// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <filesystem>
#include <string>

#include "plkey/topology.hpp"

namespace plkey {

/// Human-readable JSON document; doubles are written in shortest round-trip form.
std::string topology_to_json(const Topology& top);
Topology topology_from_json(const std::string& text);

void save_topology(const Topology& top, const std::filesystem::path& path);
Topology load_topology(const std::filesystem::path& path);

} // namespace plkey
