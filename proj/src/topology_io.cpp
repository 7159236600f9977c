// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include "plkey/topology_io.hpp"

#include <fstream>
#include <sstream>

#include "json_fwd.hpp"

namespace plkey {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Range range_from_json(const json& j, const char* key, Range fallback)
{
    if (!j.contains(key))
        return fallback;
    const auto& r = j.at(key);
    if (!r.is_array() || r.size() != 2)
        throw InvalidArgument(std::string("expected [lo, hi] for '") + key + "'");
    return {r[0].get<double>(), r[1].get<double>()};
}

} // namespace

ordered_json to_json(const TopologyParams& p)
{
    ordered_json j;
    j["n_outlets"] = p.n_outlets;
    j["depth"] = p.depth;
    j["length_m"] = {p.length_m.lo, p.length_m.hi};
    j["z0_ohm"] = {p.z0_ohm.lo, p.z0_ohm.hi};
    j["a0"] = {p.a0.lo, p.a0.hi};
    j["a1"] = {p.a1.lo, p.a1.hi};
    j["velocity"] = p.velocity;
    j["load_family"] = to_string(p.load_family);
    return j;
}

TopologyParams topology_params_from_json(const json& j, TopologyParams p)
{
    p.n_outlets = j.value("n_outlets", p.n_outlets);
    p.depth = j.value("depth", p.depth);
    p.length_m = range_from_json(j, "length_m", p.length_m);
    p.z0_ohm = range_from_json(j, "z0_ohm", p.z0_ohm);
    p.a0 = range_from_json(j, "a0", p.a0);
    p.a1 = range_from_json(j, "a1", p.a1);
    p.velocity = j.value("velocity", p.velocity);
    if (j.contains("load_family"))
        p.load_family = load_family_from_string(j.at("load_family").get<std::string>());
    p.validate();
    return p;
}

std::string topology_to_json(const Topology& top)
{
    ordered_json doc;
    doc["format"] = "plkey-topology";
    doc["version"] = 1;
    doc["seed"] = top.seed;
    if (top.params)
        doc["params"] = to_json(*top.params);

    ordered_json nodes = ordered_json::array();
    for (NodeId i = 0; i < top.nodes().size(); ++i) {
        const auto& n = top.node(i);
        ordered_json jn;
        jn["id"] = i;
        jn["kind"] = n.outlet ? "outlet" : "junction";
        if (n.outlet) {
            jn["load"] = {{"kind", to_string(n.load.kind)},
                          {"r_ohm", n.load.r_ohm},
                          {"l_henry", n.load.l_henry},
                          {"c_farad", n.load.c_farad}};
        }
        nodes.push_back(std::move(jn));
    }
    doc["nodes"] = std::move(nodes);

    ordered_json edges = ordered_json::array();
    for (const auto& e : top.edges()) {
        edges.push_back({{"a", e.a},
                         {"b", e.b},
                         {"length_m", e.line.length_m},
                         {"z0_ohm", e.line.z0_ohm},
                         {"a0", e.line.a0},
                         {"a1", e.line.a1},
                         {"velocity", e.line.velocity}});
    }
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
}

Topology topology_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("topology file: ") + e.what());
    }
    if (doc.value("format", std::string()) != "plkey-topology")
        throw InvalidArgument("topology file: missing format tag");

    try {
        Topology top;
        top.seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("params"))
            top.params = topology_params_from_json(doc.at("params"));
        const auto& nodes = doc.at("nodes");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& jn = nodes[i];
            if (jn.at("id").get<std::size_t>() != i)
                throw InvalidArgument("topology file: node ids must be 0..n-1 in order");
            const auto kind = jn.at("kind").get<std::string>();
            if (kind == "junction") {
                top.add_junction();
            } else if (kind == "outlet") {
                const auto& jl = jn.at("load");
                Load load;
                load.kind = load_kind_from_string(jl.at("kind").get<std::string>());
                load.r_ohm = jl.value("r_ohm", 0.0);
                load.l_henry = jl.value("l_henry", 0.0);
                load.c_farad = jl.value("c_farad", 0.0);
                top.add_outlet(load);
            } else {
                throw InvalidArgument("topology file: unknown node kind '" + kind + "'");
            }
        }
        for (const auto& je : doc.at("edges")) {
            LineSegment s;
            s.length_m = je.at("length_m").get<double>();
            s.z0_ohm = je.at("z0_ohm").get<double>();
            s.a0 = je.at("a0").get<double>();
            s.a1 = je.at("a1").get<double>();
            s.velocity = je.at("velocity").get<double>();
            top.connect(je.at("a").get<NodeId>(), je.at("b").get<NodeId>(), s);
        }
        top.validate();
        return top;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("topology file: ") + e.what());
    }
}

void save_topology(const Topology& top, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    out << topology_to_json(top);
}

Topology load_topology(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return topology_from_json(ss.str());
}

} // namespace plkey
