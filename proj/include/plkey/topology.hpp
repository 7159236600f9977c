// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------
//
// Random in-home power-line trees and their reduction to the two-port seen
// between any pair of outlets.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plkey/two_port.hpp"

namespace plkey {

using NodeId = std::size_t;
using EdgeId = std::size_t;

/// Closed interval used for uniform parameter draws.
struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool valid() const { return lo <= hi; }
    friend bool operator==(const Range&, const Range&) = default;
};

/// Cable segment with gamma(f) = a0 + a1 sqrt(f) + j 2 pi f / velocity.
struct LineSegment {
    double length_m = 10.0;
    double z0_ohm = 80.0;
    double a0 = 0.0;          // Np/m
    double a1 = 2e-6;         // Np/(m sqrt(Hz))
    double velocity = 1.8e8;  // m/s

    Spectrum gamma(const FrequencyGrid& grid) const;
    AbcdChannel abcd(const FrequencyGrid& grid) const;

    friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

enum class LoadKind { open, resistive, series_rlc, parallel_rlc };

/// Appliance model at an outlet.
struct Load {
    LoadKind kind = LoadKind::open;
    double r_ohm = 0.0;
    double l_henry = 0.0;
    double c_farad = 0.0;

    static Load open() { return {}; }
    static Load resistive(double r) { return {LoadKind::resistive, r, 0.0, 0.0}; }
    static Load series_rlc(double r, double l, double c) { return {LoadKind::series_rlc, r, l, c}; }
    static Load parallel_rlc(double r, double l, double c) { return {LoadKind::parallel_rlc, r, l, c}; }

    /// Admittance over the grid; an open load is exactly zero.
    Spectrum admittance(const FrequencyGrid& grid) const;

    friend bool operator==(const Load&, const Load&) = default;
};

enum class LoadFamily { open, resistive, rlc, mixed };

struct TopologyParams {
    std::size_t n_outlets = 5;
    std::size_t depth = 2;
    Range length_m{5.0, 30.0};
    Range z0_ohm{50.0, 120.0};
    Range a0{0.0, 1e-3};
    Range a1{1e-6, 3e-6};
    double velocity = 1.8e8;
    LoadFamily load_family = LoadFamily::mixed;

    void validate() const;
    friend bool operator==(const TopologyParams&, const TopologyParams&) = default;
};

struct PortPair {
    NodeId port1 = 0;
    NodeId port2 = 0;
};

/// Tree of junctions and outlets connected by line segments.
class Topology {
public:
    struct Node {
        bool outlet = false;
        Load load;                  // meaningful for outlets only
        std::vector<EdgeId> edges;
    };
    struct Edge {
        NodeId a = 0;
        NodeId b = 0;
        LineSegment line;
    };

    Topology() = default;

    NodeId add_junction();
    NodeId add_outlet(Load load);
    EdgeId connect(NodeId a, NodeId b, LineSegment line);

    /// Throws unless the graph is a connected tree with >= 3 outlets, all at leaves.
    void validate() const;

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    const Edge& edge(EdgeId id) const { return edges_.at(id); }
    std::vector<NodeId> outlets() const;
    NodeId other_end(EdgeId e, NodeId from) const;

    /// Unique path from `from` to `to` as a sequence of edges.
    std::vector<EdgeId> path(NodeId from, NodeId to) const;

    std::uint64_t seed = 0;
    std::optional<TopologyParams> params;

    friend bool operator==(const Topology& x, const Topology& y);

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
};

/// Deterministic random tree for (seed, params).
Topology synthesize(std::uint64_t seed, const TopologyParams& params);

/// Admittance looking into `node` through every incident edge except those excluded.
Spectrum subtree_yin(const Topology& top, const FrequencyGrid& grid, NodeId node,
                     const std::vector<EdgeId>& excluded);

/// Input impedance of the subtree hanging off `node`, excluding `excluded_edge`.
Spectrum subtree_zin(const Topology& top, const FrequencyGrid& grid, NodeId node, EdgeId excluded_edge);

/// ABCD of the two-port between two outlets; off-path subtrees become shunts.
AbcdChannel extract_two_port(const Topology& top, const FrequencyGrid& grid, PortPair pair);

std::string to_string(LoadKind kind);
LoadKind load_kind_from_string(const std::string& s);
std::string to_string(LoadFamily family);
LoadFamily load_family_from_string(const std::string& s);

} // namespace plkey
