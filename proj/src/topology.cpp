// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include "plkey/topology.hpp"

#include <algorithm>
#include <numbers>

#include "plkey/rng.hpp"

namespace plkey {

Spectrum LineSegment::gamma(const FrequencyGrid& grid) const
{
    const Eigen::VectorXd f = grid.frequencies();
    Spectrum::Vector g(f.size());
    for (Eigen::Index k = 0; k < f.size(); ++k)
        g[k] = {a0 + a1 * std::sqrt(f[k]), 2.0 * std::numbers::pi * f[k] / velocity};
    return {grid, std::move(g)};
}

AbcdChannel LineSegment::abcd(const FrequencyGrid& grid) const
{
    return abcd_line(gamma(grid), std::complex<double>(z0_ohm), length_m);
}

Spectrum Load::admittance(const FrequencyGrid& grid) const
{
    const Eigen::VectorXd f = grid.frequencies();
    Spectrum::Vector y(f.size());
    for (Eigen::Index k = 0; k < f.size(); ++k) {
        const std::complex<double> jw(0.0, 2.0 * std::numbers::pi * f[k]);
        switch (kind) {
        case LoadKind::open:
            y[k] = 0.0;
            break;
        case LoadKind::resistive:
            y[k] = 1.0 / r_ohm;
            break;
        case LoadKind::series_rlc:
            y[k] = 1.0 / (r_ohm + jw * l_henry + 1.0 / (jw * c_farad));
            break;
        case LoadKind::parallel_rlc:
            y[k] = 1.0 / r_ohm + 1.0 / (jw * l_henry) + jw * c_farad;
            break;
        }
    }
    return {grid, std::move(y)};
}

void TopologyParams::validate() const
{
    if (n_outlets < 3)
        throw InvalidArgument("TopologyParams: need at least 3 outlets");
    if (depth < 1)
        throw InvalidArgument("TopologyParams: depth must be at least 1");
    if (!length_m.valid() || !(length_m.lo > 0.0))
        throw InvalidArgument("TopologyParams: invalid length range");
    if (!z0_ohm.valid() || !(z0_ohm.lo > 0.0))
        throw InvalidArgument("TopologyParams: invalid z0 range");
    if (!a0.valid() || a0.lo < 0.0 || !a1.valid() || a1.lo < 0.0)
        throw InvalidArgument("TopologyParams: invalid attenuation range");
    if (!(velocity > 0.0))
        throw InvalidArgument("TopologyParams: velocity must be positive");
}

// ---------------------------------------------------------------------------

NodeId Topology::add_junction()
{
    nodes_.push_back({});
    return nodes_.size() - 1;
}

NodeId Topology::add_outlet(Load load)
{
    if (load.kind != LoadKind::open && !(load.r_ohm > 0.0))
        throw InvalidArgument("Topology: load resistance must be positive");
    if ((load.kind == LoadKind::series_rlc || load.kind == LoadKind::parallel_rlc) &&
        !(load.l_henry > 0.0 && load.c_farad > 0.0))
        throw InvalidArgument("Topology: RLC load needs positive L and C");
    nodes_.push_back({true, load, {}});
    return nodes_.size() - 1;
}

EdgeId Topology::connect(NodeId a, NodeId b, LineSegment line)
{
    if (a >= nodes_.size() || b >= nodes_.size() || a == b)
        throw InvalidArgument("Topology::connect: bad node ids");
    if (!(line.length_m > 0.0) || !(line.z0_ohm > 0.0) || !(line.velocity > 0.0))
        throw InvalidArgument("Topology::connect: bad line parameters");
    edges_.push_back({a, b, line});
    const EdgeId e = edges_.size() - 1;
    nodes_[a].edges.push_back(e);
    nodes_[b].edges.push_back(e);
    return e;
}

std::vector<NodeId> Topology::outlets() const
{
    std::vector<NodeId> out;
    for (NodeId i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].outlet)
            out.push_back(i);
    return out;
}

NodeId Topology::other_end(EdgeId e, NodeId from) const
{
    const Edge& ed = edges_.at(e);
    if (ed.a == from)
        return ed.b;
    if (ed.b == from)
        return ed.a;
    throw InvalidArgument("Topology::other_end: edge not incident to node");
}

void Topology::validate() const
{
    if (nodes_.empty() || edges_.size() + 1 != nodes_.size())
        throw InvalidArgument("Topology: not a tree (edge count)");
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t visited = 0;
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        ++visited;
        for (EdgeId e : nodes_[n].edges) {
            const NodeId m = other_end(e, n);
            if (!seen[m]) {
                seen[m] = true;
                stack.push_back(m);
            }
        }
    }
    if (visited != nodes_.size())
        throw InvalidArgument("Topology: not connected");
    std::size_t n_out = 0;
    for (const auto& node : nodes_) {
        if (node.outlet) {
            ++n_out;
            if (node.edges.size() != 1)
                throw InvalidArgument("Topology: outlets must be leaves");
        }
    }
    if (n_out < 3)
        throw InvalidArgument("Topology: need at least 3 outlets");
}

std::vector<EdgeId> Topology::path(NodeId from, NodeId to) const
{
    if (from >= nodes_.size() || to >= nodes_.size())
        throw InvalidArgument("Topology::path: bad node id");
    constexpr EdgeId none = static_cast<EdgeId>(-1);
    std::vector<EdgeId> via(nodes_.size(), none);
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        if (n == to)
            break;
        for (EdgeId e : nodes_[n].edges) {
            const NodeId m = other_end(e, n);
            if (!seen[m]) {
                seen[m] = true;
                via[m] = e;
                stack.push_back(m);
            }
        }
    }
    if (!seen[to])
        throw InvalidArgument("Topology::path: nodes not connected");
    std::vector<EdgeId> edges;
    for (NodeId n = to; n != from; n = other_end(via[n], n))
        edges.push_back(via[n]);
    std::reverse(edges.begin(), edges.end());
    return edges;
}

bool operator==(const Topology& x, const Topology& y)
{
    if (x.seed != y.seed || x.params != y.params || x.nodes_.size() != y.nodes_.size() ||
        x.edges_.size() != y.edges_.size())
        return false;
    for (std::size_t i = 0; i < x.nodes_.size(); ++i) {
        const auto& a = x.nodes_[i];
        const auto& b = y.nodes_[i];
        if (a.outlet != b.outlet || a.edges != b.edges || (a.outlet && !(a.load == b.load)))
            return false;
    }
    for (std::size_t i = 0; i < x.edges_.size(); ++i) {
        const auto& a = x.edges_[i];
        const auto& b = y.edges_[i];
        if (a.a != b.a || a.b != b.b || !(a.line == b.line))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

namespace {

Load draw_load(Rng& rng, LoadFamily family)
{
    auto rlc = [&](bool series) {
        const double r = rng.uniform(5.0, 1000.0);
        const double l = rng.log_uniform(0.1e-6, 10e-6);
        const double c = rng.log_uniform(0.1e-9, 10e-9);
        return series ? Load::series_rlc(r, l, c) : Load::parallel_rlc(r, l, c);
    };
    switch (family) {
    case LoadFamily::open:
        return Load::open();
    case LoadFamily::resistive:
        return Load::resistive(rng.uniform(5.0, 1000.0));
    case LoadFamily::rlc:
        return rlc(rng.index(2) == 0);
    case LoadFamily::mixed:
        switch (rng.index(4)) {
        case 0:
            return Load::open();
        case 1:
            return Load::resistive(rng.uniform(5.0, 1000.0));
        case 2:
            return rlc(true);
        default:
            return rlc(false);
        }
    }
    return Load::open();
}

LineSegment draw_line(Rng& rng, const TopologyParams& p)
{
    LineSegment s;
    s.length_m = rng.uniform(p.length_m.lo, p.length_m.hi);
    s.z0_ohm = rng.uniform(p.z0_ohm.lo, p.z0_ohm.hi);
    s.a0 = rng.uniform(p.a0.lo, p.a0.hi);
    s.a1 = rng.uniform(p.a1.lo, p.a1.hi);
    s.velocity = p.velocity;
    return s;
}

} // namespace

Topology synthesize(std::uint64_t seed, const TopologyParams& params)
{
    params.validate();
    Rng rng(seed);
    Topology top;
    top.seed = seed;
    top.params = params;

    // Junction backbone: a chain reaching the requested depth, then random
    // attachments to junctions that are not yet at the deepest level.
    const std::size_t max_junctions = std::max<std::size_t>(params.depth, params.n_outlets / 2);
    const std::size_t n_junctions =
        params.depth == 1 ? 1 : params.depth + rng.index(max_junctions - params.depth + 1);
    std::vector<std::size_t> level;
    std::vector<NodeId> junctions;
    std::vector<std::size_t> child_count;
    for (std::size_t k = 0; k < n_junctions; ++k) {
        const NodeId j = top.add_junction();
        if (k == 0) {
            level.push_back(0);
        } else {
            std::size_t parent;
            if (k < params.depth) {
                parent = k - 1;
            } else {
                std::vector<std::size_t> open;
                for (std::size_t i = 0; i < junctions.size(); ++i)
                    if (level[i] + 1 < params.depth)
                        open.push_back(i);
                parent = open[rng.index(open.size())];
            }
            top.connect(junctions[parent], j, draw_line(rng, params));
            level.push_back(level[parent] + 1);
            ++child_count[parent];
        }
        junctions.push_back(j);
        child_count.push_back(0);
    }

    // Every junction-tree leaf gets an outlet so no junction dangles; the
    // remaining outlets attach anywhere.
    std::vector<std::size_t> host;
    for (std::size_t i = 0; i < junctions.size(); ++i)
        if (child_count[i] == 0)
            host.push_back(i);
    while (host.size() < params.n_outlets)
        host.push_back(rng.index(junctions.size()));
    for (std::size_t i : host) {
        const NodeId o = top.add_outlet(draw_load(rng, params.load_family));
        top.connect(junctions[i], o, draw_line(rng, params));
    }
    top.validate();
    return top;
}

// ---------------------------------------------------------------------------

namespace {

/// Admittance looking from `from` into edge `e` towards the far side.
Spectrum::Vector branch_yin(const Topology& top, const FrequencyGrid& grid, EdgeId e, NodeId from);

Spectrum::Vector node_yin(const Topology& top, const FrequencyGrid& grid, NodeId node,
                          const std::vector<EdgeId>& excluded)
{
    const auto& n = top.node(node);
    Spectrum::Vector y = Spectrum::Vector::Zero(static_cast<Eigen::Index>(grid.n_bins));
    if (n.outlet)
        y += n.load.admittance(grid).values();
    for (EdgeId e : n.edges)
        if (std::find(excluded.begin(), excluded.end(), e) == excluded.end())
            y += branch_yin(top, grid, e, node);
    return y;
}

Spectrum::Vector branch_yin(const Topology& top, const FrequencyGrid& grid, EdgeId e, NodeId from)
{
    const NodeId far = top.other_end(e, from);
    const Spectrum::Vector y_far = node_yin(top, grid, far, {e});
    const AbcdChannel line = top.edge(e).line.abcd(grid);
    // Yin = (C + D Y) / (A + B Y)
    const Spectrum::Vector num = line.c() + line.d().cwiseProduct(y_far);
    const Spectrum::Vector den = line.a() + line.b().cwiseProduct(y_far);
    return detail::checked_quotient(num, den, "branch admittance");
}

} // namespace

Spectrum subtree_yin(const Topology& top, const FrequencyGrid& grid, NodeId node,
                     const std::vector<EdgeId>& excluded)
{
    if (node >= top.nodes().size())
        throw InvalidArgument("subtree_yin: bad node id");
    return {grid, node_yin(top, grid, node, excluded)};
}

Spectrum subtree_zin(const Topology& top, const FrequencyGrid& grid, NodeId node, EdgeId excluded_edge)
{
    const Spectrum y = subtree_yin(top, grid, node, {excluded_edge});
    const auto ones = Spectrum::Vector::Ones(y.values().size());
    return {grid, detail::checked_quotient(ones, y.values(), "subtree_zin")};
}

AbcdChannel extract_two_port(const Topology& top, const FrequencyGrid& grid, PortPair pair)
{
    const auto& nodes = top.nodes();
    if (pair.port1 == pair.port2 || pair.port1 >= nodes.size() || pair.port2 >= nodes.size() ||
        !nodes[pair.port1].outlet || !nodes[pair.port2].outlet)
        throw InvalidArgument("extract_two_port: ports must be two distinct outlets");

    const std::vector<EdgeId> route = top.path(pair.port1, pair.port2);
    AbcdChannel ch = top.edge(route.front()).line.abcd(grid);
    NodeId at = top.other_end(route.front(), pair.port1);
    for (std::size_t i = 1; i < route.size(); ++i) {
        const Spectrum y = subtree_yin(top, grid, at, {route[i - 1], route[i]});
        ch = cascade(ch, abcd_shunt(y));
        ch = cascade(ch, top.edge(route[i]).line.abcd(grid));
        at = top.other_end(route[i], at);
    }
    return ch;
}

// ---------------------------------------------------------------------------

std::string to_string(LoadKind kind)
{
    switch (kind) {
    case LoadKind::open:
        return "open";
    case LoadKind::resistive:
        return "resistive";
    case LoadKind::series_rlc:
        return "series_rlc";
    case LoadKind::parallel_rlc:
        return "parallel_rlc";
    }
    return "open";
}

LoadKind load_kind_from_string(const std::string& s)
{
    if (s == "open")
        return LoadKind::open;
    if (s == "resistive")
        return LoadKind::resistive;
    if (s == "series_rlc")
        return LoadKind::series_rlc;
    if (s == "parallel_rlc")
        return LoadKind::parallel_rlc;
    throw InvalidArgument("unknown load kind '" + s + "'");
}

std::string to_string(LoadFamily family)
{
    switch (family) {
    case LoadFamily::open:
        return "open";
    case LoadFamily::resistive:
        return "resistive";
    case LoadFamily::rlc:
        return "rlc";
    case LoadFamily::mixed:
        return "mixed";
    }
    return "mixed";
}

LoadFamily load_family_from_string(const std::string& s)
{
    if (s == "open")
        return LoadFamily::open;
    if (s == "resistive")
        return LoadFamily::resistive;
    if (s == "rlc")
        return LoadFamily::rlc;
    if (s == "mixed")
        return LoadFamily::mixed;
    throw InvalidArgument("unknown load family '" + s + "'");
}

} // namespace plkey
