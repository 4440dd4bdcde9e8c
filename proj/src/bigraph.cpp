#include "bigworld/bigraph.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>

#include "bigworld/errors.hpp"

namespace bigworld {

Bigraph::Bigraph(std::size_t regions, std::size_t sites) {
    place_.regions = regions;
    place_.sites = sites;
    place_.nodes = 0;
    place_.rn = SparseBoolMatrix(regions, 0);
    place_.rs = SparseBoolMatrix(regions, sites);
    place_.nn = SparseBoolMatrix(0, 0);
    place_.ns = SparseBoolMatrix(0, sites);
}

const Control& Bigraph::control(NodeId n) const {
    if (n >= controls_.size()) {
        throw BoundsError("node " + std::to_string(n) + " out of range");
    }
    return controls_[n];
}

NodeId Bigraph::add_node(Control control) {
    NodeId id = static_cast<NodeId>(place_.nodes);
    controls_.push_back(std::move(control));
    place_.nodes += 1;
    place_.rn.set_shape(place_.regions, place_.nodes);
    place_.nn.set_shape(place_.nodes, place_.nodes);
    place_.ns.set_shape(place_.nodes, place_.sites);
    return id;
}

void Bigraph::attach_node(NodeId n, const Parent& p) {
    if (p.is_region()) {
        place_.rn.add(p.index, n);
    } else {
        place_.nn.add(p.index, n);
    }
}

void Bigraph::attach_site(std::uint32_t s, const Parent& p) {
    if (p.is_region()) {
        place_.rs.add(p.index, s);
    } else {
        place_.ns.add(p.index, s);
    }
}

LinkId Bigraph::add_link(std::optional<std::string> outer) {
    links_.push_back(Link{std::move(outer), {}});
    return static_cast<LinkId>(links_.size() - 1);
}

void Bigraph::attach_port(LinkId l, NodeId n, PortIndex p) {
    if (l >= links_.size()) {
        throw BoundsError("link " + std::to_string(l) + " out of range");
    }
    if (p >= control(n).arity) {
        throw ValidationError("port " + std::to_string(p) + " exceeds arity of control " +
                              control(n).name);
    }
    links_[l].ports.insert(Port{n, p});
}

void Bigraph::close_link(LinkId l) {
    if (l >= links_.size()) {
        throw BoundsError("link " + std::to_string(l) + " out of range");
    }
    links_[l].outer.reset();
}

void Bigraph::drop_empty_links() {
    links_.erase(std::remove_if(links_.begin(), links_.end(),
                                [](const Link& l) { return l.closed() && l.ports.empty(); }),
                 links_.end());
}

Parent Bigraph::parent_of_node(NodeId n) const {
    const auto& from_regions = place_.rn.prn(n);
    const auto& from_nodes = place_.nn.prn(n);
    if (from_regions.size() + from_nodes.size() != 1) {
        throw ValidationError("node " + std::to_string(n) + " has " +
                              std::to_string(from_regions.size() + from_nodes.size()) +
                              " parents");
    }
    return from_regions.empty() ? Parent::node(*from_nodes.begin())
                                : Parent::region(*from_regions.begin());
}

Parent Bigraph::parent_of_site(std::uint32_t s) const {
    const auto& from_regions = place_.rs.prn(s);
    const auto& from_nodes = place_.ns.prn(s);
    if (from_regions.size() + from_nodes.size() != 1) {
        throw ValidationError("site " + std::to_string(s) + " has " +
                              std::to_string(from_regions.size() + from_nodes.size()) +
                              " parents");
    }
    return from_regions.empty() ? Parent::node(*from_nodes.begin())
                                : Parent::region(*from_regions.begin());
}

std::vector<NodeId> Bigraph::child_nodes(const Parent& p) const {
    const auto& set = p.is_region() ? place_.rn.chl(p.index) : place_.nn.chl(p.index);
    return {set.begin(), set.end()};
}

std::vector<std::uint32_t> Bigraph::child_sites(const Parent& p) const {
    const auto& set = p.is_region() ? place_.rs.chl(p.index) : place_.ns.chl(p.index);
    return {set.begin(), set.end()};
}

LinkId Bigraph::link_of_port(NodeId n, PortIndex p) const {
    for (LinkId l = 0; l < links_.size(); ++l) {
        if (links_[l].ports.count(Port{n, p})) {
            return l;
        }
    }
    throw LookupError("port " + std::to_string(p) + " of node " + std::to_string(n) +
                      " is not on any link");
}

std::optional<LinkId> Bigraph::find_outer(const std::string& name) const {
    for (LinkId l = 0; l < links_.size(); ++l) {
        if (links_[l].outer == name) {
            return l;
        }
    }
    return std::nullopt;
}

std::set<std::string> Bigraph::outer_names() const {
    std::set<std::string> out;
    for (const auto& link : links_) {
        if (link.outer) {
            out.insert(*link.outer);
        }
    }
    return out;
}

void Bigraph::validate() const {
    for (NodeId n = 0; n < place_.nodes; ++n) {
        parent_of_node(n);  // throws unless exactly one parent
    }
    for (std::uint32_t s = 0; s < place_.sites; ++s) {
        parent_of_site(s);
    }
    if (place_.nodes > 0) {
        auto closure = trans(place_.nn);
        for (NodeId n = 0; n < place_.nodes; ++n) {
            if (closure.mem(n, n)) {
                throw ValidationError("place graph contains a cycle through node " +
                                      std::to_string(n));
            }
        }
    }
    std::vector<std::uint32_t> seen(place_.nodes, 0);
    std::set<std::string> names;
    for (const auto& link : links_) {
        if (link.closed() && link.ports.empty()) {
            throw ValidationError("closed link with no ports");
        }
        if (link.outer && !names.insert(*link.outer).second) {
            throw ValidationError("duplicate outer name " + *link.outer);
        }
        for (const auto& port : link.ports) {
            if (port.node >= place_.nodes || port.index >= controls_[port.node].arity) {
                throw ValidationError("link references invalid port");
            }
            seen[port.node] += 1;
        }
    }
    for (NodeId n = 0; n < place_.nodes; ++n) {
        if (seen[n] != controls_[n].arity) {
            throw ValidationError("node " + std::to_string(n) + " has " +
                                  std::to_string(seen[n]) + " linked ports, arity is " +
                                  std::to_string(controls_[n].arity));
        }
    }
    // each port on exactly one link: total ports == sum of arities and no
    // node exceeded its arity above, so coverage is exact.
}

Bigraph ion(const Control& control, const std::vector<std::string>& names) {
    if (names.size() != control.arity) {
        throw ValidationError("ion: control " + control.name + " has arity " +
                              std::to_string(control.arity) + ", got " +
                              std::to_string(names.size()) + " names");
    }
    std::set<std::string> distinct(names.begin(), names.end());
    if (distinct.size() != names.size()) {
        throw ValidationError("ion: outer names must be distinct");
    }
    Bigraph b(1, 1);
    NodeId n = b.add_node(control);
    b.attach_node(n, Parent::region(0));
    b.attach_site(0, Parent::node(n));
    for (PortIndex p = 0; p < control.arity; ++p) {
        LinkId l = b.add_link(names[p]);
        b.attach_port(l, n, p);
    }
    return b;
}

Bigraph elementary_id() {
    Bigraph b(1, 1);
    b.attach_site(0, Parent::region(0));
    return b;
}

Bigraph one() {
    return Bigraph(1, 0);
}

Bigraph join() {
    Bigraph b(1, 2);
    b.attach_site(0, Parent::region(0));
    b.attach_site(1, Parent::region(0));
    return b;
}

Bigraph symmetry() {
    return placing({1, 0});
}

Bigraph placing(const std::vector<std::uint32_t>& perm) {
    std::vector<std::vector<std::uint32_t>> groups;
    groups.reserve(perm.size());
    for (auto s : perm) {
        groups.push_back({s});
    }
    return grouping(groups);
}

Bigraph grouping(const std::vector<std::vector<std::uint32_t>>& groups) {
    std::size_t total = 0;
    for (const auto& g : groups) {
        total += g.size();
    }
    std::vector<bool> used(total, false);
    for (const auto& g : groups) {
        for (auto s : g) {
            if (s >= total || used[s]) {
                throw ValidationError("grouping: site lists must partition 0.." +
                                      std::to_string(total ? total - 1 : 0));
            }
            used[s] = true;
        }
    }
    Bigraph b(groups.size(), total);
    for (std::uint32_t r = 0; r < groups.size(); ++r) {
        for (auto s : groups[r]) {
            b.attach_site(s, Parent::region(r));
        }
    }
    return b;
}

namespace {

/// Appends f's links (ports shifted by node_offset) onto out, combining open
/// links that share an outer name.
void merge_links(std::vector<Link>& out, const std::vector<Link>& from, NodeId node_offset) {
    std::map<std::string, std::size_t> by_name;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].outer) {
            by_name[*out[i].outer] = i;
        }
    }
    for (const auto& link : from) {
        std::set<Port> shifted;
        for (const auto& port : link.ports) {
            shifted.insert(Port{port.node + node_offset, port.index});
        }
        if (link.outer) {
            auto it = by_name.find(*link.outer);
            if (it != by_name.end()) {
                out[it->second].ports.insert(shifted.begin(), shifted.end());
                continue;
            }
            by_name[*link.outer] = out.size();
        }
        out.push_back(Link{link.outer, std::move(shifted)});
    }
}

void copy_controls(Bigraph& out, const Bigraph& src) {
    for (NodeId n = 0; n < src.node_count(); ++n) {
        out.add_node(src.control(n));
    }
}

}  // namespace

Bigraph nest(const Bigraph& g, const Bigraph& f) {
    if (f.regions() != g.sites()) {
        throw CompositionError("nest: inner bigraph has " + std::to_string(f.regions()) +
                               " regions, outer expects " + std::to_string(g.sites()));
    }
    Bigraph out(g.regions(), f.sites());
    copy_controls(out, g);
    copy_controls(out, f);
    const NodeId shift = static_cast<NodeId>(g.node_count());

    for (NodeId n = 0; n < g.node_count(); ++n) {
        out.attach_node(n, g.parent_of_node(n));
    }
    // each site i of g is replaced by the content of region i of f
    for (std::uint32_t i = 0; i < g.sites(); ++i) {
        Parent host = g.parent_of_site(i);
        for (NodeId n : f.child_nodes(Parent::region(i))) {
            out.attach_node(n + shift, host);
        }
        for (std::uint32_t s : f.child_sites(Parent::region(i))) {
            out.attach_site(s, host);
        }
    }
    for (NodeId n = 0; n < f.node_count(); ++n) {
        Parent p = f.parent_of_node(n);
        if (p.is_node()) {
            out.attach_node(n + shift, Parent::node(p.index + shift));
        }
    }
    for (std::uint32_t s = 0; s < f.sites(); ++s) {
        Parent p = f.parent_of_site(s);
        if (p.is_node()) {
            out.attach_site(s, Parent::node(p.index + shift));
        }
    }

    std::vector<Link> links = g.links();
    merge_links(links, f.links(), shift);
    for (const auto& link : links) {
        LinkId l = out.add_link(link.outer);
        for (const auto& port : link.ports) {
            out.attach_port(l, port.node, port.index);
        }
    }
    return out;
}

Bigraph ppar(const Bigraph& g, const Bigraph& f) {
    Bigraph out(g.regions() + f.regions(), g.sites() + f.sites());
    copy_controls(out, g);
    copy_controls(out, f);
    const NodeId shift = static_cast<NodeId>(g.node_count());
    const std::uint32_t region_shift = static_cast<std::uint32_t>(g.regions());
    const std::uint32_t site_shift = static_cast<std::uint32_t>(g.sites());

    auto shifted = [&](const Parent& p) {
        return p.is_region() ? Parent::region(p.index + region_shift)
                             : Parent::node(p.index + shift);
    };
    for (NodeId n = 0; n < g.node_count(); ++n) {
        out.attach_node(n, g.parent_of_node(n));
    }
    for (std::uint32_t s = 0; s < g.sites(); ++s) {
        out.attach_site(s, g.parent_of_site(s));
    }
    for (NodeId n = 0; n < f.node_count(); ++n) {
        out.attach_node(n + shift, shifted(f.parent_of_node(n)));
    }
    for (std::uint32_t s = 0; s < f.sites(); ++s) {
        out.attach_site(s + site_shift, shifted(f.parent_of_site(s)));
    }

    std::vector<Link> links = g.links();
    merge_links(links, f.links(), shift);
    for (const auto& link : links) {
        LinkId l = out.add_link(link.outer);
        for (const auto& port : link.ports) {
            out.attach_port(l, port.node, port.index);
        }
    }
    return out;
}

Bigraph merge_prod(const Bigraph& g, const Bigraph& f) {
    Bigraph side = ppar(g, f);
    std::vector<std::uint32_t> all(side.regions());
    for (std::uint32_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    return nest(grouping({all}), side);
}

Bigraph close(const std::string& name, const Bigraph& b) {
    auto l = b.find_outer(name);
    if (!l) {
        return b;  // closing an absent name is a no-op
    }
    Bigraph out = b;
    out.close_link(*l);
    out.drop_empty_links();
    return out;
}

}  // namespace bigworld
