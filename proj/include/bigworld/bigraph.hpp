#ifndef BIGWORLD_BIGRAPH_HPP
#define BIGWORLD_BIGRAPH_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bigworld/sparse.hpp"

namespace bigworld {

using NodeId = std::uint32_t;
using PortIndex = std::uint32_t;
using LinkId = std::uint32_t;

/// Node type. Equality is the full (name, arity, parameter) triple, so a
/// parameterized control like ID("Cambridge") is distinct from ID("Essex").
struct Control {
    std::string name;
    std::uint32_t arity = 0;
    std::optional<std::string> param;

    auto operator<=>(const Control&) const = default;
};

/// Parent of a node or site in the place forest: either a region or a node.
struct Parent {
    enum class Kind { Region, Node };
    Kind kind = Kind::Region;
    std::uint32_t index = 0;

    static Parent region(std::uint32_t r) { return {Kind::Region, r}; }
    static Parent node(NodeId n) { return {Kind::Node, n}; }

    bool is_region() const { return kind == Kind::Region; }
    bool is_node() const { return kind == Kind::Node; }

    auto operator<=>(const Parent&) const = default;
};

/// A point of the link graph: port `index` of node `node`.
struct Port {
    NodeId node = 0;
    PortIndex index = 0;

    auto operator<=>(const Port&) const = default;
};

/// One hyperedge. Open links carry an outer name; closed links do not and
/// must keep at least one port. Open links may be idle (no ports yet).
struct Link {
    std::optional<std::string> outer;
    std::set<Port> ports;

    bool closed() const { return !outer.has_value(); }

    auto operator<=>(const Link&) const = default;
};

/// Containment forest: regions are roots, sites are holes for composition.
struct PlaceGraph {
    std::size_t regions = 0;
    std::size_t sites = 0;
    std::size_t nodes = 0;
    SparseBoolMatrix rn;  // regions x nodes
    SparseBoolMatrix rs;  // regions x sites
    SparseBoolMatrix nn;  // nodes x nodes
    SparseBoolMatrix ns;  // nodes x sites
};

/// A bigraph: place graph + link graph over one node set, with a control
/// table indexed by node id. Values are immutable once built; all operations
/// return new bigraphs.
class Bigraph {
public:
    Bigraph() : Bigraph(0, 0) {}
    Bigraph(std::size_t regions, std::size_t sites);

    std::size_t regions() const { return place_.regions; }
    std::size_t sites() const { return place_.sites; }
    std::size_t node_count() const { return place_.nodes; }
    const PlaceGraph& place() const { return place_; }
    const std::vector<Link>& links() const { return links_; }
    const Control& control(NodeId n) const;
    const std::vector<Control>& controls() const { return controls_; }

    Parent parent_of_node(NodeId n) const;
    Parent parent_of_site(std::uint32_t s) const;
    std::vector<NodeId> child_nodes(const Parent& p) const;
    std::vector<std::uint32_t> child_sites(const Parent& p) const;

    /// Link carrying the given port; error if the port is unwired.
    LinkId link_of_port(NodeId n, PortIndex p) const;
    std::optional<LinkId> find_outer(const std::string& name) const;
    std::set<std::string> outer_names() const;

    // Assembly surface, used by the operations, the world builder and the
    // JSON loader. attach_* must be called exactly once per node/site/port.
    NodeId add_node(Control control);
    void attach_node(NodeId n, const Parent& p);
    void attach_site(std::uint32_t s, const Parent& p);
    LinkId add_link(std::optional<std::string> outer);
    void attach_port(LinkId l, NodeId n, PortIndex p);
    void close_link(LinkId l);
    void drop_empty_links();

    /// Checks every structural invariant: one parent per node/site, acyclic
    /// nn, ports covering each node's arity exactly once, distinct outer
    /// names, no empty closed link. Throws ValidationError.
    void validate() const;

private:
    friend class CanonicalEncoder;

    PlaceGraph place_;
    std::vector<Link> links_;
    std::vector<Control> controls_;
};

// Elementary bigraphs.
Bigraph ion(const Control& control, const std::vector<std::string>& outer_names);
Bigraph elementary_id();
Bigraph one();
Bigraph join();
Bigraph symmetry();

/// n regions over n sites; region i contains site perm[i].
Bigraph placing(const std::vector<std::uint32_t>& perm);

/// Generalized placing: region i contains the sites listed in groups[i].
/// The groups must partition 0..S-1.
Bigraph grouping(const std::vector<std::vector<std::uint32_t>>& groups);

// Composition algebra.
Bigraph nest(const Bigraph& g, const Bigraph& f);        // G.F
Bigraph ppar(const Bigraph& g, const Bigraph& f);        // G || F
Bigraph merge_prod(const Bigraph& g, const Bigraph& f);  // G | F = join.(G||F)
Bigraph close(const std::string& name, const Bigraph& b);

/// Isomorphism check: bijection on nodes preserving controls (including
/// parameters), place structure and link structure, with regions and sites
/// matched by index and outer names matched literally. Decided by canonical
/// form with bounded backtracking over symmetric ties; throws Error when a
/// bigraph is too symmetric to canonicalize within the bound.
bool iso_equal(const Bigraph& a, const Bigraph& b);

}  // namespace bigworld

#endif  // BIGWORLD_BIGRAPH_HPP
