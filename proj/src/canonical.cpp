#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "bigworld/bigraph.hpp"
#include "bigworld/errors.hpp"

namespace bigworld {

namespace {

constexpr std::size_t kTieBound = 10000;

std::vector<Link> sorted_links(const Bigraph& b) {
    std::vector<Link> ls = b.links();
    std::sort(ls.begin(), ls.end());
    return ls;
}

bool exact_equal(const Bigraph& a, const Bigraph& b) {
    if (a.regions() != b.regions() || a.sites() != b.sites() ||
        a.node_count() != b.node_count()) {
        return false;
    }
    if (a.controls() != b.controls()) {
        return false;
    }
    const auto& pa = a.place();
    const auto& pb = b.place();
    return equal(pa.rn, pb.rn) && equal(pa.rs, pb.rs) && equal(pa.nn, pb.nn) &&
           equal(pa.ns, pb.ns) && sorted_links(a) == sorted_links(b);
}

}  // namespace

/// Produces a canonical encoding of a bigraph: node colors are refined with
/// place and link context until stable, then remaining symmetric siblings are
/// permuted (within a global bound) to minimize the link section.
class CanonicalEncoder {
public:
    explicit CanonicalEncoder(const Bigraph& b) : b_(b) {}

    std::string encode() {
        gather();
        refine();
        collect_groups();
        return assemble();
    }

private:
    using Sig = std::vector<std::uint64_t>;

    void gather() {
        const std::size_t n = b_.node_count();
        parent_.resize(n);
        kids_.resize(n);
        sites_.resize(n);
        port_link_.resize(n);
        for (NodeId v = 0; v < n; ++v) {
            parent_[v] = b_.parent_of_node(v);
            kids_[v] = b_.child_nodes(Parent::node(v));
            sites_[v] = b_.child_sites(Parent::node(v));
            port_link_[v].assign(b_.control(v).arity, 0);
        }
        for (LinkId l = 0; l < b_.links().size(); ++l) {
            for (const auto& port : b_.links()[l].ports) {
                port_link_[port.node][port.index] = l;
            }
        }
        for (const auto& name : b_.outer_names()) {
            name_rank_.emplace(name, name_rank_.size());
        }

        // initial colors: control identity only
        std::vector<std::pair<Control, NodeId>> order;
        for (NodeId v = 0; v < n; ++v) {
            order.emplace_back(b_.control(v), v);
        }
        std::sort(order.begin(), order.end());
        color_.assign(n, 0);
        std::uint64_t c = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i > 0 && order[i].first != order[i - 1].first) {
                ++c;
            }
            color_[order[i].second] = c;
        }
    }

    Sig signature(NodeId v) const {
        Sig s;
        s.push_back(color_[v]);
        if (parent_[v].is_region()) {
            s.push_back(0);
            s.push_back(parent_[v].index);
        } else {
            s.push_back(1);
            s.push_back(color_[parent_[v].index]);
        }
        Sig child_colors;
        for (NodeId k : kids_[v]) {
            child_colors.push_back(color_[k]);
        }
        std::sort(child_colors.begin(), child_colors.end());
        s.push_back(child_colors.size());
        s.insert(s.end(), child_colors.begin(), child_colors.end());
        s.push_back(sites_[v].size());
        for (auto site : sites_[v]) {
            s.push_back(site);
        }
        for (PortIndex p = 0; p < b_.control(v).arity; ++p) {
            const Link& link = b_.links()[port_link_[v][p]];
            if (link.outer) {
                s.push_back(1);
                s.push_back(name_rank_.at(*link.outer));
            } else {
                s.push_back(2);
                Sig peers;
                for (const auto& q : link.ports) {
                    peers.push_back((color_[q.node] << 32) | q.index);
                }
                std::sort(peers.begin(), peers.end());
                s.push_back(peers.size());
                s.insert(s.end(), peers.begin(), peers.end());
            }
        }
        return s;
    }

    void refine() {
        const std::size_t n = b_.node_count();
        std::size_t classes = 0;
        for (std::size_t round = 0; round < n + 2; ++round) {
            std::vector<std::pair<Sig, NodeId>> sigs;
            sigs.reserve(n);
            for (NodeId v = 0; v < n; ++v) {
                sigs.emplace_back(signature(v), v);
            }
            std::sort(sigs.begin(), sigs.end());
            std::uint64_t c = 0;
            for (std::size_t i = 0; i < sigs.size(); ++i) {
                if (i > 0 && sigs[i].first != sigs[i - 1].first) {
                    ++c;
                }
                color_[sigs[i].second] = c;
            }
            std::size_t now = n ? static_cast<std::size_t>(c) + 1 : 0;
            if (now == classes) {
                break;
            }
            classes = now;
        }
    }

    // Sibling sets left indistinguishable by refinement; their relative order
    // is the only remaining freedom.
    void collect_groups() {
        std::map<std::pair<Parent, std::uint64_t>, std::vector<NodeId>> buckets;
        for (NodeId v = 0; v < b_.node_count(); ++v) {
            buckets[{parent_[v], color_[v]}].push_back(v);
        }
        std::size_t combos = 1;
        for (auto& [key, members] : buckets) {
            if (members.size() < 2) {
                continue;
            }
            std::size_t fact = 1;
            for (std::size_t i = 2; i <= members.size(); ++i) {
                fact *= i;
            }
            if (combos > kTieBound / fact) {
                throw Error("iso_equal: bigraph too symmetric to canonicalize");
            }
            combos *= fact;
            groups_.push_back(members);
        }
    }

    /// Canonical node order for the current permutation of each tie group.
    std::vector<NodeId> make_order() const {
        std::map<NodeId, std::size_t> tie_rank;
        for (const auto& group : groups_) {
            for (std::size_t i = 0; i < group.size(); ++i) {
                tie_rank[group[i]] = i;
            }
        }
        auto sort_key = [&](NodeId v) {
            auto it = tie_rank.find(v);
            return std::pair<std::uint64_t, std::size_t>(color_[v],
                                                         it == tie_rank.end() ? 0 : it->second);
        };
        std::vector<NodeId> order;
        order.reserve(b_.node_count());
        auto emit = [&](auto&& self, NodeId v) -> void {
            order.push_back(v);
            auto ks = kids_[v];
            std::stable_sort(ks.begin(), ks.end(),
                             [&](NodeId x, NodeId y) { return sort_key(x) < sort_key(y); });
            for (NodeId k : ks) {
                self(self, k);
            }
        };
        for (std::uint32_t r = 0; r < b_.regions(); ++r) {
            auto roots = b_.child_nodes(Parent::region(r));
            std::stable_sort(roots.begin(), roots.end(),
                             [&](NodeId x, NodeId y) { return sort_key(x) < sort_key(y); });
            for (NodeId v : roots) {
                emit(emit, v);
            }
        }
        return order;
    }

    static void put(std::string& out, const std::string& token) {
        out += std::to_string(token.size());
        out += ':';
        out += token;
        out += ';';
    }

    static void put(std::string& out, std::uint64_t v) {
        out += std::to_string(v);
        out += ';';
    }

    std::string place_section(const std::vector<NodeId>& order) const {
        std::vector<std::size_t> pos(b_.node_count());
        for (std::size_t i = 0; i < order.size(); ++i) {
            pos[order[i]] = i;
        }
        std::string out;
        put(out, static_cast<std::uint64_t>(b_.regions()));
        put(out, static_cast<std::uint64_t>(b_.sites()));
        for (NodeId v : order) {
            const Control& c = b_.control(v);
            put(out, c.name);
            put(out, static_cast<std::uint64_t>(c.arity));
            put(out, c.param ? "1" + *c.param : std::string("0"));
            if (parent_[v].is_region()) {
                put(out, std::string("r") + std::to_string(parent_[v].index));
            } else {
                put(out, std::string("n") + std::to_string(pos[parent_[v].index]));
            }
            for (auto site : sites_[v]) {
                put(out, std::string("s") + std::to_string(site));
            }
        }
        for (std::uint32_t s = 0; s < b_.sites(); ++s) {
            Parent p = b_.parent_of_site(s);
            put(out, p.is_region() ? std::string("r") + std::to_string(p.index)
                                   : std::string("n") + std::to_string(pos[p.index]));
        }
        return out;
    }

    std::string link_section(const std::vector<NodeId>& order) const {
        std::vector<std::size_t> pos(b_.node_count());
        for (std::size_t i = 0; i < order.size(); ++i) {
            pos[order[i]] = i;
        }
        std::vector<std::string> entries;
        for (const auto& link : b_.links()) {
            std::vector<std::pair<std::size_t, PortIndex>> ports;
            for (const auto& port : link.ports) {
                ports.emplace_back(pos[port.node], port.index);
            }
            std::sort(ports.begin(), ports.end());
            std::string e;
            put(e, link.outer ? "1" + *link.outer : std::string("0"));
            for (const auto& [at, idx] : ports) {
                put(e, static_cast<std::uint64_t>(at));
                put(e, static_cast<std::uint64_t>(idx));
            }
            entries.push_back(std::move(e));
        }
        std::sort(entries.begin(), entries.end());
        std::string out;
        for (const auto& e : entries) {
            put(out, e);
        }
        return out;
    }

    std::string assemble() {
        for (auto& group : groups_) {
            std::sort(group.begin(), group.end());
        }
        std::string place = place_section(make_order());
        std::string best_links = link_section(make_order());
        // walk the cartesian product of tie-group permutations, keeping the
        // minimal link section; the place section does not depend on the
        // permutation because tied siblings have indistinguishable subtrees
        for (;;) {
            std::size_t i = 0;
            while (i < groups_.size() &&
                   !std::next_permutation(groups_[i].begin(), groups_[i].end())) {
                ++i;  // wrapped back to sorted order, carry on
            }
            if (i == groups_.size()) {
                break;
            }
            std::string candidate = link_section(make_order());
            if (candidate < best_links) {
                best_links = candidate;
            }
        }
        return place + "#" + best_links;
    }

    const Bigraph& b_;
    std::vector<Parent> parent_;
    std::vector<std::vector<NodeId>> kids_;
    std::vector<std::vector<std::uint32_t>> sites_;
    std::vector<std::vector<LinkId>> port_link_;
    std::map<std::string, std::uint64_t> name_rank_;
    std::vector<std::uint64_t> color_;
    std::vector<std::vector<NodeId>> groups_;
};

bool iso_equal(const Bigraph& a, const Bigraph& b) {
    if (a.regions() != b.regions() || a.sites() != b.sites() ||
        a.node_count() != b.node_count() || a.links().size() != b.links().size()) {
        return false;
    }
    if (a.outer_names() != b.outer_names()) {
        return false;
    }
    {
        std::vector<Control> ca = a.controls();
        std::vector<Control> cb = b.controls();
        std::sort(ca.begin(), ca.end());
        std::sort(cb.begin(), cb.end());
        if (ca != cb) {
            return false;
        }
    }
    if (exact_equal(a, b)) {
        return true;
    }
    return CanonicalEncoder(a).encode() == CanonicalEncoder(b).encode();
}

}  // namespace bigworld
