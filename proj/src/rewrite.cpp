#include "bigworld/rewrite.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "bigworld/errors.hpp"

namespace bigworld {

namespace {

/// Per-parent site child, or absent. At most one site per redex parent is
/// supported; the unmatched children of a matched node fall into it.
std::optional<std::uint32_t> site_under(const Bigraph& b, const Parent& p) {
    auto sites = b.child_sites(p);
    if (sites.size() > 1) {
        throw ValidationError("redex parent has more than one site child");
    }
    return sites.empty() ? std::nullopt : std::optional<std::uint32_t>(sites[0]);
}

struct TargetIndex {
    std::vector<Parent> parent;
    std::vector<std::vector<LinkId>> port_link;  // node -> port -> link

    explicit TargetIndex(const Bigraph& b) {
        parent.resize(b.node_count());
        port_link.resize(b.node_count());
        for (NodeId v = 0; v < b.node_count(); ++v) {
            parent[v] = b.parent_of_node(v);
            port_link[v].assign(b.control(v).arity, 0);
        }
        for (LinkId l = 0; l < b.links().size(); ++l) {
            for (const auto& port : b.links()[l].ports) {
                port_link[port.node][port.index] = l;
            }
        }
    }
};

class Matcher {
public:
    Matcher(const Bigraph& target, const Bigraph& redex)
        : target_(target), redex_(redex), tindex_(target), rindex_(redex) {
        if (target.sites() != 0) {
            throw ApplicationError("occurrences: target must be ground");
        }
        for (std::uint32_t r = 0; r < redex.regions(); ++r) {
            if (!redex.child_sites(Parent::region(r)).empty()) {
                throw ValidationError("redex regions must not contain sites directly");
            }
        }
        // preorder over the redex forest, parents before children
        for (std::uint32_t r = 0; r < redex.regions(); ++r) {
            for (NodeId v : redex.child_nodes(Parent::region(r))) {
                preorder(v);
            }
        }
        closure_ = trans(target.place().nn);
    }

    std::vector<Match> run() {
        if (order_.size() != redex_.node_count()) {
            throw ValidationError("redex has unreachable nodes");
        }
        node_map_.assign(redex_.node_count(), 0);
        used_.assign(target_.node_count(), false);
        anchors_.assign(redex_.regions(), Parent::region(0));
        anchor_set_.assign(redex_.regions(), false);
        descend(0);
        std::sort(matches_.begin(), matches_.end(),
                  [](const Match& a, const Match& b) { return a.node_map < b.node_map; });
        return std::move(matches_);
    }

private:
    void preorder(NodeId v) {
        order_.push_back(v);
        for (NodeId k : redex_.child_nodes(Parent::node(v))) {
            preorder(k);
        }
    }

    void descend(std::size_t depth) {
        if (depth == order_.size()) {
            finish();
            return;
        }
        NodeId rnode = order_[depth];
        Parent rparent = redex_.parent_of_node(rnode);
        if (rparent.is_node()) {
            NodeId tparent = node_map_[rparent.index];
            for (NodeId cand : target_.child_nodes(Parent::node(tparent))) {
                try_candidate(depth, rnode, cand, std::nullopt);
            }
        } else {
            std::uint32_t region = rparent.index;
            if (anchor_set_[region]) {
                for (NodeId cand : target_.child_nodes(anchors_[region])) {
                    try_candidate(depth, rnode, cand, std::nullopt);
                }
            } else {
                for (NodeId cand = 0; cand < target_.node_count(); ++cand) {
                    try_candidate(depth, rnode, cand, region);
                }
            }
        }
    }

    void try_candidate(std::size_t depth, NodeId rnode, NodeId cand,
                       std::optional<std::uint32_t> region_to_anchor) {
        if (used_[cand] || target_.control(cand) != redex_.control(rnode)) {
            return;
        }
        if (!links_compatible(rnode, cand)) {
            return;
        }
        node_map_[rnode] = cand;
        used_[cand] = true;
        if (region_to_anchor) {
            anchors_[*region_to_anchor] = tindex_.parent[cand];
            anchor_set_[*region_to_anchor] = true;
        }
        descend(depth + 1);
        used_[cand] = false;
        if (region_to_anchor) {
            anchor_set_[*region_to_anchor] = false;
        }
    }

    // Cheap per-node pruning: a closed redex link needs a closed target link
    // of exactly the same width.
    bool links_compatible(NodeId rnode, NodeId cand) {
        for (PortIndex p = 0; p < redex_.control(rnode).arity; ++p) {
            const Link& rl = redex_.links()[rindex_.port_link[rnode][p]];
            const Link& tl = target_.links()[tindex_.port_link[cand][p]];
            if (rl.closed() && (!tl.closed() || tl.ports.size() != rl.ports.size())) {
                return false;
            }
        }
        return true;
    }

    void finish() {
        Match m;
        m.node_map = node_map_;
        m.anchors = anchors_;

        // children accounting: unmatched children of a matched node fall
        // into the site beneath it; without a site there must be none
        std::vector<bool> matched(target_.node_count(), false);
        for (NodeId t : node_map_) {
            matched[t] = true;
        }
        for (NodeId rnode = 0; rnode < redex_.node_count(); ++rnode) {
            NodeId tnode = node_map_[rnode];
            std::set<NodeId> expected;
            for (NodeId rk : redex_.child_nodes(Parent::node(rnode))) {
                expected.insert(node_map_[rk]);
            }
            std::vector<NodeId> extra;
            for (NodeId tk : target_.child_nodes(Parent::node(tnode))) {
                if (!expected.count(tk)) {
                    if (matched[tk]) {
                        return;  // another redex node nested under this one
                    }
                    extra.push_back(tk);
                }
            }
            auto site = site_under(redex_, Parent::node(rnode));
            if (!site) {
                if (!extra.empty()) {
                    return;
                }
            } else {
                m.site_roots[*site] = std::move(extra);
            }
        }
        for (std::uint32_t s = 0; s < redex_.sites(); ++s) {
            m.site_roots.try_emplace(s);
        }

        // link coherence: every port of a redex link must land in one target
        // link; closed redex links match exactly
        m.link_map.assign(redex_.links().size(), std::nullopt);
        for (LinkId rl = 0; rl < redex_.links().size(); ++rl) {
            const Link& rlink = redex_.links()[rl];
            std::optional<LinkId> tl;
            for (const auto& port : rlink.ports) {
                LinkId here = tindex_.port_link[node_map_[port.node]][port.index];
                if (tl && *tl != here) {
                    return;
                }
                tl = here;
            }
            if (rlink.closed() && tl) {
                const Link& tlink = target_.links()[*tl];
                if (!tlink.closed()) {
                    return;
                }
                std::set<Port> mapped;
                for (const auto& port : rlink.ports) {
                    mapped.insert(Port{node_map_[port.node], port.index});
                }
                if (tlink.ports != mapped) {
                    return;
                }
            }
            m.link_map[rl] = tl;
        }

        // context check via the place closure: no context node may descend
        // from a matched node except through a redex site
        std::vector<bool> in_param(target_.node_count(), false);
        for (const auto& [site, roots] : m.site_roots) {
            for (NodeId root : roots) {
                in_param[root] = true;
                for (NodeId d : closure_.chl(root)) {
                    in_param[d] = true;
                }
            }
        }
        for (NodeId t : node_map_) {
            if (in_param[t]) {
                return;
            }
            for (NodeId d : closure_.chl(t)) {
                if (!matched[d] && !in_param[d]) {
                    return;
                }
            }
        }

        matches_.push_back(std::move(m));
    }

    const Bigraph& target_;
    const Bigraph& redex_;
    TargetIndex tindex_;
    TargetIndex rindex_;
    SparseBoolMatrix closure_;
    std::vector<NodeId> order_;
    std::vector<NodeId> node_map_;
    std::vector<bool> used_;
    std::vector<Parent> anchors_;
    std::vector<bool> anchor_set_;
    std::vector<Match> matches_;
};

/// Copies the subtree rooted at `root` into `dst` under `under`; records the
/// node id mapping for link reconstruction.
void copy_subtree(const Bigraph& src, NodeId root, Bigraph& dst, const Parent& under,
                  std::map<NodeId, NodeId>& old_to_new) {
    NodeId copy = dst.add_node(src.control(root));
    dst.attach_node(copy, under);
    old_to_new[root] = copy;
    for (NodeId k : src.child_nodes(Parent::node(root))) {
        copy_subtree(src, k, dst, Parent::node(copy), old_to_new);
    }
}

/// Extracts the parameter of a match as a standalone bigraph with one region
/// per redex site. Links reaching outside the parameter stay open under
/// fresh names so they cannot satisfy a closed pattern link.
Bigraph build_parameter(const Bigraph& target, const Match& match, std::size_t redex_sites) {
    Bigraph out(redex_sites, 0);
    std::map<NodeId, NodeId> old_to_new;
    for (const auto& [site, roots] : match.site_roots) {
        for (NodeId root : roots) {
            copy_subtree(target, root, out, Parent::region(site), old_to_new);
        }
    }
    std::size_t cut = 0;
    for (const auto& link : target.links()) {
        std::set<Port> inside;
        bool complete = true;
        for (const auto& port : link.ports) {
            auto it = old_to_new.find(port.node);
            if (it == old_to_new.end()) {
                complete = false;
            } else {
                inside.insert(Port{it->second, port.index});
            }
        }
        if (inside.empty()) {
            continue;
        }
        std::optional<std::string> outer = link.outer;
        if (!link.closed() || !complete) {
            outer = link.outer ? *link.outer : "~cut" + std::to_string(cut++);
        }
        LinkId l = out.add_link(outer);
        for (const auto& port : inside) {
            out.attach_port(l, port.node, port.index);
        }
    }
    return out;
}

}  // namespace

ReactionRule::ReactionRule(std::string name, Bigraph redex, Bigraph reactum,
                           std::vector<std::uint32_t> inst_map,
                           std::vector<NegCondition> conditions)
    : name_(std::move(name)),
      redex_(std::move(redex)),
      reactum_(std::move(reactum)),
      inst_map_(std::move(inst_map)),
      conditions_(std::move(conditions)) {
    if (redex_.outer_names() != reactum_.outer_names()) {
        throw ValidationError("rule " + name_ + ": redex and reactum outer names differ");
    }
    if (redex_.regions() != reactum_.regions()) {
        throw ValidationError("rule " + name_ + ": redex and reactum region counts differ");
    }
    if (inst_map_.size() != reactum_.sites()) {
        throw ValidationError("rule " + name_ + ": instantiation map must cover reactum sites");
    }
    for (auto s : inst_map_) {
        if (s >= redex_.sites()) {
            throw ValidationError("rule " + name_ + ": instantiation map out of range");
        }
    }
    redex_.validate();
    reactum_.validate();
    for (const auto& c : conditions_) {
        c.pattern.validate();
    }
}

std::vector<Match> occurrences(const Bigraph& target, const Bigraph& redex) {
    if (redex.node_count() == 0) {
        return {};
    }
    return Matcher(target, redex).run();
}

bool check_conditions(const Match& match, const ReactionRule& rule, const Bigraph& target) {
    if (rule.conditions().empty()) {
        return true;
    }
    Bigraph parameter = build_parameter(target, match, rule.redex().sites());
    for (const auto& condition : rule.conditions()) {
        if (!occurrences(parameter, condition.pattern).empty()) {
            return false;
        }
    }
    return true;
}

Bigraph apply(const ReactionRule& rule, const Bigraph& target, const Match& match) {
    const Bigraph& redex = rule.redex();
    const Bigraph& reactum = rule.reactum();
    if (match.node_map.size() != redex.node_count() ||
        match.anchors.size() != redex.regions()) {
        throw ApplicationError("apply: match does not fit the rule");
    }

    std::vector<bool> matched(target.node_count(), false);
    for (NodeId t : match.node_map) {
        matched[t] = true;
    }
    std::vector<bool> dropped = matched;  // matched nodes and parameter originals vanish
    for (const auto& [site, roots] : match.site_roots) {
        std::vector<NodeId> stack(roots.begin(), roots.end());
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            dropped[v] = true;
            for (NodeId k : target.child_nodes(Parent::node(v))) {
                stack.push_back(k);
            }
        }
    }

    Bigraph out(target.regions(), 0);

    // context nodes keep their relative order
    std::map<NodeId, NodeId> ctx;
    for (NodeId v = 0; v < target.node_count(); ++v) {
        if (!dropped[v]) {
            ctx[v] = out.add_node(target.control(v));
        }
    }
    for (const auto& [old_id, new_id] : ctx) {
        Parent p = target.parent_of_node(old_id);
        out.attach_node(new_id, p.is_region() ? p : Parent::node(ctx.at(p.index)));
    }

    auto place_of_anchor = [&](const Parent& a) {
        return a.is_region() ? a : Parent::node(ctx.at(a.index));
    };

    // reactum nodes
    std::vector<NodeId> react_map(reactum.node_count());
    for (NodeId v = 0; v < reactum.node_count(); ++v) {
        react_map[v] = out.add_node(reactum.control(v));
    }
    for (NodeId v = 0; v < reactum.node_count(); ++v) {
        Parent p = reactum.parent_of_node(v);
        out.attach_node(react_map[v], p.is_region() ? place_of_anchor(match.anchors[p.index])
                                                    : Parent::node(react_map[p.index]));
    }

    // one parameter instance per reactum site
    std::vector<std::map<NodeId, NodeId>> instances(reactum.sites());
    for (std::uint32_t rs = 0; rs < reactum.sites(); ++rs) {
        Parent host = reactum.parent_of_site(rs);
        if (host.is_region()) {
            throw ApplicationError("apply: reactum sites must sit under a node");
        }
        Parent under = Parent::node(react_map[host.index]);
        std::uint32_t redex_site = rule.inst_map()[rs];
        auto it = match.site_roots.find(redex_site);
        if (it == match.site_roots.end()) {
            throw ApplicationError("apply: match lacks parameter for redex site " +
                                   std::to_string(redex_site));
        }
        for (NodeId root : it->second) {
            copy_subtree(target, root, out, under, instances[rs]);
        }
    }

    // target links survive minus matched ports, plus parameter copies and
    // the reactum ports routed through matching outer names
    std::vector<std::vector<std::pair<NodeId, PortIndex>>> extra(target.links().size());
    for (LinkId rl = 0; rl < reactum.links().size(); ++rl) {
        const Link& rlink = reactum.links()[rl];
        if (rlink.closed()) {
            continue;
        }
        auto redex_link = redex.find_outer(*rlink.outer);
        if (!redex_link || !match.link_map[*redex_link]) {
            continue;  // idle in the redex: nothing to re-attach to
        }
        LinkId t = *match.link_map[*redex_link];
        for (const auto& port : rlink.ports) {
            extra[t].emplace_back(react_map[port.node], port.index);
        }
    }

    for (LinkId t = 0; t < target.links().size(); ++t) {
        const Link& tlink = target.links()[t];
        std::set<Port> ports;
        for (const auto& port : tlink.ports) {
            auto it = ctx.find(port.node);
            if (it != ctx.end()) {
                ports.insert(Port{it->second, port.index});
            }
            for (const auto& inst : instances) {
                auto pit = inst.find(port.node);
                if (pit != inst.end()) {
                    ports.insert(Port{pit->second, port.index});
                }
            }
        }
        for (const auto& [node, index] : extra[t]) {
            ports.insert(Port{node, index});
        }
        if (ports.empty() && tlink.closed()) {
            continue;
        }
        LinkId l = out.add_link(tlink.outer);
        for (const auto& port : ports) {
            out.attach_port(l, port.node, port.index);
        }
    }
    for (const Link& rlink : reactum.links()) {
        if (!rlink.closed()) {
            continue;
        }
        LinkId l = out.add_link(std::nullopt);
        for (const auto& port : rlink.ports) {
            out.attach_port(l, react_map[port.node], port.index);
        }
    }

    out.validate();
    return out;
}

std::optional<Bigraph> rewrite_first(const ReactionRule& rule, const Bigraph& target) {
    for (const auto& match : occurrences(target, rule.redex())) {
        if (check_conditions(match, rule, target)) {
            return apply(rule, target, match);
        }
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, Bigraph>> step(const std::vector<ReactionRule>& rules,
                                                  const Bigraph& state) {
    std::vector<std::pair<std::string, Bigraph>> out;
    for (const auto& rule : rules) {
        for (const auto& match : occurrences(state, rule.redex())) {
            if (!check_conditions(match, rule, state)) {
                continue;
            }
            Bigraph next = apply(rule, state, match);
            bool fresh = true;
            for (const auto& [name, seen] : out) {
                if (iso_equal(seen, next)) {
                    fresh = false;
                    break;
                }
            }
            if (fresh) {
                out.emplace_back(rule.name(), std::move(next));
            }
        }
    }
    return out;
}

}  // namespace bigworld
