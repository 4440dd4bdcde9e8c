#ifndef BIGWORLD_REWRITE_HPP
#define BIGWORLD_REWRITE_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bigworld/bigraph.hpp"

namespace bigworld {

/// A pattern that must not occur in the parameter for a rule to fire.
struct NegCondition {
    Bigraph pattern;
};

/// Rewrite rule: an occurrence of the redex is replaced by the reactum.
/// inst_map assigns each reactum site the redex site whose parameter content
/// it receives; a redex site referenced twice is duplicated, one referenced
/// never is discarded.
class ReactionRule {
public:
    ReactionRule(std::string name, Bigraph redex, Bigraph reactum,
                 std::vector<std::uint32_t> inst_map,
                 std::vector<NegCondition> conditions = {});

    const std::string& name() const { return name_; }
    const Bigraph& redex() const { return redex_; }
    const Bigraph& reactum() const { return reactum_; }
    const std::vector<std::uint32_t>& inst_map() const { return inst_map_; }
    const std::vector<NegCondition>& conditions() const { return conditions_; }

private:
    std::string name_;
    Bigraph redex_;
    Bigraph reactum_;
    std::vector<std::uint32_t> inst_map_;
    std::vector<NegCondition> conditions_;
};

/// An occurrence of a redex in a target bigraph.
struct Match {
    std::vector<NodeId> node_map;                            // redex node -> target node
    std::vector<Parent> anchors;                             // redex region -> target place
    std::map<std::uint32_t, std::vector<NodeId>> site_roots; // redex site -> parameter roots
    std::vector<std::optional<LinkId>> link_map;             // redex link -> target link
};

/// All decompositions of the target as context . redex . parameter. The
/// target must be ground (no sites). Matching is control- and
/// parameter-exact; matches are returned in ascending order of the target
/// node ids assigned to the redex nodes.
std::vector<Match> occurrences(const Bigraph& target, const Bigraph& redex);

/// True iff no negative condition pattern occurs in the parameter part of
/// the decomposition.
bool check_conditions(const Match& match, const ReactionRule& rule, const Bigraph& target);

/// Replaces the matched redex with the rule's reactum, instantiating
/// parameter content per the rule's instantiation map. Links of retained
/// parameter content are preserved; links through the redex's outer names
/// are re-attached to the reactum's ports.
Bigraph apply(const ReactionRule& rule, const Bigraph& target, const Match& match);

/// Applies the rule at its first match that passes the conditions.
std::optional<Bigraph> rewrite_first(const ReactionRule& rule, const Bigraph& target);

/// All successor states over all rules and matches, deduplicated up to
/// iso_equal. Pairs carry the name of the rule that produced each successor.
std::vector<std::pair<std::string, Bigraph>> step(const std::vector<ReactionRule>& rules,
                                                  const Bigraph& state);

}  // namespace bigworld

#endif  // BIGWORLD_REWRITE_HPP
