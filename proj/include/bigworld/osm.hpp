#ifndef BIGWORLD_OSM_HPP
#define BIGWORLD_OSM_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bigworld {

using OsmId = std::int64_t;

struct OsmNode {
    double lat = 0.0;
    double lon = 0.0;
    std::map<std::string, std::string> tags;
};

struct OsmWay {
    std::vector<OsmId> refs;  // ordered node references
    std::map<std::string, std::string> tags;
};

struct OsmRelation {
    struct Member {
        std::string type;
        OsmId ref = 0;
        std::string role;
    };
    std::vector<Member> members;
    std::map<std::string, std::string> tags;
};

/// Parsed OSM file. Each element type has its own id space.
struct OsmDocument {
    std::map<OsmId, OsmNode> nodes;
    std::map<OsmId, OsmWay> ways;
    std::map<OsmId, OsmRelation> relations;
    std::vector<std::string> warnings;
};

/// Parses OSM XML. Unknown elements are skipped, unknown tags kept verbatim.
/// Throws ParseError with a line number on malformed input; dangling nd
/// references are recorded as warnings and kept.
OsmDocument parse_osm(std::istream& in);
OsmDocument parse_osm_string(const std::string& text);
OsmDocument parse_osm_file(const std::string& path);

/// Street identity: the name tag, otherwise the ref tag, otherwise the OSM
/// way id.
struct StreetId {
    enum class Kind { Name, Ref, WayId };
    Kind kind = Kind::Name;
    std::string text;  // name or ref value
    OsmId way_id = 0;

    static StreetId name(std::string n) { return {Kind::Name, std::move(n), 0}; }
    static StreetId ref(std::string r) { return {Kind::Ref, std::move(r), 0}; }
    static StreetId way(OsmId id) { return {Kind::WayId, {}, id}; }

    /// Identifier string used in the bigraph, e.g. "way 53600489" for
    /// unnamed link roads.
    std::string display() const;

    auto operator<=>(const StreetId&) const = default;
};

/// Building name if the element is a named building: the name tag, or
/// "<housenumber> <street>" when both address tags are present.
std::optional<std::string> classify_building(const std::map<std::string, std::string>& tags);

/// Street identity if the way is one of the twelve routable highway values.
std::optional<StreetId> classify_street(const std::map<std::string, std::string>& tags,
                                        OsmId way_id);

/// (name, admin_level) for administrative boundary relations with level 2-11.
/// short_name takes precedence over name.
std::optional<std::pair<std::string, int>> classify_boundary(
    const std::map<std::string, std::string>& tags);

struct Building {
    std::string name;
    std::optional<std::string> addr_street;

    auto operator<=>(const Building&) const = default;
};

/// Everything the builder needs about one region.
struct RegionExtract {
    std::string boundary_name;
    std::map<StreetId, std::set<OsmId>> streets;      // street -> member way ids
    std::vector<Building> buildings;
    std::map<OsmId, std::set<StreetId>> junctions;    // osm node -> streets meeting there
    std::set<OsmId> crossing_nodes;                   // junctions with streets outside
};

/// Derives streets, junctions (nodes shared by ways of two or more distinct
/// streets) and named buildings from the region's document.
RegionExtract extract_region(const OsmDocument& doc, const std::string& boundary_name,
                             const std::set<OsmId>& crossing_nodes);

/// Immediate-children map from per-region descendant sets: an immediate
/// child is a descendant not contained in any other descendant of the same
/// parent. Children are listed name-sorted. Throws DataError on cyclic
/// containment.
std::map<std::string, std::vector<std::string>> derive_hierarchy(
    const std::map<std::string, std::set<std::string>>& descendants);

}  // namespace bigworld

#endif  // BIGWORLD_OSM_HPP
