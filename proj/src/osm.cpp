#include "bigworld/osm.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bigworld/errors.hpp"

namespace bigworld {

namespace {

/// Minimal XML reader covering the OSM dialect: elements, attributes,
/// comments, processing instructions and character references. Tracks line
/// numbers for error reporting.
class XmlScanner {
public:
    explicit XmlScanner(std::string text) : text_(std::move(text)) {}

    struct Tag {
        std::string name;
        std::map<std::string, std::string> attrs;
        bool closing = false;      // </name>
        bool self_closed = false;  // <name ... />
    };

    /// Next tag, skipping text content, comments and declarations.
    std::optional<Tag> next() {
        for (;;) {
            while (at_ < text_.size() && text_[at_] != '<') {
                bump();
            }
            if (at_ >= text_.size()) {
                return std::nullopt;
            }
            if (starts_with("<!--")) {
                skip_until("-->");
                continue;
            }
            if (starts_with("<?")) {
                skip_until("?>");
                continue;
            }
            if (starts_with("<!")) {
                skip_until(">");
                continue;
            }
            return read_tag();
        }
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError("line " + std::to_string(line_) + ": " + message);
    }

private:
    void bump() {
        if (text_[at_] == '\n') {
            ++line_;
        }
        ++at_;
    }

    bool starts_with(const std::string& prefix) const {
        return text_.compare(at_, prefix.size(), prefix) == 0;
    }

    void skip_until(const std::string& marker) {
        auto pos = text_.find(marker, at_);
        if (pos == std::string::npos) {
            fail("unterminated '" + marker + "'");
        }
        while (at_ < pos + marker.size()) {
            bump();
        }
    }

    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
               c == ':' || c == '.';
    }

    void skip_space() {
        while (at_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[at_]))) {
            bump();
        }
    }

    std::string read_name() {
        std::size_t start = at_;
        while (at_ < text_.size() && name_char(text_[at_])) {
            bump();
        }
        if (at_ == start) {
            fail("expected a name");
        }
        return text_.substr(start, at_ - start);
    }

    std::string decode(const std::string& raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out += raw[i];
                continue;
            }
            auto end = raw.find(';', i);
            if (end == std::string::npos) {
                fail("unterminated character reference");
            }
            std::string entity = raw.substr(i + 1, end - i - 1);
            if (entity == "amp") {
                out += '&';
            } else if (entity == "lt") {
                out += '<';
            } else if (entity == "gt") {
                out += '>';
            } else if (entity == "quot") {
                out += '"';
            } else if (entity == "apos") {
                out += '\'';
            } else if (!entity.empty() && entity[0] == '#') {
                int base = 10;
                std::string digits = entity.substr(1);
                if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
                    base = 16;
                    digits = digits.substr(1);
                }
                char* stop = nullptr;
                long code = std::strtol(digits.c_str(), &stop, base);
                if (stop == nullptr || *stop != '\0' || code <= 0 || code > 0x10FFFF) {
                    fail("bad character reference &" + entity + ";");
                }
                // encode as UTF-8
                if (code < 0x80) {
                    out += static_cast<char>(code);
                } else if (code < 0x800) {
                    out += static_cast<char>(0xC0 | (code >> 6));
                    out += static_cast<char>(0x80 | (code & 0x3F));
                } else if (code < 0x10000) {
                    out += static_cast<char>(0xE0 | (code >> 12));
                    out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                    out += static_cast<char>(0x80 | (code & 0x3F));
                } else {
                    out += static_cast<char>(0xF0 | (code >> 18));
                    out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
                    out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                    out += static_cast<char>(0x80 | (code & 0x3F));
                }
            } else {
                fail("unknown entity &" + entity + ";");
            }
            i = end;
        }
        return out;
    }

    Tag read_tag() {
        bump();  // consume '<'
        Tag tag;
        if (at_ < text_.size() && text_[at_] == '/') {
            bump();
            tag.closing = true;
            tag.name = read_name();
            skip_space();
            if (at_ >= text_.size() || text_[at_] != '>') {
                fail("malformed closing tag </" + tag.name);
            }
            bump();
            return tag;
        }
        tag.name = read_name();
        for (;;) {
            skip_space();
            if (at_ >= text_.size()) {
                fail("unterminated tag <" + tag.name);
            }
            if (text_[at_] == '>') {
                bump();
                return tag;
            }
            if (text_[at_] == '/') {
                bump();
                if (at_ >= text_.size() || text_[at_] != '>') {
                    fail("malformed self-closing tag <" + tag.name);
                }
                bump();
                tag.self_closed = true;
                return tag;
            }
            std::string key = read_name();
            skip_space();
            if (at_ >= text_.size() || text_[at_] != '=') {
                fail("attribute " + key + " lacks a value");
            }
            bump();
            skip_space();
            if (at_ >= text_.size() || (text_[at_] != '"' && text_[at_] != '\'')) {
                fail("attribute " + key + " lacks a quoted value");
            }
            char quote = text_[at_];
            bump();
            std::size_t start = at_;
            while (at_ < text_.size() && text_[at_] != quote) {
                if (text_[at_] == '<') {
                    fail("unescaped '<' in attribute value");
                }
                bump();
            }
            if (at_ >= text_.size()) {
                fail("unterminated attribute value for " + key);
            }
            tag.attrs[key] = decode(text_.substr(start, at_ - start));
            bump();
        }
    }

    std::string text_;
    std::size_t at_ = 0;
    std::size_t line_ = 1;
};

OsmId require_id(XmlScanner& xml, const XmlScanner::Tag& tag) {
    auto it = tag.attrs.find("id");
    if (it == tag.attrs.end()) {
        xml.fail("<" + tag.name + "> lacks an id attribute");
    }
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        xml.fail("<" + tag.name + "> has a non-numeric id '" + it->second + "'");
    }
}

double attr_double(XmlScanner& xml, const XmlScanner::Tag& tag, const std::string& key) {
    auto it = tag.attrs.find(key);
    if (it == tag.attrs.end()) {
        return 0.0;
    }
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        xml.fail("<" + tag.name + "> has a non-numeric " + key);
    }
}

/// Consumes everything up to the closing tag of `parent`.
void skip_element(XmlScanner& xml, const std::string& parent) {
    for (;;) {
        auto tag = xml.next();
        if (!tag) {
            xml.fail("<" + parent + "> is never closed");
        }
        if (tag->closing) {
            if (tag->name != parent) {
                xml.fail("mismatched </" + tag->name + "> inside <" + parent + ">");
            }
            return;
        }
        if (!tag->self_closed) {
            skip_element(xml, tag->name);
        }
    }
}

OsmId attr_int(XmlScanner& xml, const XmlScanner::Tag& tag, const std::string& key) {
    auto it = tag.attrs.find(key);
    if (it == tag.attrs.end()) {
        xml.fail("<" + tag.name + "> lacks a " + key + " attribute");
    }
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        xml.fail("<" + tag.name + "> has a non-numeric " + key + " '" + it->second + "'");
    }
}

// Consumes children of an element until its closing tag, dispatching <tag>,
// <nd> and <member> into the handlers. Anything else is skipped.
template <typename OnTag, typename OnNd, typename OnMember>
void read_children(XmlScanner& xml, const std::string& parent, OnTag on_tag, OnNd on_nd,
                   OnMember on_member) {
    for (;;) {
        auto tag = xml.next();
        if (!tag) {
            xml.fail("<" + parent + "> is never closed");
        }
        if (tag->closing) {
            if (tag->name != parent) {
                xml.fail("mismatched </" + tag->name + "> inside <" + parent + ">");
            }
            return;
        }
        if (tag->name == "tag") {
            on_tag(*tag);
        } else if (tag->name == "nd") {
            on_nd(*tag);
        } else if (tag->name == "member") {
            on_member(*tag);
        }
        if (!tag->self_closed) {
            skip_element(xml, tag->name);
        }
    }
}

void put_tag(XmlScanner& xml, const XmlScanner::Tag& tag,
             std::map<std::string, std::string>& into) {
    auto k = tag.attrs.find("k");
    auto v = tag.attrs.find("v");
    if (k == tag.attrs.end() || v == tag.attrs.end()) {
        xml.fail("<tag> needs k and v attributes");
    }
    into[k->second] = v->second;
}

}  // namespace

OsmDocument parse_osm_string(const std::string& text) {
    XmlScanner xml(text);
    OsmDocument doc;

    auto root = xml.next();
    if (!root || root->name != "osm" || root->closing) {
        xml.fail("expected <osm> root element");
    }
    if (root->self_closed) {
        return doc;
    }

    for (;;) {
        auto tag = xml.next();
        if (!tag) {
            xml.fail("<osm> is never closed");
        }
        if (tag->closing) {
            if (tag->name != "osm") {
                xml.fail("mismatched </" + tag->name + ">");
            }
            break;
        }
        if (tag->name == "node") {
            OsmId id = require_id(xml, *tag);
            OsmNode node;
            node.lat = attr_double(xml, *tag, "lat");
            node.lon = attr_double(xml, *tag, "lon");
            if (!tag->self_closed) {
                read_children(
                    xml, "node", [&](const auto& t) { put_tag(xml, t, node.tags); },
                    [&](const auto&) { xml.fail("<nd> inside <node>"); },
                    [&](const auto&) { xml.fail("<member> inside <node>"); });
            }
            if (!doc.nodes.emplace(id, std::move(node)).second) {
                doc.warnings.push_back("duplicate node id " + std::to_string(id));
            }
        } else if (tag->name == "way") {
            OsmId id = require_id(xml, *tag);
            OsmWay way;
            if (!tag->self_closed) {
                read_children(
                    xml, "way", [&](const auto& t) { put_tag(xml, t, way.tags); },
                    [&](const auto& t) {
                        auto ref = t.attrs.find("ref");
                        if (ref == t.attrs.end()) {
                            xml.fail("<nd> lacks a ref attribute");
                        }
                        way.refs.push_back(std::stoll(ref->second));
                    },
                    [&](const auto&) { xml.fail("<member> inside <way>"); });
            }
            if (!doc.ways.emplace(id, std::move(way)).second) {
                doc.warnings.push_back("duplicate way id " + std::to_string(id));
            }
        } else if (tag->name == "relation") {
            OsmId id = require_id(xml, *tag);
            OsmRelation rel;
            if (!tag->self_closed) {
                read_children(
                    xml, "relation", [&](const auto& t) { put_tag(xml, t, rel.tags); },
                    [&](const auto&) { xml.fail("<nd> inside <relation>"); },
                    [&](const auto& t) {
                        OsmRelation::Member member;
                        auto type = t.attrs.find("type");
                        auto ref = t.attrs.find("ref");
                        if (type == t.attrs.end() || ref == t.attrs.end()) {
                            xml.fail("<member> needs type and ref attributes");
                        }
                        member.type = type->second;
                        member.ref = std::stoll(ref->second);
                        auto role = t.attrs.find("role");
                        if (role != t.attrs.end()) {
                            member.role = role->second;
                        }
                        rel.members.push_back(std::move(member));
                    });
            }
            if (!doc.relations.emplace(id, std::move(rel)).second) {
                doc.warnings.push_back("duplicate relation id " + std::to_string(id));
            }
        } else if (!tag->self_closed) {
            // skip unknown containers such as <bounds>, <note>, <meta>
            read_children(
                xml, tag->name, [](const auto&) {}, [](const auto&) {}, [](const auto&) {});
        }
    }

    for (const auto& [id, way] : doc.ways) {
        for (OsmId ref : way.refs) {
            if (!doc.nodes.count(ref)) {
                doc.warnings.push_back("way " + std::to_string(id) +
                                       " references missing node " + std::to_string(ref));
            }
        }
    }
    return doc;
}

OsmDocument parse_osm(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_osm_string(buffer.str());
}

OsmDocument parse_osm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    return parse_osm(in);
}

std::string StreetId::display() const {
    switch (kind) {
        case Kind::Name:
        case Kind::Ref:
            return text;
        case Kind::WayId:
            return "way " + std::to_string(way_id);
    }
    return {};
}

std::optional<std::string> classify_building(const std::map<std::string, std::string>& tags) {
    if (!tags.count("building")) {
        return std::nullopt;
    }
    if (auto it = tags.find("name"); it != tags.end()) {
        return it->second;
    }
    auto number = tags.find("addr:housenumber");
    auto street = tags.find("addr:street");
    if (number != tags.end() && street != tags.end()) {
        return number->second + " " + street->second;
    }
    return std::nullopt;
}

std::optional<StreetId> classify_street(const std::map<std::string, std::string>& tags,
                                        OsmId way_id) {
    static const std::array<const char*, 12> routable = {
        "motorway",      "trunk",      "primary",      "secondary",
        "tertiary",      "unclassified", "residential",
        "motorway_link", "trunk_link", "primary_link", "secondary_link",
        "tertiary_link",
    };
    auto highway = tags.find("highway");
    if (highway == tags.end() ||
        std::find(routable.begin(), routable.end(), highway->second) == routable.end()) {
        return std::nullopt;
    }
    if (auto it = tags.find("name"); it != tags.end()) {
        return StreetId::name(it->second);
    }
    if (auto it = tags.find("ref"); it != tags.end()) {
        return StreetId::ref(it->second);
    }
    return StreetId::way(way_id);
}

std::optional<std::pair<std::string, int>> classify_boundary(
    const std::map<std::string, std::string>& tags) {
    auto boundary = tags.find("boundary");
    if (boundary == tags.end() || boundary->second != "administrative") {
        return std::nullopt;
    }
    auto level_tag = tags.find("admin_level");
    if (level_tag == tags.end()) {
        return std::nullopt;
    }
    int level = 0;
    try {
        level = std::stoi(level_tag->second);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (level < 2 || level > 11) {
        return std::nullopt;
    }
    auto name = tags.find("short_name");
    if (name == tags.end()) {
        name = tags.find("name");
    }
    if (name == tags.end()) {
        return std::nullopt;
    }
    return std::make_pair(name->second, level);
}

RegionExtract extract_region(const OsmDocument& doc, const std::string& boundary_name,
                             const std::set<OsmId>& crossing_nodes) {
    RegionExtract out;
    out.boundary_name = boundary_name;
    out.crossing_nodes = crossing_nodes;

    std::map<OsmId, std::set<StreetId>> streets_at_node;
    for (const auto& [way_id, way] : doc.ways) {
        auto street = classify_street(way.tags, way_id);
        if (!street) {
            continue;
        }
        out.streets[*street].insert(way_id);
        for (OsmId ref : way.refs) {
            streets_at_node[ref].insert(*street);
        }
    }
    for (auto& [node, streets] : streets_at_node) {
        if (streets.size() >= 2) {
            out.junctions.emplace(node, std::move(streets));
        }
    }

    auto add_building = [&](const std::map<std::string, std::string>& tags) {
        auto name = classify_building(tags);
        if (!name) {
            return;
        }
        std::optional<std::string> street;
        if (auto it = tags.find("addr:street"); it != tags.end()) {
            street = it->second;
        }
        out.buildings.push_back(Building{*name, std::move(street)});
    };
    for (const auto& [id, node] : doc.nodes) {
        add_building(node.tags);
    }
    for (const auto& [id, way] : doc.ways) {
        add_building(way.tags);
    }
    for (const auto& [id, rel] : doc.relations) {
        add_building(rel.tags);
    }
    return out;
}

std::map<std::string, std::vector<std::string>> derive_hierarchy(
    const std::map<std::string, std::set<std::string>>& descendants) {
    for (const auto& [region, below] : descendants) {
        if (below.count(region)) {
            throw DataError("region " + region + " contains itself");
        }
        for (const auto& other : below) {
            auto it = descendants.find(other);
            if (it != descendants.end() && it->second.count(region)) {
                throw DataError("cyclic containment between " + region + " and " + other);
            }
        }
    }

    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [region, below] : descendants) {
        auto& children = out[region];
        for (const auto& candidate : below) {
            bool nested = false;
            for (const auto& other : below) {
                if (other == candidate) {
                    continue;
                }
                auto it = descendants.find(other);
                if (it != descendants.end() && it->second.count(candidate)) {
                    nested = true;
                    break;
                }
            }
            if (!nested) {
                children.push_back(candidate);
            }
        }
    }
    return out;
}

}  // namespace bigworld
