#include <doctest.h>

#include <random>

#include "bigworld/bigraph.hpp"
#include "bigworld/errors.hpp"

using namespace bigworld;

namespace {

const Control kAgent{"Agent", 1, std::nullopt};
const Control kBuilding{"Building", 1, std::nullopt};
const Control kDevice{"Device", 1, std::nullopt};

Control id_of(const std::string& param) {
    return Control{"ID", 1, param};
}

// Random bigraph with the requested interface; controls drawn from a small
// vocabulary, ports grouped into links over a shared name pool.
Bigraph random_bigraph(std::uint32_t regions, std::uint32_t sites, std::mt19937& rng) {
    std::uniform_int_distribution<int> node_count(0, 5);
    std::uniform_int_distribution<int> control_pick(0, 3);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    static const Control vocab[] = {
        {"A", 0, std::nullopt},
        {"B", 1, std::nullopt},
        {"C", 2, std::nullopt},
        {"B", 1, std::string("p")},
    };

    Bigraph b(regions, sites);
    int n = node_count(rng);
    std::vector<NodeId> nodes;
    for (int i = 0; i < n; ++i) {
        NodeId v = b.add_node(vocab[control_pick(rng)]);
        if (nodes.empty() || coin(rng) < 0.4) {
            std::uniform_int_distribution<std::uint32_t> r(0, regions - 1);
            b.attach_node(v, Parent::region(r(rng)));
        } else {
            std::uniform_int_distribution<std::size_t> p(0, nodes.size() - 1);
            b.attach_node(v, Parent::node(nodes[p(rng)]));
        }
        nodes.push_back(v);
    }
    for (std::uint32_t s = 0; s < sites; ++s) {
        if (nodes.empty() || coin(rng) < 0.5) {
            std::uniform_int_distribution<std::uint32_t> r(0, regions - 1);
            b.attach_site(s, Parent::region(r(rng)));
        } else {
            std::uniform_int_distribution<std::size_t> p(0, nodes.size() - 1);
            b.attach_site(s, Parent::node(nodes[p(rng)]));
        }
    }

    std::vector<Port> ports;
    for (NodeId v : nodes) {
        for (PortIndex p = 0; p < b.control(v).arity; ++p) {
            ports.push_back(Port{v, p});
        }
    }
    std::shuffle(ports.begin(), ports.end(), rng);
    static const char* pool[] = {"x", "y", "z"};
    std::size_t used_names = 0;
    std::size_t at = 0;
    while (at < ports.size()) {
        std::uniform_int_distribution<std::size_t> cell(1, std::min<std::size_t>(3, ports.size() - at));
        std::size_t take = cell(rng);
        std::optional<std::string> outer;
        if (used_names < 3 && coin(rng) < 0.5) {
            outer = pool[used_names++];
        }
        LinkId l = b.add_link(outer);
        for (std::size_t i = 0; i < take; ++i, ++at) {
            b.attach_port(l, ports[at].node, ports[at].index);
        }
    }
    b.validate();
    return b;
}

}  // namespace

TEST_CASE("ion builds one region, one node, one site") {
    auto agent = ion(kAgent, {"x"});
    CHECK(agent.regions() == 1);
    CHECK(agent.sites() == 1);
    CHECK(agent.node_count() == 1);
    CHECK(agent.links().size() == 1);
    CHECK(agent.links()[0].outer == "x");
    CHECK(agent.parent_of_node(0) == Parent::region(0));
    CHECK(agent.parent_of_site(0) == Parent::node(0));
    agent.validate();

    auto junction = ion(Control{"Junction", 1, std::nullopt}, {"w"});
    CHECK(junction.outer_names() == std::set<std::string>{"w"});

    auto labelled = ion(id_of("A"), {"y"});
    CHECK(labelled.control(0) == id_of("A"));
    CHECK(labelled.control(0) != id_of("B"));

    CHECK_THROWS_AS(ion(kAgent, {}), ValidationError);
    CHECK_THROWS_AS(ion(Control{"C", 2, std::nullopt}, {"x", "x"}), ValidationError);
}

TEST_CASE("elementary bigraphs have the stated shapes") {
    auto i = elementary_id();
    CHECK(i.regions() == 1);
    CHECK(i.sites() == 1);
    CHECK(i.node_count() == 0);

    auto unit = one();
    CHECK(unit.regions() == 1);
    CHECK(unit.sites() == 0);
    CHECK(unit.node_count() == 0);

    auto j = join();
    CHECK(j.regions() == 1);
    CHECK(j.sites() == 2);

    auto s = symmetry();
    CHECK(s.regions() == 2);
    CHECK(s.sites() == 2);
    CHECK(s.child_sites(Parent::region(0)) == std::vector<std::uint32_t>{1});
    CHECK(s.child_sites(Parent::region(1)) == std::vector<std::uint32_t>{0});

    CHECK(iso_equal(nest(join(), ppar(one(), one())), one()));
}

TEST_CASE("placing") {
    SUBCASE("identity permutation behaves as iterated parallel id") {
        auto p = placing({0, 1, 2});
        auto ids = ppar(ppar(elementary_id(), elementary_id()), elementary_id());
        CHECK(iso_equal(p, ids));
    }

    SUBCASE("[1,0] equals symmetry") {
        CHECK(iso_equal(placing({1, 0}), symmetry()));
    }

    SUBCASE("symmetry reorders the regions of a product") {
        auto a = nest(ion(kAgent, {"x"}), one());
        auto b = nest(ion(kBuilding, {"y"}), one());
        auto swapped = nest(symmetry(), ppar(a, b));
        CHECK(swapped.control(*swapped.child_nodes(Parent::region(0)).begin()).name ==
              "Building");
        CHECK(swapped.control(*swapped.child_nodes(Parent::region(1)).begin()).name == "Agent");
    }

    SUBCASE("rejects non-permutations") {
        CHECK_THROWS_AS(placing({0, 0}), ValidationError);
        CHECK_THROWS_AS(placing({0, 2}), ValidationError);
    }

    SUBCASE("grouping routes several sites into one region") {
        auto phi = grouping({{0, 6}, {1}, {2}, {3}, {4}, {5, 7}});
        CHECK(phi.regions() == 6);
        CHECK(phi.sites() == 8);
        CHECK(phi.child_sites(Parent::region(0)) == std::vector<std::uint32_t>{0, 6});
        CHECK(phi.child_sites(Parent::region(5)) == std::vector<std::uint32_t>{5, 7});
        CHECK_THROWS_AS(grouping({{0}, {0}}), ValidationError);
    }
}

TEST_CASE("nest") {
    SUBCASE("an agent carrying nothing") {
        auto b = nest(ion(kAgent, {"x"}), one());
        CHECK(b.regions() == 1);
        CHECK(b.sites() == 0);
        CHECK(b.node_count() == 1);
        CHECK(b.outer_names() == std::set<std::string>{"x"});
        b.validate();
    }

    SUBCASE("identity is neutral") {
        std::mt19937 rng(3);
        for (int i = 0; i < 20; ++i) {
            auto b = random_bigraph(1, 1, rng);
            CHECK(iso_equal(nest(elementary_id(), b), b));
        }
    }

    SUBCASE("a building containing one agent") {
        auto b = nest(ion(kBuilding, {"y"}), nest(ion(kAgent, {"x"}), one()));
        CHECK(b.node_count() == 2);
        CHECK(b.outer_names() == std::set<std::string>{"x", "y"});
        auto roots = b.child_nodes(Parent::region(0));
        REQUIRE(roots.size() == 1);
        CHECK(b.control(roots[0]).name == "Building");
        auto inner = b.child_nodes(Parent::node(roots[0]));
        REQUIRE(inner.size() == 1);
        CHECK(b.control(inner[0]).name == "Agent");
    }

    SUBCASE("interface mismatch is rejected") {
        CHECK_THROWS_AS(nest(one(), one()), CompositionError);
    }

    SUBCASE("shared outer names are combined into one link") {
        auto id_agent = nest(ion(id_of("Agent A"), {"x"}), one());
        auto housed = nest(ion(kBuilding, {"y"}), nest(ion(kAgent, {"x"}), one()));
        auto f = ppar(id_agent, housed);
        std::size_t open = 0;
        for (const auto& l : f.links()) {
            if (l.outer == "x") {
                CHECK(l.ports.size() == 2);
                ++open;
            }
        }
        CHECK(open == 1);
    }
}

TEST_CASE("ppar") {
    SUBCASE("two devices on one shared open link") {
        auto d = ion(kDevice, {"x"});
        auto both = ppar(nest(d, one()), nest(d, one()));
        CHECK(both.regions() == 2);
        CHECK(both.links().size() == 1);
        CHECK(both.links()[0].ports.size() == 2);
        CHECK(both.links()[0].outer == "x");
    }

    SUBCASE("two empty regions") {
        auto b = ppar(one(), one());
        CHECK(b.regions() == 2);
        CHECK(b.node_count() == 0);
    }

    SUBCASE("disjoint names keep separate links") {
        auto a = nest(ion(kDevice, {"x"}), one());
        auto b = nest(ion(kDevice, {"y"}), one());
        CHECK(ppar(a, b).links().size() == 2);
    }
}

TEST_CASE("merge product") {
    SUBCASE("agent beside a hole") {
        auto m = merge_prod(nest(ion(kAgent, {"x"}), one()), elementary_id());
        CHECK(m.regions() == 1);
        CHECK(m.sites() == 1);
        CHECK(m.node_count() == 1);
        CHECK(m.parent_of_site(0) == m.parent_of_node(0));
    }

    SUBCASE("merging with an empty region is neutral up to iso") {
        std::mt19937 rng(5);
        for (int i = 0; i < 20; ++i) {
            auto b = random_bigraph(1, 0, rng);
            CHECK(iso_equal(merge_prod(one(), b), b));
            CHECK(iso_equal(merge_prod(b, one()), b));
        }
    }

    SUBCASE("region count after merge is 1") {
        auto m = merge_prod(nest(ion(kAgent, {"x"}), one()),
                            nest(ion(kBuilding, {"y"}), one()));
        CHECK(m.regions() == 1);
        CHECK(m.child_nodes(Parent::region(0)).size() == 2);
    }
}

TEST_CASE("close") {
    auto device = nest(ion(kDevice, {"x"}), one());

    SUBCASE("disconnects a single device") {
        auto closed = close("x", device);
        CHECK(closed.outer_names().empty());
        REQUIRE(closed.links().size() == 1);
        CHECK(closed.links()[0].closed());
        CHECK(closed.links()[0].ports.size() == 1);
    }

    SUBCASE("two connected devices end up on one closed link") {
        auto closed = close("x", ppar(device, device));
        REQUIRE(closed.links().size() == 1);
        CHECK(closed.links()[0].closed());
        CHECK(closed.links()[0].ports.size() == 2);
    }

    SUBCASE("closing an absent name is a no-op") {
        auto same = close("nope", device);
        CHECK(iso_equal(same, device));
    }

    SUBCASE("bound and free occurrences of the same name") {
        auto pair = close("x", ppar(device, device));
        auto with_free = ppar(pair, device);
        CHECK(with_free.outer_names() == std::set<std::string>{"x"});
        CHECK(with_free.links().size() == 2);
    }
}

TEST_CASE("iso_equal") {
    SUBCASE("reflexive") {
        std::mt19937 rng(8);
        for (int i = 0; i < 30; ++i) {
            auto b = random_bigraph(1 + i % 2, i % 3, rng);
            CHECK(iso_equal(b, b));
        }
    }

    SUBCASE("invariant under node relabelling") {
        // same structure assembled in two different node orders
        Bigraph a(1, 0);
        auto b1 = a.add_node(kBuilding);
        auto a1 = a.add_node(kAgent);
        a.attach_node(b1, Parent::region(0));
        a.attach_node(a1, Parent::node(b1));
        auto la = a.add_link("x");
        a.attach_port(la, b1, 0);
        auto lb = a.add_link("y");
        a.attach_port(lb, a1, 0);

        Bigraph b(1, 0);
        auto a2 = b.add_node(kAgent);
        auto b2 = b.add_node(kBuilding);
        b.attach_node(b2, Parent::region(0));
        b.attach_node(a2, Parent::node(b2));
        auto ly = b.add_link("y");
        b.attach_port(ly, a2, 0);
        auto lx = b.add_link("x");
        b.attach_port(lx, b2, 0);

        CHECK(iso_equal(a, b));
    }

    SUBCASE("outer names are compared literally") {
        auto ax = nest(ion(kAgent, {"x"}), one());
        auto ay = nest(ion(kAgent, {"y"}), one());
        CHECK_FALSE(iso_equal(ax, ay));
    }

    SUBCASE("distinguishes parameters") {
        auto pa = nest(ion(id_of("A"), {"x"}), one());
        auto pb = nest(ion(id_of("B"), {"x"}), one());
        CHECK_FALSE(iso_equal(pa, pb));
    }

    SUBCASE("distinguishes link topology among symmetric siblings") {
        // two pairs of linked devices vs. a chain arrangement
        Bigraph a(1, 0);
        std::vector<NodeId> nodes;
        for (int i = 0; i < 4; ++i) {
            auto v = a.add_node(kDevice);
            a.attach_node(v, Parent::region(0));
            nodes.push_back(v);
        }
        auto pair1 = a.add_link(std::nullopt);
        a.attach_port(pair1, nodes[0], 0);
        a.attach_port(pair1, nodes[1], 0);
        auto pair2 = a.add_link(std::nullopt);
        a.attach_port(pair2, nodes[2], 0);
        a.attach_port(pair2, nodes[3], 0);

        Bigraph b(1, 0);
        nodes.clear();
        for (int i = 0; i < 4; ++i) {
            auto v = b.add_node(kDevice);
            b.attach_node(v, Parent::region(0));
            nodes.push_back(v);
        }
        auto three = b.add_link(std::nullopt);
        b.attach_port(three, nodes[0], 0);
        b.attach_port(three, nodes[1], 0);
        b.attach_port(three, nodes[2], 0);
        auto solo = b.add_link(std::nullopt);
        b.attach_port(solo, nodes[3], 0);

        CHECK_FALSE(iso_equal(a, b));
    }
}

TEST_CASE("products are associative up to iso") {
    std::mt19937 rng(13);
    for (int i = 0; i < 25; ++i) {
        auto a = random_bigraph(1, 0, rng);
        auto b = random_bigraph(1, 0, rng);
        auto c = random_bigraph(1, 0, rng);
        CHECK(iso_equal(ppar(ppar(a, b), c), ppar(a, ppar(b, c))));
        CHECK(iso_equal(merge_prod(merge_prod(a, b), c), merge_prod(a, merge_prod(b, c))));
    }
}

TEST_CASE("nesting is associative up to iso") {
    std::mt19937 rng(17);
    for (int i = 0; i < 25; ++i) {
        std::uniform_int_distribution<std::uint32_t> k(1, 2);
        std::uint32_t s1 = k(rng);
        std::uint32_t s2 = k(rng);
        auto a = random_bigraph(1, s1, rng);
        auto b = random_bigraph(s1, s2, rng);
        auto c = random_bigraph(s2, 0, rng);
        CHECK(iso_equal(nest(a, nest(b, c)), nest(nest(a, b), c)));
    }
}

TEST_CASE("operations preserve structural invariants") {
    std::mt19937 rng(23);
    for (int i = 0; i < 40; ++i) {
        auto a = random_bigraph(1, 0, rng);
        auto b = random_bigraph(1, 0, rng);
        auto p = ppar(a, b);
        p.validate();
        auto m = merge_prod(a, b);
        m.validate();
        for (const auto& name : m.outer_names()) {
            auto c = close(name, m);
            c.validate();
        }
    }
}

TEST_CASE("close after ppar commutes with closing a shared name") {
    auto left = nest(ion(kDevice, {"x"}), one());
    auto right = nest(ion(kDevice, {"x"}), one());
    auto a = close("x", ppar(left, right));
    auto b = nest(grouping({{0, 1}}), close("x", ppar(left, right)));
    // collapsing regions after closing equals closing after merging
    auto c = close("x", merge_prod(left, right));
    CHECK(iso_equal(nest(grouping({{0, 1}}), a), c));
    CHECK(iso_equal(b, c));
}
