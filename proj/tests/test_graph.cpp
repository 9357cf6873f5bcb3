#include <doctest.h>

#include <vermakit/graph.hpp>
#include <vermakit/graph_io.hpp>

#include "golden.hpp"

using namespace vermakit;

namespace {

VarSet vs(std::initializer_list<const char*> names) {
    VarSet s;
    for (const char* n : names) s.insert(NodeId{n});
    return s;
}

std::vector<NodeId> seq(std::initializer_list<const char*> names) {
    std::vector<NodeId> v;
    for (const char* n : names) v.push_back(NodeId{n});
    return v;
}

}  // namespace

TEST_CASE("latent dag construction enforces the basic shape") {
    CHECK_THROWS_AS(LatentDag::make(vs({"A"}), vs({"A"}), {}), std::invalid_argument);
    CHECK_THROWS_AS(LatentDag::make(vs({"A"}), {}, {{NodeId{"A"}, NodeId{"B"}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(LatentDag::make(vs({"A"}), {}, {{NodeId{"A"}, NodeId{"A"}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(LatentDag::make(vs({"A", "B"}), {},
                                    {{NodeId{"A"}, NodeId{"B"}}, {NodeId{"B"}, NodeId{"A"}}}),
                    std::invalid_argument);
}

TEST_CASE("prune removes hidden non-ancestors only") {
    LatentDag g = golden::verma_chain();
    CHECK(prune_hidden_nonancestors(g) == g);

    // hidden leaf below D
    LatentDag g2 = LatentDag::make(g.observed(), g.hidden() | vs({"U2"}),
                                   [&] {
                                       std::vector<Edge> e(g.edges().begin(), g.edges().end());
                                       e.push_back({NodeId{"D"}, NodeId{"U2"}});
                                       return e;
                                   }());
    CHECK(prune_hidden_nonancestors(g2) == g);

    // hidden chain with no observed descendants goes away transitively
    LatentDag g3 = LatentDag::make(g.observed(), g.hidden() | vs({"U2", "U3"}),
                                   [&] {
                                       std::vector<Edge> e(g.edges().begin(), g.edges().end());
                                       e.push_back({NodeId{"U2"}, NodeId{"U3"}});
                                       return e;
                                   }());
    CHECK(prune_hidden_nonancestors(g3) == g);
}

TEST_CASE("topological order is the lexicographically least admissible one") {
    CHECK(topological_order(golden::midpath_hidden(), golden::midpath_hidden().observed()) ==
          seq({"V1", "V2", "V3", "V4"}));
    CHECK(topological_order(golden::five_node(), golden::five_node().observed()) ==
          seq({"V1", "V2", "V3", "V4", "V5"}));
    LatentDag two = LatentDag::make(vs({"A", "B"}), {}, {});
    CHECK(topological_order(two, two.observed()) == seq({"A", "B"}));

    SUBCASE("effective-parent edges constrain the order even without observed edges") {
        // V1 -> U3 -> V2 forces V1 before V2
        std::vector<std::vector<NodeId>> orders = all_topological_orders(golden::midpath_hidden(), 100);
        CHECK(orders.size() == 1);
        CHECK(orders[0] == seq({"V1", "V2", "V3", "V4"}));
    }
}

TEST_CASE("ancestral and descendant closures work in the induced subgraph") {
    LatentDag g = golden::verma_chain();
    CHECK(ancestral_closure(g, vs({"D"}), g.observed()) == vs({"A", "B", "C", "D"}));
    // inside G({B,D}) the only link is the hidden fork, so D has no observed
    // ancestors besides itself
    CHECK(ancestral_closure(g, vs({"D"}), vs({"B", "D"})) == vs({"D"}));
    CHECK(ancestral_closure(g, vs({"B", "D"}), vs({"B", "D"})) == vs({"B", "D"}));

    CHECK(descendant_closure(g, {}, g.observed()) == VarSet{});
    CHECK(descendant_closure(g, vs({"B"}), vs({"B", "D"})) == vs({"B"}));

    LatentDag f4 = golden::five_node();
    VarSet s = vs({"V1", "V3", "V5"});
    CHECK(descendant_closure(f4, vs({"V1"}), s) == vs({"V1"}));
    CHECK(descendant_closure(f4, vs({"V3"}), s) == vs({"V3"}));
    CHECK(descendant_closure(f4, vs({"V1", "V3"}), s) == vs({"V1", "V3"}));
}

TEST_CASE("effective parents follow hidden-interior directed paths") {
    CHECK(effective_parents(golden::midpath_hidden(), vs({"V2"})) == vs({"V1", "V2"}));
    CHECK(effective_parents(golden::verma_chain(), vs({"B", "D"})) == vs({"A", "B", "C", "D"}));
    CHECK(effective_parents(golden::verma_chain(), {}) == VarSet{});
}

TEST_CASE("hidden ancestors are taken in the scope-plus-hidden subgraph") {
    LatentDag g = golden::verma_chain();
    CHECK(hidden_ancestors(g, vs({"B", "D"})) == vs({"U"}));
    CHECK(hidden_ancestors(g, vs({"A"})) == VarSet{});
    CHECK(hidden_ancestors(golden::midpath_hidden(), vs({"V2"})) == vs({"U2", "U3"}));
}

TEST_CASE("c-components partition the observed set") {
    std::vector<VarSet> f1 = c_components(golden::verma_chain(), golden::verma_chain().observed());
    REQUIRE(f1.size() == 3);
    CHECK(f1[0] == vs({"A"}));
    CHECK(f1[1] == vs({"C"}));
    CHECK(f1[2] == vs({"B", "D"}));

    std::vector<VarSet> f2 = c_components(golden::midpath_hidden(), golden::midpath_hidden().observed());
    REQUIRE(f2.size() == 2);
    CHECK(f2[0] == vs({"V1", "V3"}));
    CHECK(f2[1] == vs({"V2", "V4"}));

    std::vector<VarSet> f3 = c_components(golden::quotient_chain(), golden::quotient_chain().observed());
    REQUIRE(f3.size() == 2);
    CHECK(f3[0] == vs({"V2"}));
    CHECK(f3[1] == vs({"V1", "V3", "V4"}));

    std::vector<VarSet> f4 = c_components(golden::five_node(), golden::five_node().observed());
    REQUIRE(f4.size() == 2);
    CHECK(f4[0] == vs({"V2", "V4"}));
    CHECK(f4[1] == vs({"V1", "V3", "V5"}));

    std::vector<VarSet> ch = c_components(golden::chain(), golden::chain().observed());
    CHECK(ch.size() == 3);

    SUBCASE("subsets are grouped in their own subgraph") {
        CHECK(c_components(golden::five_node(), vs({"V3", "V5"})) ==
              std::vector<VarSet>{vs({"V3"}), vs({"V5"})});
        CHECK(c_components(golden::five_node(), vs({"V1", "V5"})) ==
              std::vector<VarSet>{vs({"V1", "V5"})});
        CHECK(c_components(golden::quotient_chain(), vs({"V3", "V4"})) ==
              std::vector<VarSet>{vs({"V3"}), vs({"V4"})});
    }

    SUBCASE("declaration order does not matter") {
        const char* permuted = R"(observed D C B A
hidden U
edge U -> D
edge U -> B
edge C -> D
edge B -> C
edge A -> B
)";
        LatentDag g = golden::parse_latent(permuted);
        CHECK(c_components(g, g.observed()) == f1);
    }
}

TEST_CASE("projection keeps directed structure and adds bidirected confounding") {
    Admg p1 = project(golden::verma_chain());
    CHECK(p1.directed() == std::set<Edge>{{NodeId{"A"}, NodeId{"B"}},
                                          {NodeId{"B"}, NodeId{"C"}},
                                          {NodeId{"C"}, NodeId{"D"}}});
    CHECK(p1.bidirected() == std::set<Edge>{{NodeId{"B"}, NodeId{"D"}}});

    Admg p2 = project(golden::midpath_hidden());
    CHECK(p2.directed() == std::set<Edge>{{NodeId{"V1"}, NodeId{"V2"}},
                                          {NodeId{"V2"}, NodeId{"V3"}},
                                          {NodeId{"V3"}, NodeId{"V4"}}});
    CHECK(p2.bidirected() == std::set<Edge>{{NodeId{"V1"}, NodeId{"V3"}},
                                            {NodeId{"V2"}, NodeId{"V4"}}});

    Admg pc = project(golden::chain());
    CHECK(pc.bidirected().empty());
    CHECK(pc.directed().size() == 2);

    SUBCASE("admg c-components agree with the source graph") {
        CHECK(admg_c_components(p1, p1.observed()) ==
              c_components(golden::verma_chain(), golden::verma_chain().observed()));
        CHECK(admg_c_components(project(golden::five_node()), vs({"V3", "V5"})) ==
              std::vector<VarSet>{vs({"V3"}), vs({"V5"})});
        Admg no_bi = Admg::make(vs({"A", "B"}), {{NodeId{"A"}, NodeId{"B"}}}, {});
        CHECK(admg_c_components(no_bi, no_bi.observed()) ==
              std::vector<VarSet>{vs({"A"}), vs({"B"})});
    }
}

TEST_CASE("d-separation") {
    LatentDag g = golden::verma_chain();
    CHECK(d_separated(g, NodeId{"A"}, NodeId{"C"}, vs({"B"})));
    CHECK_FALSE(d_separated(g, NodeId{"A"}, NodeId{"D"}, vs({"B", "C"})));
    CHECK_FALSE(d_separated(g, NodeId{"A"}, NodeId{"D"}, vs({"B"})));

    LatentDag iso = LatentDag::make(vs({"X", "Y"}), {}, {});
    CHECK(d_separated(iso, NodeId{"X"}, NodeId{"Y"}, {}));

    CHECK_THROWS_AS(d_separated(g, NodeId{"A"}, NodeId{"A"}, {}), std::invalid_argument);
}

TEST_CASE("admg expansion preserves separation") {
    Admg p = project(golden::verma_chain());
    CHECK(d_separated(p, NodeId{"A"}, NodeId{"C"}, vs({"B"})));
    CHECK_FALSE(d_separated(p, NodeId{"A"}, NodeId{"D"}, vs({"B", "C"})));
}
