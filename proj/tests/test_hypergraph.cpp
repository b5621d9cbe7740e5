#include <doctest.h>

#include "hyplap/hypergraph.hpp"
#include "test_support.hpp"

using namespace hyplap;

TEST_CASE("parse: figure-1 hypergraph") {
  const auto h = Hypergraph::parse(R"({
    "vertices": ["v0","v1","v2","v3","v4","v5"],
    "edges": {"e": ["v0","v1","v2","v3"], "e2": ["v2","v3","v4","v5"]}
  })");
  CHECK(h.vertex_count() == 6);
  CHECK(h.edge_count() == 2);
  CHECK(h.vertex_names() == std::vector<std::string>{"v0", "v1", "v2", "v3", "v4", "v5"});
}

TEST_CASE("parse: minimal single-edge instance") {
  const auto h = Hypergraph::parse(R"({"vertices":["a","b"],"edges":{"ab":["a","b"]}})");
  CHECK(h.vertex_count() == 2);
  CHECK(h.edge_count() == 1);
}

TEST_CASE("parse: singleton edge is rejected with the edge name") {
  CHECK_THROWS_WITH_AS(Hypergraph::parse(R"({"vertices":["a"],"edges":{"bad":["a"]}})"),
                       "edge 'bad' has fewer than 2 distinct vertices", InputError);
  // deduplication happens before the cardinality check
  CHECK_THROWS_AS(Hypergraph::parse(R"({"vertices":["a"],"edges":{"bad":["a","a"]}})"),
                  InputError);
}

TEST_CASE("parse: name errors") {
  CHECK_THROWS_AS(Hypergraph::parse(R"({"vertices":["a","a"],"edges":{}})"), InputError);
  CHECK_THROWS_AS(Hypergraph::parse(R"({"vertices":["a","b"],"edges":{"e":["a","c"]}})"),
                  InputError);
  CHECK_THROWS_AS(
      Hypergraph::parse(R"({"vertices":["a","b"],"edges":{"e":["a","b"],"e":["a","b"]}})"),
      InputError);
  CHECK_THROWS_AS(Hypergraph::parse("{"), InputError);
}

TEST_CASE("parse: edge vertex lists are deduplicated silently") {
  const auto h =
      Hypergraph::parse(R"({"vertices":["a","b","c"],"edges":{"e":["b","a","b","a"]}})");
  CHECK(h.edge_members().front() == std::vector<VertexId>{0, 1});
}

TEST_CASE("canonical serialization round-trips") {
  const auto h = testing::fig1();
  const auto again = Hypergraph::parse(h.to_json());
  CHECK(again.to_json() == h.to_json());
  // scrambled input normalizes to the same canonical form
  const auto scrambled = Hypergraph::parse(
      R"({"edges":{"e2":["v5","v4","v3","v2"],"e":["v3","v2","v1","v0"]},
          "vertices":["v5","v4","v3","v2","v1","v0"]})");
  CHECK(scrambled.to_json() == h.to_json());
}

TEST_CASE("extended structure map") {
  const auto h = testing::fig1();
  const auto fe = h.extended_structure("e");
  CHECK(h.support_key(fe) == "v0|v1|v2|v3");
  const auto fv = h.extended_structure("v4");
  CHECK(h.support_key(fv) == "v4");
  CHECK_THROWS_AS(h.extended_structure("nope"), InputError);
}

TEST_CASE("support poset: figure-1 node count matches the enumeration oracle") {
  const auto h = testing::fig1();
  const auto poset = support_poset(h);
  const auto oracle = testing::oracle_poset_nodes(h.vertex_names(), testing::edge_sets(h));
  CHECK(poset.node_count() == static_cast<int>(oracle.size()));
  CHECK(poset.node_count() == 27);  // 15 + 15 - 3 shared subsets of {v2,v3}
}

TEST_CASE("support poset: single edge") {
  const auto h = testing::single_edge();
  const auto poset = support_poset(h);
  REQUIRE(poset.node_count() == 3);
  CHECK(h.support_key(poset.nodes[0]) == "a");
  CHECK(h.support_key(poset.nodes[1]) == "b");
  CHECK(h.support_key(poset.nodes[2]) == "a|b");
  REQUIRE(poset.covers.size() == 2);
  CHECK(poset.covers[0] == std::pair{0, 2});
  CHECK(poset.covers[1] == std::pair{1, 2});
}

TEST_CASE("support poset: isolated vertex is a node with no cover above it") {
  const auto h = Hypergraph::make({"a", "b", "c"}, {{"ab", {"a", "b"}}});
  const auto poset = support_poset(h);
  CHECK(poset.node_count() == 4);  // {a},{b},{c},{a,b}
  const int c_node = poset.node_id(std::vector<VertexId>{h.vertex_id("c")});
  REQUIRE(c_node >= 0);
  CHECK(poset.covers_above[c_node].empty());
  const auto oracle = testing::oracle_poset_nodes(h.vertex_names(), testing::edge_sets(h));
  CHECK(poset.node_count() == static_cast<int>(oracle.size()));
}

TEST_CASE("support poset properties on random instances") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto h = testing::random_hypergraph(seed);
    const auto poset = support_poset(h);

    // node set matches the oracle
    const auto oracle = testing::oracle_poset_nodes(h.vertex_names(), testing::edge_sets(h));
    REQUIRE(poset.node_count() == static_cast<int>(oracle.size()));

    // deterministic order: by cardinality then lexicographic
    for (int i = 1; i < poset.node_count(); ++i) {
      const auto& a = poset.nodes[i - 1].members;
      const auto& b = poset.nodes[i].members;
      CHECK((a.size() < b.size() || (a.size() == b.size() && a < b)));
    }

    // every node of size >= 2 lies in some edge
    for (const auto& node : poset.nodes) {
      if (node.size() >= 2) CHECK(h.is_valid_support(node.members));
    }

    // downward closure: removing any member of a node yields a node
    for (const auto& node : poset.nodes) {
      if (node.size() < 2) continue;
      for (std::size_t d = 0; d < node.members.size(); ++d) {
        auto sub = node.members;
        sub.erase(sub.begin() + d);
        CHECK(poset.node_id(sub) >= 0);
      }
    }

    // reachability along covers coincides with subset inclusion
    const int n = poset.node_count();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) reach[i][i] = true;
    // nodes are sorted by size, so a single sweep in cover order settles it
    for (int j = 0; j < n; ++j)
      for (int c : poset.covers_below[j])
        for (int i = 0; i < n; ++i)
          if (reach[i][poset.covers[c].first]) reach[i][j] = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(reach[i][j] == poset.nodes[i].subset_of(poset.nodes[j]));
  }
}

TEST_CASE("support poset cap") {
  const auto h = Hypergraph::make({"a", "b", "c", "d"}, {{"e", {"a", "b", "c", "d"}}});
  CHECK_THROWS_AS(support_poset(h, 10), LimitError);
  CHECK(support_poset(h, 15).node_count() == 15);
}
