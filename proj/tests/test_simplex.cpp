#include <doctest.h>

#include <random>

#include "hyplap/simplex.hpp"
#include "test_support.hpp"

using namespace hyplap;

namespace {

Simplex tuple(const Hypergraph& h, std::initializer_list<const char*> names) {
  Simplex s;
  for (const char* n : names) s.entries.push_back(h.vertex_id(n));
  return s;
}

}  // namespace

TEST_CASE("enumerate: figure-1 counts against the brute-force oracle") {
  const auto h = testing::fig1();
  const auto edges = testing::edge_sets(h);
  const std::size_t expected[] = {6, 28, 120};
  for (int k = 0; k <= 2; ++k) {
    const auto simplices = enumerate_simplices(h, k);
    const auto oracle = testing::oracle_enumerate(h.vertex_names(), edges, k);
    REQUIRE(simplices.size() == oracle.size());
    CHECK(simplices.size() == expected[k]);
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      std::vector<std::string> names;
      for (VertexId v : simplices[i].entries) names.push_back(h.vertex_name(v));
      REQUIRE(names == oracle[i]);  // same tuples in the same lexicographic order
    }
  }
}

TEST_CASE("enumerate: count matches inclusion-exclusion over maximal supports") {
  for (std::uint64_t seed = 11; seed <= 18; ++seed) {
    const auto h = testing::random_hypergraph(seed);
    const auto edges = testing::edge_sets(h);
    for (int k = 0; k <= 3; ++k) {
      const auto n = enumerate_simplices(h, k).size();
      CHECK(n == testing::oracle_incl_excl_count(h.vertex_names(), edges, k));
      CHECK(n == count_simplices(h, k));
    }
  }
}

TEST_CASE("enumerate: counting falls back to pruned enumeration past 20 edges") {
  // path graph on 22 vertices: 21 pair edges
  std::vector<std::string> vertices;
  for (int i = 0; i < 22; ++i)
    vertices.push_back("w" + std::string(1, char('a' + i / 10)) + std::to_string(i % 10));
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  for (int i = 0; i + 1 < 22; ++i)
    edges.emplace_back("p" + std::to_string(i), std::vector<std::string>{vertices[i],
                                                                         vertices[i + 1]});
  const auto h = Hypergraph::make(vertices, edges);
  REQUIRE(h.edge_count() == 21);
  // 22 vertices + 21 edges * (4 pair-tuples) - 22 degenerate towers counted once
  CHECK(count_simplices(h, 0) == 22);
  CHECK(count_simplices(h, 1) == 22 + 21 * 2);  // (v,v) towers plus 2 per edge
  CHECK(count_simplices(h, 1) == enumerate_simplices(h, 1).size());
}

TEST_CASE("empty hypergraph") {
  const auto h = Hypergraph::parse(R"({"vertices":[],"edges":{}})");
  CHECK(h.vertex_count() == 0);
  CHECK(support_poset(h).node_count() == 0);
  CHECK(enumerate_simplices(h, 2).empty());
  CHECK(verify_cech(h, 1).pass());
}

TEST_CASE("enumerate: basis cap is an error, not a truncation") {
  const auto h = testing::fig1();
  CHECK_THROWS_WITH_AS(enumerate_simplices(h, 2, 100),
                       "degree-2 simplex count 120 exceeds the basis cap (100)", LimitError);
}

TEST_CASE("apply_map") {
  const auto h = testing::fig1();
  const auto s = tuple(h, {"v0", "v1", "v2"});
  CHECK(apply_map(s, FunctionMap{3, {2, 0}}) == tuple(h, {"v2", "v0"}));
  CHECK(apply_map(s, FunctionMap::identity(3)) == s);
  CHECK(apply_map(tuple(h, {"v4", "v5"}), FunctionMap{2, {0, 0, 1}}) ==
        tuple(h, {"v4", "v4", "v5"}));
  CHECK_THROWS_AS(apply_map(s, FunctionMap{2, {0}}), InputError);     // arity mismatch
  CHECK_THROWS_AS(apply_map(s, FunctionMap{3, {0, 3}}), InputError);  // value out of range
}

TEST_CASE("apply_map: contravariant functor law") {
  const auto h = testing::single_edge();
  std::mt19937_64 rng(99);
  for (int n = 0; n <= 3; ++n) {
    const auto simplices = enumerate_simplices(h, n);
    for (int trial = 0; trial < 20; ++trial) {
      const int m = static_cast<int>(rng() % 4);
      const int p = static_cast<int>(rng() % 4);
      FunctionMap mu{m + 1, {}}, nu{n + 1, {}};
      for (int i = 0; i <= p; ++i) mu.values.push_back(static_cast<int>(rng() % (m + 1)));
      for (int i = 0; i <= m; ++i) nu.values.push_back(static_cast<int>(rng() % (n + 1)));
      FunctionMap composite{n + 1, {}};
      for (int v : mu.values) composite.values.push_back(nu.values[v]);
      for (const auto& s : simplices)
        CHECK(apply_map(s, composite) == apply_map(apply_map(s, nu), mu));
    }
  }
}

TEST_CASE("face") {
  const auto h = testing::fig1();
  CHECK(face(tuple(h, {"v2", "v3"}), 0) == tuple(h, {"v3"}));
  CHECK(face(tuple(h, {"v0", "v1", "v2"}), 1) == tuple(h, {"v0", "v2"}));
  CHECK_THROWS_AS(face(tuple(h, {"v0", "v1"}), 2), InputError);
  CHECK_THROWS_AS(face(tuple(h, {"v0"}), 0), InputError);
}

TEST_CASE("join and the face/join bookkeeping identity") {
  const auto h = testing::fig1();
  CHECK(join(h, tuple(h, {"v2", "v3"}), tuple(h, {"v0"}), 0) == tuple(h, {"v0", "v2", "v3"}));
  CHECK(join(h, tuple(h, {"v2", "v3"}), tuple(h, {"v5"}), 2) == tuple(h, {"v2", "v3", "v5"}));
  CHECK_THROWS_AS(join(h, tuple(h, {"v0", "v1"}), tuple(h, {"v4"}), 0), InputError);

  // d_l(y join_l (v)) = y, exhaustively over small tuples
  for (int k = 0; k <= 2; ++k) {
    for (const auto& y : enumerate_simplices(h, k)) {
      const auto supp = y.support();
      for (VertexId v = 0; v < h.vertex_count(); ++v) {
        auto u = supp;
        u.insert(std::lower_bound(u.begin(), u.end(), v), v);
        u.erase(std::unique(u.begin(), u.end()), u.end());
        if (!h.is_valid_support(u)) continue;
        for (int l = 0; l <= y.dim() + 1; ++l)
          CHECK(face(join(h, y, Simplex{{v}}, l), l) == y);
      }
    }
  }
}

TEST_CASE("vertex projection agrees with the constant function map") {
  const auto h = testing::fig1();
  const auto s = tuple(h, {"v0", "v1", "v2"});
  for (int l = 0; l <= s.dim(); ++l) {
    CHECK(vertex_projection(s, l) == Simplex{{s.entries[l]}});
    CHECK(vertex_projection(s, l) == apply_map(s, FunctionMap::constant(3, l)));
  }
  CHECK_THROWS_AS(vertex_projection(s, 3), InputError);
}

TEST_CASE("edgeless hypergraph: only degenerate towers") {
  const auto h = Hypergraph::make({"x", "y"}, {});
  CHECK(h.edge_count() == 0);
  const auto poset = support_poset(h);
  CHECK(poset.node_count() == 2);
  CHECK(poset.covers.empty());
  for (int k = 0; k <= 3; ++k) {
    const auto simplices = enumerate_simplices(h, k);
    CHECK(simplices.size() == 2);  // (x,...,x) and (y,...,y)
    for (const auto& s : simplices) CHECK(s.support().size() == 1);
  }
  CHECK(verify_cech(h, 2).pass());
}

TEST_CASE("permute") {
  const auto h = testing::fig1();
  const auto [swapped, sign] = permute(tuple(h, {"v4", "v5"}), std::vector<int>{1, 0});
  CHECK(swapped == tuple(h, {"v5", "v4"}));
  CHECK(sign == -1);
  const auto [same, s1] = permute(tuple(h, {"v4", "v5"}), std::vector<int>{0, 1});
  CHECK(same == tuple(h, {"v4", "v5"}));
  CHECK(s1 == 1);
  const auto [cycled, s2] = permute(tuple(h, {"v0", "v1", "v2"}), std::vector<int>{1, 2, 0});
  CHECK(cycled == tuple(h, {"v1", "v2", "v0"}));
  CHECK(s2 == 1);  // even permutation
  CHECK_THROWS_AS(permute(tuple(h, {"v0", "v1"}), std::vector<int>{0, 0}), InputError);
}

TEST_CASE("preorder leq") {
  const auto h = testing::fig1();
  CHECK(leq(tuple(h, {"v2"}), tuple(h, {"v2", "v3"})));
  CHECK(leq(tuple(h, {"v4", "v5"}), tuple(h, {"v5", "v4"})));
  CHECK(leq(tuple(h, {"v5", "v4"}), tuple(h, {"v4", "v5"})));  // not a partial order
  CHECK_FALSE(leq(tuple(h, {"v0"}), tuple(h, {"v4", "v5"})));

  // reflexive and transitive on enumerated degrees <= 2
  std::vector<Simplex> all;
  for (int k = 0; k <= 2; ++k)
    for (const auto& s : enumerate_simplices(h, k)) all.push_back(s);
  for (const auto& a : all) CHECK(leq(a, a));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4000; ++trial) {
    const auto& a = all[rng() % all.size()];
    const auto& b = all[rng() % all.size()];
    const auto& c = all[rng() % all.size()];
    if (leq(a, b) && leq(b, c)) CHECK(leq(a, c));
  }
}

TEST_CASE("intersect_basic_opens") {
  const auto h = testing::fig1();
  const auto i0 = h.support_from_names(std::vector<std::string>{"v0"});
  const auto i2 = h.support_from_names(std::vector<std::string>{"v2"});
  const auto i4 = h.support_from_names(std::vector<std::string>{"v4"});
  const auto i23 = h.support_from_names(std::vector<std::string>{"v2", "v3"});
  auto r = intersect_basic_opens(h, i0, i2);
  REQUIRE(r.has_value());
  CHECK(h.support_key(*r) == "v0|v2");
  CHECK_FALSE(intersect_basic_opens(h, i0, i4).has_value());
  auto nested = intersect_basic_opens(h, i2, i23);
  REQUIRE(nested.has_value());
  CHECK(h.support_key(*nested) == "v2|v3");
}

TEST_CASE("verify_cech: figure-1 passes with the expected nerve counts") {
  const auto h = testing::fig1();
  const auto report = verify_cech(h, 2);
  CHECK(report.pass());
  REQUIRE(report.cech_counts.size() == 3);
  CHECK(report.cech_counts[1] == 28);
  CHECK(report.simplex_counts[1] == 28);
  CHECK(report.support_pairs_checked > 0);
}

TEST_CASE("verify_cech: single edge up to degree 3") {
  CHECK(verify_cech(testing::single_edge(), 3).pass());
}

TEST_CASE("verify_cech: corrupted enumeration fails with a witness") {
  const auto h = testing::fig1();
  int needed = 2;
  // depth needed for closedness pairs: unions of two supports of size <= 3
  for (const auto& a : support_poset(h).nodes)
    needed = std::max(needed, 2 * a.size() - 1);
  std::vector<std::vector<Simplex>> lists;
  for (int n = 0; n <= needed; ++n) lists.push_back(enumerate_simplices(h, n));

  SUBCASE("dropping a nondegenerate tuple breaks closedness or the bijection") {
    auto corrupted = lists;
    const Simplex victim{{h.vertex_id("v2"), h.vertex_id("v3")}};
    std::erase(corrupted[1], victim);
    const auto report = verify_cech_with(h, 2, corrupted);
    CHECK_FALSE(report.pass());
    bool witnessed = false;
    for (const auto& f : report.failures)
      witnessed = witnessed || f.find("(v2,v3)") != std::string::npos;
    CHECK(witnessed);
  }
  SUBCASE("dropping a degenerate tuple breaks the psi bijection") {
    auto corrupted = lists;
    const Simplex victim{{h.vertex_id("v2"), h.vertex_id("v2"), h.vertex_id("v3")}};
    std::erase(corrupted[2], victim);
    const auto report = verify_cech_with(h, 2, corrupted);
    CHECK_FALSE(report.cech_ok);
  }
  SUBCASE("uncorrupted lists pass") { CHECK(verify_cech_with(h, 2, lists).pass()); }
}

TEST_CASE("verify_cech on random instances") {
  for (std::uint64_t seed = 21; seed <= 26; ++seed)
    CHECK(verify_cech(testing::random_hypergraph(seed), 2).pass());
}
