#pragma once

// Shared fixtures and independent oracles for the test suite. The oracles work
// from raw name lists, not through the library's combinatorial paths.

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hyplap/complex.hpp"
#include "hyplap/laplacian.hpp"
#include "hyplap/sheaf.hpp"

namespace testing {

using hyplap::CellularSheaf;
using hyplap::Hypergraph;

inline Hypergraph fig1() {
  return Hypergraph::make({"v0", "v1", "v2", "v3", "v4", "v5"},
                          {{"e", {"v0", "v1", "v2", "v3"}}, {"e2", {"v2", "v3", "v4", "v5"}}});
}

inline Hypergraph single_edge() { return Hypergraph::make({"a", "b"}, {{"ab", {"a", "b"}}}); }

inline Hypergraph triangle() {
  return Hypergraph::make({"a", "b", "c"},
                          {{"ab", {"a", "b"}}, {"ac", {"a", "c"}}, {"bc", {"b", "c"}}});
}

// ---- brute-force oracles over raw name data ----

using NameSet = std::set<std::string>;

inline bool oracle_support_ok(const NameSet& s, const std::vector<NameSet>& edges) {
  if (s.size() == 1) return true;
  for (const auto& e : edges)
    if (std::includes(e.begin(), e.end(), s.begin(), s.end())) return true;
  return false;
}

/// every (k+1)-tuple over the vertex names whose set fits a hyperedge or is a
/// singleton, in lexicographic order
inline std::vector<std::vector<std::string>> oracle_enumerate(
    const std::vector<std::string>& vertices, const std::vector<NameSet>& edges, int k) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> sorted = vertices;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> idx(k + 1, 0);
  if (sorted.empty()) return out;
  while (true) {
    std::vector<std::string> tuple;
    NameSet supp;
    for (std::size_t i : idx) {
      tuple.push_back(sorted[i]);
      supp.insert(sorted[i]);
    }
    if (oracle_support_ok(supp, edges)) out.push_back(tuple);
    int pos = k;
    while (pos >= 0 && idx[pos] + 1 == sorted.size()) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  return out;
}

/// nonempty subsets of each edge plus all singletons, deduplicated
inline std::set<NameSet> oracle_poset_nodes(const std::vector<std::string>& vertices,
                                            const std::vector<NameSet>& edges) {
  std::set<NameSet> nodes;
  for (const auto& v : vertices) nodes.insert({v});
  for (const auto& e : edges) {
    std::vector<std::string> m(e.begin(), e.end());
    for (std::size_t mask = 1; mask < (std::size_t{1} << m.size()); ++mask) {
      NameSet s;
      for (std::size_t b = 0; b < m.size(); ++b)
        if (mask & (std::size_t{1} << b)) s.insert(m[b]);
      nodes.insert(s);
    }
  }
  return nodes;
}

/// inclusion-exclusion over the maximal supports: |K_k| as a signed sum of
/// |S|^(k+1) plus one degenerate tower per isolated vertex
inline std::uint64_t oracle_incl_excl_count(const std::vector<std::string>& vertices,
                                            const std::vector<NameSet>& edges, int k) {
  std::vector<NameSet> maximal;
  for (const auto& e : edges) {
    bool dominated = false;
    for (const auto& f : edges)
      if (e != f && std::includes(f.begin(), f.end(), e.begin(), e.end())) dominated = true;
    if (!dominated && std::find(maximal.begin(), maximal.end(), e) == maximal.end())
      maximal.push_back(e);
  }
  long double total = 0.0L;
  const std::size_t m = maximal.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    NameSet inter;
    bool first = true;
    for (std::size_t b = 0; b < m; ++b) {
      if (!(mask & (std::size_t{1} << b))) continue;
      if (first) {
        inter = maximal[b];
        first = false;
      } else {
        NameSet next;
        std::set_intersection(inter.begin(), inter.end(), maximal[b].begin(), maximal[b].end(),
                              std::inserter(next, next.begin()));
        inter = next;
      }
    }
    long double term = 1.0L;
    for (int e = 0; e <= k; ++e) term *= (long double)inter.size();
    total += (std::popcount(mask) % 2 == 1) ? term : -term;
  }
  for (const auto& v : vertices) {
    bool covered = false;
    for (const auto& e : edges) covered = covered || e.count(v);
    if (!covered) total += 1.0L;
  }
  return (std::uint64_t)(total + 0.5L);
}

/// straight-line ordered sheaf coboundary of an abstract simplicial complex:
/// rows the strictly increasing (k+2)-subsets present in the complex, entries
/// (-1)^l F(d_l tau < tau)
inline Eigen::MatrixXd asc_ordered_coboundary(const Hypergraph& h, const CellularSheaf& sheaf,
                                              int k) {
  std::set<std::vector<std::string>> faces;  // simplices of the complex, by size
  for (const auto& name : h.vertex_names()) faces.insert({name});
  for (const auto& edge : h.edge_members()) {
    std::vector<std::string> names;
    for (hyplap::VertexId v : edge) names.push_back(h.vertex_name(v));
    faces.insert(names);
  }
  auto layer = [&](std::size_t size) {
    std::vector<std::vector<std::string>> out;
    for (const auto& f : faces)
      if (f.size() == size) out.push_back(f);
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto rows = layer(k + 2);
  const auto cols = layer(k + 1);
  std::map<std::vector<std::string>, int> col_index;
  std::vector<int> col_offsets{0};
  for (std::size_t c = 0; c < cols.size(); ++c) {
    col_index[cols[c]] = static_cast<int>(c);
    const auto node = sheaf.poset().node_id_or_throw(h.support_from_names(cols[c]));
    col_offsets.push_back(col_offsets.back() + sheaf.stalk_dim(node));
  }
  std::vector<int> row_offsets{0};
  for (const auto& r : rows) {
    const auto node = sheaf.poset().node_id_or_throw(h.support_from_names(r));
    row_offsets.push_back(row_offsets.back() + sheaf.stalk_dim(node));
  }
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(row_offsets.back(), col_offsets.back());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t l = 0; l < rows[r].size(); ++l) {
      std::vector<std::string> f = rows[r];
      f.erase(f.begin() + l);
      const auto it = col_index.find(f);
      if (it == col_index.end()) continue;  // never happens for a complex
      const Eigen::MatrixXd block = sheaf.restriction(h.support_from_names(f),
                                                      h.support_from_names(rows[r]));
      const double sign = l % 2 == 0 ? 1.0 : -1.0;
      delta.block(row_offsets[r], col_offsets[it->second], block.rows(), block.cols()) +=
          sign * block;
    }
  }
  return delta;
}

// ---- deterministic random instances ----

inline Hypergraph random_hypergraph(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n_vertices = 2 + static_cast<int>(rng() % 5);  // 2..6
  std::vector<std::string> vertices;
  for (int i = 0; i < n_vertices; ++i) vertices.push_back("v" + std::to_string(i));
  const int n_edges = 1 + static_cast<int>(rng() % 4);  // 1..4
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  for (int e = 0; e < n_edges; ++e) {
    const int size = 2 + static_cast<int>(rng() % (n_vertices - 1));  // 2..n
    std::vector<std::string> pool = vertices;
    std::vector<std::string> members;
    for (int s = 0; s < size; ++s) {
      const std::size_t pick = rng() % pool.size();
      members.push_back(pool[pick]);
      pool.erase(pool.begin() + pick);
    }
    edges.emplace_back("e" + std::to_string(e), members);
  }
  return Hypergraph::make(vertices, edges);
}

/// downward-closed random complex: maximal faces of <= 3 vertices, every
/// subset of size >= 2 declared as its own hyperedge
inline Hypergraph random_asc(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n_vertices = 3 + static_cast<int>(rng() % 4);  // 3..6
  std::vector<std::string> vertices;
  for (int i = 0; i < n_vertices; ++i) vertices.push_back("v" + std::to_string(i));
  std::set<std::vector<std::string>> faces;
  const int n_max = 2 + static_cast<int>(rng() % 3);
  for (int f = 0; f < n_max; ++f) {
    const int size = 2 + static_cast<int>(rng() % 2);  // 2..3 (dim <= 2)
    std::vector<std::string> pool = vertices;
    std::vector<std::string> face;
    for (int s = 0; s < size; ++s) {
      const std::size_t pick = rng() % pool.size();
      face.push_back(pool[pick]);
      pool.erase(pool.begin() + pick);
    }
    std::sort(face.begin(), face.end());
    // close downward: all subsets of size >= 2
    for (std::size_t mask = 1; mask < (std::size_t{1} << face.size()); ++mask) {
      std::vector<std::string> sub;
      for (std::size_t b = 0; b < face.size(); ++b)
        if (mask & (std::size_t{1} << b)) sub.push_back(face[b]);
      if (sub.size() >= 2) faces.insert(sub);
    }
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  int counter = 0;
  for (const auto& f : faces) edges.emplace_back("f" + std::to_string(counter++), f);
  return Hypergraph::make(vertices, edges);
}

inline std::vector<NameSet> edge_sets(const Hypergraph& h) {
  std::vector<NameSet> out;
  for (const auto& edge : h.edge_members()) {
    NameSet s;
    for (hyplap::VertexId v : edge) s.insert(h.vertex_name(v));
    out.push_back(s);
  }
  return out;
}

/// a deterministic valid pair support inside the first edge
inline hyplap::Support skyscraper_base(const Hypergraph& h) {
  const auto& edge = h.edge_members().front();
  return h.make_support(std::vector<hyplap::VertexId>{edge[0], edge[1]});
}

struct NamedSheaf {
  std::string name;
  CellularSheaf sheaf;
};

inline std::vector<NamedSheaf> standard_sheaves(const Hypergraph& h, std::uint64_t seed) {
  std::vector<NamedSheaf> out;
  out.push_back({"constant d=1", hyplap::constant_sheaf(h, 1)});
  out.push_back({"constant d=2", hyplap::constant_sheaf(h, 2)});
  out.push_back({"twisted d=2", hyplap::twisted_sheaf(h, 2, seed)});
  out.push_back({"skyscraper", hyplap::skyscraper_sheaf(h, skyscraper_base(h), 1)});
  return out;
}

inline double max_abs_diff(const Eigen::SparseMatrix<double>& a,
                           const Eigen::SparseMatrix<double>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1e300;
  Eigen::SparseMatrix<double> d = a - b;
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace testing
