#include "hyplap/simplex.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>

namespace hyplap {

namespace {

// signed inclusion-exclusion accumulator over subsets of edges
struct InclExcl {
  std::int64_t degree_exp;
  long double total = 0.0L;

  void visit(const std::vector<std::vector<VertexId>>& edges, std::size_t i,
             std::vector<VertexId> inter, int parity) {
    if (i == edges.size()) {
      if (parity == 0) return;  // skip the empty selection
      long double term = 1.0L;
      for (std::int64_t e = 0; e < degree_exp; ++e) term *= (long double)inter.size();
      total += (parity % 2 == 1 ? term : -term);
      return;
    }
    // exclude edges[i]
    visit(edges, i + 1, inter, parity);
    // include edges[i]
    std::vector<VertexId> next;
    if (parity == 0) {
      next = edges[i];
    } else {
      std::set_intersection(inter.begin(), inter.end(), edges[i].begin(), edges[i].end(),
                            std::back_inserter(next));
      if (next.empty()) return;  // all further inclusions stay empty
    }
    visit(edges, i + 1, std::move(next), parity + 1);
  }
};

std::uint64_t isolated_vertex_count(const Hypergraph& h) {
  std::vector<bool> covered(h.vertex_count(), false);
  for (const auto& e : h.edge_members())
    for (VertexId v : e) covered[v] = true;
  std::uint64_t n = 0;
  for (bool c : covered)
    if (!c) ++n;
  return n;
}

}  // namespace

std::vector<VertexId> Simplex::support() const {
  std::vector<VertexId> s = entries;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::string tuple_to_string(const Hypergraph& h, const Simplex& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    if (i) out += ",";
    out += h.vertex_name(s.entries[i]);
  }
  return out + ")";
}

void FunctionMap::validate() const {
  if (target_arity <= 0) throw InputError("function map target arity must be positive");
  if (values.empty()) throw InputError("function map source arity must be positive");
  for (int v : values)
    if (v < 0 || v >= target_arity)
      throw InputError("function map value " + std::to_string(v) + " outside [0, " +
                       std::to_string(target_arity - 1) + "]");
}

FunctionMap FunctionMap::identity(int arity) {
  FunctionMap mu{arity, std::vector<int>(arity)};
  for (int i = 0; i < arity; ++i) mu.values[i] = i;
  return mu;
}

FunctionMap FunctionMap::coface(int target_arity, int l) {
  if (l < 0 || l >= target_arity) throw InputError("coface index out of range");
  FunctionMap mu{target_arity, {}};
  for (int k = 0; k < target_arity - 1; ++k) mu.values.push_back(k < l ? k : k + 1);
  return mu;
}

FunctionMap FunctionMap::constant(int target_arity, int l) {
  if (l < 0 || l >= target_arity) throw InputError("constant map index out of range");
  return FunctionMap{target_arity, {l}};
}

Simplex apply_map(const Simplex& s, const FunctionMap& mu) {
  mu.validate();
  if (mu.target_arity != static_cast<int>(s.entries.size()))
    throw InputError("function map target arity " + std::to_string(mu.target_arity) +
                     " does not match simplex arity " + std::to_string(s.entries.size()));
  Simplex out;
  out.entries.reserve(mu.values.size());
  for (int v : mu.values) out.entries.push_back(s.entries[v]);
  return out;
}

Simplex face(const Simplex& s, int l) {
  if (s.dim() < 1) throw InputError("face map undefined on 0-simplices");
  if (l < 0 || l > s.dim()) throw InputError("face index out of range");
  Simplex out = s;
  out.entries.erase(out.entries.begin() + l);
  return out;
}

Simplex vertex_projection(const Simplex& s, int l) {
  if (l < 0 || l > s.dim()) throw InputError("vertex projection index out of range");
  return Simplex{{s.entries[l]}};
}

Simplex join(const Hypergraph& h, const Simplex& s, const Simplex& t, int l) {
  if (l < 0 || l > s.dim() + 1) throw InputError("join position out of range");
  std::vector<VertexId> u = s.support();
  for (VertexId v : t.support()) u.push_back(v);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  if (!h.is_valid_support(u)) {
    Support bad{u};
    throw InputError("join support '" + h.support_key(bad) +
                     "' is contained in no hyperedge");
  }
  Simplex out;
  out.entries.reserve(s.entries.size() + t.entries.size());
  out.entries.insert(out.entries.end(), s.entries.begin(), s.entries.begin() + l);
  out.entries.insert(out.entries.end(), t.entries.begin(), t.entries.end());
  out.entries.insert(out.entries.end(), s.entries.begin() + l, s.entries.end());
  return out;
}

int permutation_sign(std::span<const int> g) {
  int inversions = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g[i] > g[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

std::pair<Simplex, int> permute(const Simplex& s, std::span<const int> g) {
  const int arity = static_cast<int>(s.entries.size());
  if (static_cast<int>(g.size()) != arity)
    throw InputError("permutation arity does not match simplex arity");
  std::vector<bool> seen(arity, false);
  for (int v : g) {
    if (v < 0 || v >= arity || seen[v]) throw InputError("not a permutation of the simplex indices");
    seen[v] = true;
  }
  Simplex out;
  out.entries.reserve(arity);
  for (int v : g) out.entries.push_back(s.entries[v]);
  return {out, permutation_sign(g)};
}

bool leq(const Simplex& a, const Simplex& b) {
  auto sa = a.support(), sb = b.support();
  return std::includes(sb.begin(), sb.end(), sa.begin(), sa.end());
}

std::optional<Support> intersect_basic_opens(const Hypergraph& h, const Support& i,
                                             const Support& j) {
  std::vector<VertexId> u;
  std::set_union(i.members.begin(), i.members.end(), j.members.begin(), j.members.end(),
                 std::back_inserter(u));
  if (!h.is_valid_support(u)) return std::nullopt;
  return Support{std::move(u)};
}

std::uint64_t count_simplices(const Hypergraph& h, int degree, std::size_t cap) {
  if (degree < 0) throw InputError("degree must be nonnegative");
  std::uint64_t count = 0;
  if (h.edge_count() <= 20) {
    InclExcl acc{degree + 1};
    acc.visit(h.edge_members(), 0, {}, 0);
    long double total = acc.total + (long double)isolated_vertex_count(h);
    count = total >= (long double)std::numeric_limits<std::uint64_t>::max()
                ? std::numeric_limits<std::uint64_t>::max()
                : (std::uint64_t)(total + 0.5L);
    if (count > cap)
      throw LimitError("degree-" + std::to_string(degree) + " simplex count " +
                       std::to_string(count) + " exceeds the basis cap (" +
                       std::to_string(cap) + ")");
  } else {
    // too many edges for inclusion-exclusion: count by pruned enumeration,
    // aborting past the cap
    count = enumerate_simplices(h, degree, cap).size();
  }
  return count;
}

namespace {

void enumerate_rec(const Hypergraph& h, int remaining, std::size_t cap, int degree,
                   std::vector<VertexId>& prefix, std::vector<VertexId>& supp,
                   std::vector<Simplex>& out) {
  if (remaining == 0) {
    if (out.size() >= cap)
      throw LimitError("degree-" + std::to_string(degree) + " simplex count exceeds the basis cap (" +
                       std::to_string(cap) + "); enumeration aborted past the cap");
    out.push_back(Simplex{prefix});
    return;
  }
  for (VertexId v = 0; v < h.vertex_count(); ++v) {
    auto pos = std::lower_bound(supp.begin(), supp.end(), v);
    const bool inserted = (pos == supp.end() || *pos != v);
    if (inserted) {
      pos = supp.insert(pos, v);
      if (!h.is_valid_support(supp)) {
        supp.erase(pos);
        continue;
      }
    }
    prefix.push_back(v);
    enumerate_rec(h, remaining - 1, cap, degree, prefix, supp, out);
    prefix.pop_back();
    if (inserted) supp.erase(std::lower_bound(supp.begin(), supp.end(), v));
  }
}

}  // namespace

std::vector<Simplex> enumerate_simplices(const Hypergraph& h, int degree, std::size_t cap) {
  if (degree < 0) throw InputError("degree must be nonnegative");
  if (h.edge_count() <= 20) count_simplices(h, degree, cap);  // cap check with exact count
  std::vector<Simplex> out;
  std::vector<VertexId> prefix, supp;
  enumerate_rec(h, degree + 1, cap, degree, prefix, supp, out);
  return out;
}

namespace {

bool support_subset(const std::vector<VertexId>& sub, const std::vector<VertexId>& sup) {
  return std::includes(sup.begin(), sup.end(), sub.begin(), sub.end());
}

// realized supports of the materialized simplex lists, with a bitmask fast
// path when the vertex universe fits in 64 bits
struct RealizedSupports {
  std::vector<std::vector<VertexId>> supports;
  std::vector<std::uint64_t> masks;
  bool use_masks = false;

  static RealizedSupports build(int n_vertices,
                                const std::vector<std::vector<Simplex>>& per_degree,
                                int up_to) {
    std::set<std::vector<VertexId>> acc;
    for (int n = 0; n <= up_to && n < static_cast<int>(per_degree.size()); ++n)
      for (const auto& s : per_degree[n]) acc.insert(s.support());
    RealizedSupports out;
    out.supports.assign(acc.begin(), acc.end());
    out.use_masks = n_vertices <= 64;
    if (out.use_masks)
      for (const auto& s : out.supports) {
        std::uint64_t m = 0;
        for (VertexId v : s) m |= std::uint64_t{1} << v;
        out.masks.push_back(m);
      }
    return out;
  }

  bool any_superset(const std::vector<VertexId>& t) const {
    if (use_masks) {
      std::uint64_t m = 0;
      for (VertexId v : t) m |= std::uint64_t{1} << v;
      for (std::uint64_t s : masks)
        if ((m & s) == m) return true;
      return false;
    }
    for (const auto& s : supports)
      if (support_subset(t, s)) return true;
    return false;
  }
};

// lexicographic enumeration of the Cech nerve in degree n: all vertex tuples
// whose basic opens have nonempty intersection, decided against the realized
// supports of the materialized simplex lists
void cech_rec(const Hypergraph& h, const RealizedSupports& realized, int remaining,
              std::vector<VertexId>& prefix, std::vector<VertexId>& supp,
              std::vector<Simplex>& out) {
  if (remaining == 0) {
    out.push_back(Simplex{prefix});
    return;
  }
  for (VertexId v = 0; v < h.vertex_count(); ++v) {
    auto pos = std::lower_bound(supp.begin(), supp.end(), v);
    const bool inserted = (pos == supp.end() || *pos != v);
    if (inserted) {
      pos = supp.insert(pos, v);
      if (!realized.any_superset(supp)) {
        supp.erase(pos);
        continue;
      }
    }
    prefix.push_back(v);
    cech_rec(h, realized, remaining - 1, prefix, supp, out);
    prefix.pop_back();
    if (inserted) supp.erase(std::lower_bound(supp.begin(), supp.end(), v));
  }
}

}  // namespace

CechReport verify_cech_with(const Hypergraph& h, int max_dim,
                            const std::vector<std::vector<Simplex>>& per_degree,
                            std::size_t cap) {
  if (max_dim < 0) throw InputError("max_dim must be nonnegative");
  CechReport report;
  report.max_dim = max_dim;

  const SupportPoset poset = support_poset(h, cap);
  std::vector<const Support*> small_supports;
  for (const auto& node : poset.nodes)
    if (node.size() <= max_dim + 1) small_supports.push_back(&node);

  int needed_depth = max_dim;
  for (std::size_t a = 0; a < small_supports.size(); ++a)
    for (std::size_t b = a + 1; b < small_supports.size(); ++b) {
      std::vector<VertexId> u;
      std::set_union(small_supports[a]->members.begin(), small_supports[a]->members.end(),
                     small_supports[b]->members.begin(), small_supports[b]->members.end(),
                     std::back_inserter(u));
      needed_depth = std::max(needed_depth, static_cast<int>(u.size()) - 1);
    }
  if (static_cast<int>(per_degree.size()) <= needed_depth)
    throw InputError("verify_cech needs simplex lists up to degree " +
                     std::to_string(needed_depth));

  // (a) closedness: for each pair of basic opens, the intersection is empty
  // or equals the basic open of the union support, witnessed by a realizing
  // simplex in the materialized lists
  report.closed_ok = true;
  const auto realized_all =
      RealizedSupports::build(h.vertex_count(), per_degree, needed_depth);
  for (std::size_t a = 0; a < small_supports.size(); ++a) {
    for (std::size_t b = a + 1; b < small_supports.size(); ++b) {
      ++report.support_pairs_checked;
      std::vector<VertexId> u;
      std::set_union(small_supports[a]->members.begin(), small_supports[a]->members.end(),
                     small_supports[b]->members.begin(), small_supports[b]->members.end(),
                     std::back_inserter(u));
      const bool nonempty = realized_all.any_superset(u);
      if (!nonempty) continue;  // empty intersection is fine
      const Simplex realizer{u};
      const auto& layer = per_degree[u.size() - 1];
      if (!std::binary_search(layer.begin(), layer.end(), realizer)) {
        report.closed_ok = false;
        report.failures.push_back(
            "W_" + h.support_key(*small_supports[a]) + " ∩ W_" +
            h.support_key(*small_supports[b]) +
            " is nonempty but no simplex realizes the union support; missing tuple " +
            tuple_to_string(h, realizer));
      }
    }
  }

  // (b) Cech: psi_n is a bijection onto the independently enumerated nerve
  report.cech_ok = true;
  for (int n = 0; n <= max_dim; ++n) {
    const auto realized = RealizedSupports::build(h.vertex_count(), per_degree, n);
    std::vector<Simplex> nerve;
    std::vector<VertexId> prefix, supp;
    cech_rec(h, realized, n + 1, prefix, supp, nerve);
    report.simplex_counts.push_back(per_degree[n].size());
    report.cech_counts.push_back(nerve.size());
    if (nerve != per_degree[n]) {
      report.cech_ok = false;
      // first tuple where the lists disagree
      std::size_t i = 0;
      while (i < nerve.size() && i < per_degree[n].size() && nerve[i] == per_degree[n][i]) ++i;
      const Simplex& witness =
          i < nerve.size() ? nerve[i] : per_degree[n][std::min(i, per_degree[n].size() - 1)];
      report.failures.push_back("psi_" + std::to_string(n) +
                                " is not a bijection onto the Cech nerve; witness tuple " +
                                tuple_to_string(h, witness));
    }
  }

  // psi naturality on a seeded sample of function maps
  report.natural_ok = true;
  std::mt19937_64 rng(0xCEC0 + static_cast<std::uint64_t>(max_dim));
  for (int n = 0; n <= max_dim && report.natural_ok; ++n) {
    for (int m = 0; m <= max_dim && report.natural_ok; ++m) {
      for (int trial = 0; trial < 4 && report.natural_ok; ++trial) {
        FunctionMap mu{n + 1, {}};
        for (int i = 0; i <= m; ++i)
          mu.values.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1)));
        for (const auto& y : per_degree[n]) {
          // psi_m(K(mu)(y)) is the entry tuple of apply_map(y, mu);
          // C(K(H))(mu)(psi_n(y)) reindexes the entry tuple of y by mu
          const Simplex lhs = apply_map(y, mu);
          Simplex rhs;
          for (int v : mu.values) rhs.entries.push_back(y.entries[v]);
          if (lhs != rhs) {
            report.natural_ok = false;
            report.failures.push_back("psi naturality fails at tuple " + tuple_to_string(h, y));
            break;
          }
        }
      }
    }
  }
  return report;
}

CechReport verify_cech(const Hypergraph& h, int max_dim, std::size_t cap) {
  if (max_dim < 0) throw InputError("max_dim must be nonnegative");
  const SupportPoset poset = support_poset(h, cap);
  int needed_depth = max_dim;
  for (const auto& a : poset.nodes) {
    if (a.size() > max_dim + 1) continue;
    for (const auto& b : poset.nodes) {
      if (b.size() > max_dim + 1) continue;
      std::vector<VertexId> u;
      std::set_union(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                     std::back_inserter(u));
      needed_depth = std::max(needed_depth, static_cast<int>(u.size()) - 1);
    }
  }
  std::vector<std::vector<Simplex>> per_degree;
  for (int n = 0; n <= needed_depth; ++n) per_degree.push_back(enumerate_simplices(h, n, cap));
  return verify_cech_with(h, max_dim, per_degree, cap);
}

}  // namespace hyplap
