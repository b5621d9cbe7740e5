#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyplap/hypergraph.hpp"

namespace hyplap {

/// A canonical n-simplex of K(H): an (n+1)-tuple of vertices whose underlying
/// set is a valid Support. The tuple alone is a complete invariant of the
/// equivalence class, so two simplices are equal iff their tuples are.
struct Simplex {
  std::vector<VertexId> entries;

  int dim() const { return static_cast<int>(entries.size()) - 1; }
  std::vector<VertexId> support() const;  // sorted, deduplicated

  friend bool operator==(const Simplex&, const Simplex&) = default;
  friend auto operator<=>(const Simplex& a, const Simplex& b) {
    return a.entries <=> b.entries;
  }
};

std::string tuple_to_string(const Hypergraph& h, const Simplex& s);

/// A morphism [m] -> [n] of the symmetric simplex category: an arbitrary
/// function, stored as its value list. Source arity is values.size().
struct FunctionMap {
  int target_arity = 0;     // n + 1
  std::vector<int> values;  // mu(0..m), each in [0, n]

  int source_arity() const { return static_cast<int>(values.size()); }
  void validate() const;  // throws InputError when a value is out of range

  static FunctionMap identity(int arity);
  /// d^l : [n-1] -> [n], skipping l.
  static FunctionMap coface(int target_arity, int l);
  /// (l)_[n] : [0] -> [n], the constant map at l.
  static FunctionMap constant(int target_arity, int l);
};

/// The contravariant action K(H)(mu): entries reindexed by mu.
Simplex apply_map(const Simplex& s, const FunctionMap& mu);

/// d_l: deletes entry l. Requires dim >= 1 and 0 <= l <= dim.
Simplex face(const Simplex& s, int l);

/// Projection to the l-th vertex as a 0-simplex.
Simplex vertex_projection(const Simplex& s, int l);

/// s v_l t: splices t's entries in before position l of s. The union of the
/// two supports must be a valid Support of h.
Simplex join(const Hypergraph& h, const Simplex& s, const Simplex& t, int l);

/// Permutation action g . s together with sgn(g) (inversion parity).
/// g must be a bijection of [s.dim()].
std::pair<Simplex, int> permute(const Simplex& s, std::span<const int> g);

int permutation_sign(std::span<const int> g);

/// The preorder on simplices: support inclusion.
bool leq(const Simplex& a, const Simplex& b);

/// W_I cap W_J: returns I u J when that is a valid Support, nullopt (empty
/// intersection) otherwise.
std::optional<Support> intersect_basic_opens(const Hypergraph& h, const Support& i,
                                             const Support& j);

/// Exact number of degree-k simplices. Throws LimitError reporting the count
/// when it exceeds cap.
std::uint64_t count_simplices(const Hypergraph& h, int degree,
                              std::size_t cap = kDefaultBasisCap);

/// All (k+1)-tuples over V(H) with valid support, sorted lexicographically by
/// entries; canonical representatives of K(H)_k.
std::vector<Simplex> enumerate_simplices(const Hypergraph& h, int degree,
                                         std::size_t cap = kDefaultBasisCap);

/// Outcome of the closed/Cech verification. Failures carry witness tuples.
struct CechReport {
  int max_dim = 0;
  bool closed_ok = false;
  bool cech_ok = false;
  bool natural_ok = false;
  std::size_t support_pairs_checked = 0;
  std::vector<std::size_t> simplex_counts;  // |K(H)_n| for n <= max_dim
  std::vector<std::size_t> cech_counts;     // |C(K(H))_n|, independently enumerated
  std::vector<std::string> failures;

  bool pass() const { return closed_ok && cech_ok && natural_ok; }
};

/// Verifies (a) closedness: pairwise intersections of basic opens are empty or
/// basic, via materialized simplex sets; (b) Cech: psi_n is a bijection onto
/// the independently enumerated Cech nerve for n <= max_dim, and psi commutes
/// with the simplicial action on a seeded sample of FunctionMaps.
CechReport verify_cech(const Hypergraph& h, int max_dim,
                       std::size_t cap = kDefaultBasisCap);

/// Test seam: same verification against caller-supplied per-degree simplex
/// lists (per_degree[n] standing in for enumerate_simplices(h, n)). The lists
/// must cover every degree the checks need; shorter input is an error.
CechReport verify_cech_with(const Hypergraph& h, int max_dim,
                            const std::vector<std::vector<Simplex>>& per_degree,
                            std::size_t cap = kDefaultBasisCap);

}  // namespace hyplap
