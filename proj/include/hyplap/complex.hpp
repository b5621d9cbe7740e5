#pragma once

#include <Eigen/Sparse>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hyplap/sheaf.hpp"
#include "hyplap/simplex.hpp"

namespace hyplap {

enum class Variant { Unordered, Alternating, Ordered };

std::string to_string(Variant v);
Variant variant_from_string(std::string_view s);

/// Total order on V(H) used by the ordered and alternating variants.
/// Defaults to lexicographic on vertex names.
class VertexOrder {
 public:
  static VertexOrder lexicographic(const Hypergraph& h);
  static VertexOrder from_names(const Hypergraph& h, const std::vector<std::string>& names);

  int rank(VertexId v) const { return rank_.at(v); }
  bool less(VertexId a, VertexId b) const { return rank_[a] < rank_[b]; }
  bool tuple_increasing(std::span<const VertexId> t) const;
  bool tuple_rank_less(std::span<const VertexId> a, std::span<const VertexId> b) const;
  /// Number of tuple entries with rank strictly below v's.
  int insertion_position(std::span<const VertexId> t, VertexId v) const;

 private:
  std::vector<int> rank_;
};

/// Indexed basis of C^k in one variant: one block per basis simplex, block
/// size the stalk dimension of its support. Unordered bases hold every valid
/// tuple in entry-lexicographic order; ordered and alternating bases hold the
/// strictly increasing tuples (the alternating subspace is parameterized by
/// the ordered basis).
struct CochainSpace {
  Variant variant = Variant::Unordered;
  int degree = 0;
  std::vector<Simplex> simplices;
  std::vector<int> offsets;        // size()+1 prefix sums of block dims
  std::vector<int> support_nodes;  // poset node id per simplex

  Eigen::Index total_dim() const { return offsets.empty() ? 0 : offsets.back(); }
  int block_count() const { return static_cast<int>(simplices.size()); }
  int block_dim(int i) const { return offsets[i + 1] - offsets[i]; }
  int find(const Simplex& s) const;  // -1 when absent

  std::map<std::vector<VertexId>, int> index;  // tuple -> block position
};

CochainSpace cochain_space(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                           Variant variant, const VertexOrder& order,
                           std::size_t cap = kDefaultBasisCap);

/// A real matrix together with the two cochain spaces indexing it.
struct AssembledMatrix {
  CochainSpace rows;
  CochainSpace cols;
  Eigen::SparseMatrix<double> mat;

  Eigen::Index nonzeros(double threshold = 0.0) const;
  double max_abs() const;
};

/// delta^k in the requested variant. Unordered and ordered rows are the
/// signed sums of restrictions along the faces of each codomain simplex; the
/// alternating matrix is P_{k+1} * delta_unordered * E_k in the ordered
/// parameterization.
AssembledMatrix coboundary(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                           Variant variant, const VertexOrder& order,
                           std::size_t cap = kDefaultBasisCap);

/// E_k: the alternating subspace's parameterization inside the unordered
/// space. The column of an increasing tuple t places sgn(g) at each distinct
/// permutation g.t; degenerate tuples stay zero.
AssembledMatrix alt_inclusion(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                              const VertexOrder& order, std::size_t cap = kDefaultBasisCap);

/// P_k: reads off unordered coordinates at the strictly increasing tuples.
/// Left inverse of E_k.
AssembledMatrix ordered_readoff(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                                const VertexOrder& order, std::size_t cap = kDefaultBasisCap);

}  // namespace hyplap
