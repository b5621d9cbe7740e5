#include "hyplap/complex.hpp"

#include <algorithm>
#include <numeric>

namespace hyplap {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Unordered: return "unordered";
    case Variant::Alternating: return "alternating";
    case Variant::Ordered: return "ordered";
  }
  return "unordered";
}

Variant variant_from_string(std::string_view s) {
  if (s == "unordered") return Variant::Unordered;
  if (s == "alternating") return Variant::Alternating;
  if (s == "ordered") return Variant::Ordered;
  throw InputError("unknown variant '" + std::string(s) + "'");
}

VertexOrder VertexOrder::lexicographic(const Hypergraph& h) {
  VertexOrder order;
  order.rank_.resize(h.vertex_count());
  std::iota(order.rank_.begin(), order.rank_.end(), 0);
  return order;
}

VertexOrder VertexOrder::from_names(const Hypergraph& h, const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != h.vertex_count())
    throw InputError("vertex order must list every vertex exactly once");
  VertexOrder order;
  order.rank_.assign(h.vertex_count(), -1);
  for (std::size_t pos = 0; pos < names.size(); ++pos) {
    const VertexId v = h.vertex_id(names[pos]);
    if (order.rank_[v] >= 0)
      throw InputError("vertex order repeats '" + names[pos] + "'");
    order.rank_[v] = static_cast<int>(pos);
  }
  return order;
}

bool VertexOrder::tuple_increasing(std::span<const VertexId> t) const {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (rank_[t[i - 1]] >= rank_[t[i]]) return false;
  return true;
}

bool VertexOrder::tuple_rank_less(std::span<const VertexId> a,
                                  std::span<const VertexId> b) const {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [this](VertexId x, VertexId y) { return rank_[x] < rank_[y]; });
}

int VertexOrder::insertion_position(std::span<const VertexId> t, VertexId v) const {
  int pos = 0;
  for (VertexId w : t)
    if (rank_[w] < rank_[v]) ++pos;
  return pos;
}

int CochainSpace::find(const Simplex& s) const {
  auto it = index.find(s.entries);
  return it == index.end() ? -1 : it->second;
}

CochainSpace cochain_space(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                           Variant variant, const VertexOrder& order, std::size_t cap) {
  CochainSpace space;
  space.variant = variant;
  space.degree = degree;
  space.simplices = enumerate_simplices(h, degree, cap);
  if (variant != Variant::Unordered) {
    std::erase_if(space.simplices,
                  [&](const Simplex& s) { return !order.tuple_increasing(s.entries); });
    std::sort(space.simplices.begin(), space.simplices.end(),
              [&](const Simplex& a, const Simplex& b) {
                return order.tuple_rank_less(a.entries, b.entries);
              });
  }
  const auto& poset = sheaf.poset();
  space.offsets.assign(1, 0);
  for (std::size_t i = 0; i < space.simplices.size(); ++i) {
    const int node = poset.node_id(space.simplices[i].support());
    space.support_nodes.push_back(node);
    space.offsets.push_back(space.offsets.back() + sheaf.stalk_dim(node));
    space.index[space.simplices[i].entries] = static_cast<int>(i);
  }
  if (static_cast<std::size_t>(space.total_dim()) > cap)
    throw LimitError("cochain space dimension " + std::to_string(space.total_dim()) +
                     " exceeds the basis cap (" + std::to_string(cap) + ")");
  return space;
}

Eigen::Index AssembledMatrix::nonzeros(double threshold) const {
  Eigen::Index n = 0;
  for (int k = 0; k < mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
      if (std::abs(it.value()) > threshold) ++n;
  return n;
}

double AssembledMatrix::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

namespace {

using Triplet = Eigen::Triplet<double>;

void add_block(std::vector<Triplet>& triplets, Eigen::Index row_off, Eigen::Index col_off,
               const Eigen::MatrixXd& block, double scale) {
  for (Eigen::Index i = 0; i < block.rows(); ++i)
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      const double v = scale * block(i, j);
      if (v != 0.0) triplets.emplace_back(row_off + i, col_off + j, v);
    }
}

// restriction cache keyed by (sub node, super node)
struct RestrictionCache {
  const CellularSheaf& sheaf;
  std::map<std::pair<int, int>, Eigen::MatrixXd> cache;

  const Eigen::MatrixXd& get(int sub, int sup) {
    auto it = cache.find({sub, sup});
    if (it == cache.end())
      it = cache.emplace(std::pair{sub, sup}, sheaf.restriction(sub, sup)).first;
    return it->second;
  }
};

AssembledMatrix signed_face_coboundary(const Hypergraph& h, const CellularSheaf& sheaf,
                                       int degree, Variant variant, const VertexOrder& order,
                                       std::size_t cap) {
  AssembledMatrix out;
  out.cols = cochain_space(h, sheaf, degree, variant, order, cap);
  out.rows = cochain_space(h, sheaf, degree + 1, variant, order, cap);
  RestrictionCache restrictions{sheaf, {}};
  std::vector<Triplet> triplets;
  for (int r = 0; r < out.rows.block_count(); ++r) {
    const Simplex& z = out.rows.simplices[r];
    for (int l = 0; l <= z.dim(); ++l) {
      const Simplex f = face(z, l);
      const int c = out.cols.find(f);
      if (c < 0) throw std::logic_error("coboundary: face missing from the domain basis");
      const auto& block = restrictions.get(out.cols.support_nodes[c], out.rows.support_nodes[r]);
      add_block(triplets, out.rows.offsets[r], out.cols.offsets[c], block,
                l % 2 == 0 ? 1.0 : -1.0);
    }
  }
  out.mat.resize(out.rows.total_dim(), out.cols.total_dim());
  out.mat.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

AssembledMatrix alt_inclusion(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                              const VertexOrder& order, std::size_t cap) {
  AssembledMatrix out;
  out.rows = cochain_space(h, sheaf, degree, Variant::Unordered, order, cap);
  out.cols = cochain_space(h, sheaf, degree, Variant::Ordered, order, cap);
  if (degree > 18 ||
      static_cast<std::size_t>(out.cols.total_dim()) * factorial(std::min(degree + 1, 19)) > cap)
    throw LimitError("alternating inclusion entry count exceeds the basis cap");
  std::vector<Triplet> triplets;
  std::vector<int> perm(degree + 1);
  for (int c = 0; c < out.cols.block_count(); ++c) {
    const Simplex& t = out.cols.simplices[c];
    const int d = out.cols.block_dim(c);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      const int sgn = permutation_sign(perm);
      Simplex u;
      u.entries.reserve(degree + 1);
      for (int i = 0; i <= degree; ++i) u.entries.push_back(t.entries[perm[i]]);
      const int r = out.rows.find(u);
      for (int a = 0; a < d; ++a)
        triplets.emplace_back(out.rows.offsets[r] + a, out.cols.offsets[c] + a,
                              static_cast<double>(sgn));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  out.mat.resize(out.rows.total_dim(), out.cols.total_dim());
  out.mat.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

AssembledMatrix ordered_readoff(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                                const VertexOrder& order, std::size_t cap) {
  AssembledMatrix out;
  out.rows = cochain_space(h, sheaf, degree, Variant::Ordered, order, cap);
  out.cols = cochain_space(h, sheaf, degree, Variant::Unordered, order, cap);
  std::vector<Triplet> triplets;
  for (int r = 0; r < out.rows.block_count(); ++r) {
    const int c = out.cols.find(out.rows.simplices[r]);
    for (int a = 0; a < out.rows.block_dim(r); ++a)
      triplets.emplace_back(out.rows.offsets[r] + a, out.cols.offsets[c] + a, 1.0);
  }
  out.mat.resize(out.rows.total_dim(), out.cols.total_dim());
  out.mat.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

AssembledMatrix coboundary(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                           Variant variant, const VertexOrder& order, std::size_t cap) {
  if (degree < 0) throw InputError("degree must be nonnegative");
  if (variant != Variant::Alternating)
    return signed_face_coboundary(h, sheaf, degree, variant, order, cap);
  // alternating subspace in the ordered parameterization: P_{k+1} delta E_k
  const AssembledMatrix delta =
      signed_face_coboundary(h, sheaf, degree, Variant::Unordered, order, cap);
  const AssembledMatrix incl = alt_inclusion(h, sheaf, degree, order, cap);
  const AssembledMatrix readoff = ordered_readoff(h, sheaf, degree + 1, order, cap);
  AssembledMatrix out;
  out.rows = readoff.rows;
  out.rows.variant = Variant::Alternating;
  out.cols = incl.cols;
  out.cols.variant = Variant::Alternating;
  out.mat = readoff.mat * delta.mat * incl.mat;
  return out;
}

}  // namespace hyplap
