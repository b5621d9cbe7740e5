#include "hyplap/laplacian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace hyplap {

Route route_from_string(std::string_view s) {
  if (s == "oracle") return Route::Oracle;
  if (s == "formula") return Route::Formula;
  throw InputError("unknown route '" + std::string(s) + "'");
}

std::string to_string(Route r) { return r == Route::Oracle ? "oracle" : "formula"; }

InnerProductStructure InnerProductStructure::for_space(const CochainSpace& space,
                                                       const CellularSheaf& sheaf) {
  InnerProductStructure ip;
  ip.identity = !sheaf.has_custom_gram();
  if (ip.identity) return ip;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < space.block_count(); ++i) {
    const Eigen::MatrixXd g = sheaf.gram(space.support_nodes[i]);
    for (Eigen::Index a = 0; a < g.rows(); ++a)
      for (Eigen::Index b = 0; b < g.cols(); ++b)
        if (g(a, b) != 0.0)
          triplets.emplace_back(space.offsets[i] + a, space.offsets[i] + b, g(a, b));
  }
  ip.gram.resize(space.total_dim(), space.total_dim());
  ip.gram.setFromTriplets(triplets.begin(), triplets.end());
  return ip;
}

namespace {

Eigen::SparseMatrix<double> block_gram_inverse(const CochainSpace& space,
                                               const CellularSheaf& sheaf) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::map<int, Eigen::MatrixXd> inverses;
  for (int i = 0; i < space.block_count(); ++i) {
    const int node = space.support_nodes[i];
    auto it = inverses.find(node);
    if (it == inverses.end()) {
      const Eigen::MatrixXd g = sheaf.gram(node);
      Eigen::MatrixXd inv =
          g.rows() == 0 ? g : g.llt().solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
      it = inverses.emplace(node, std::move(inv)).first;
    }
    const Eigen::MatrixXd& inv = it->second;
    for (Eigen::Index a = 0; a < inv.rows(); ++a)
      for (Eigen::Index b = 0; b < inv.cols(); ++b)
        if (inv(a, b) != 0.0)
          triplets.emplace_back(space.offsets[i] + a, space.offsets[i] + b, inv(a, b));
  }
  Eigen::SparseMatrix<double> out(space.total_dim(), space.total_dim());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

AssembledMatrix adjoint(const AssembledMatrix& delta, const InnerProductStructure& codomain_ip,
                        const InnerProductStructure& domain_ip) {
  if (!codomain_ip.identity && codomain_ip.gram.rows() != delta.mat.rows())
    throw InputError("adjoint: codomain inner product does not match the matrix");
  if (!domain_ip.identity && domain_ip.gram.rows() != delta.mat.cols())
    throw InputError("adjoint: domain inner product does not match the matrix");
  AssembledMatrix out;
  out.rows = delta.cols;
  out.cols = delta.rows;
  Eigen::SparseMatrix<double> t = delta.mat.transpose();
  if (!codomain_ip.identity) t = (t * codomain_ip.gram).eval();
  if (!domain_ip.identity) {
    // domain gram is block diagonal SPD; invert blockwise via dense blocks
    Eigen::SparseMatrix<double> inv(t.rows(), t.rows());
    {
      // recover block structure from the row space metadata
      std::vector<Eigen::Triplet<double>> triplets;
      const CochainSpace& space = out.rows;
      Eigen::MatrixXd dense = Eigen::MatrixXd(domain_ip.gram);
      for (int i = 0; i < space.block_count(); ++i) {
        const int d = space.block_dim(i);
        if (d == 0) continue;
        const Eigen::MatrixXd block = dense.block(space.offsets[i], space.offsets[i], d, d);
        const Eigen::MatrixXd binv = block.llt().solve(Eigen::MatrixXd::Identity(d, d));
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            if (binv(a, b) != 0.0)
              triplets.emplace_back(space.offsets[i] + a, space.offsets[i] + b, binv(a, b));
      }
      inv.setFromTriplets(triplets.begin(), triplets.end());
    }
    t = (inv * t).eval();
  }
  out.mat = std::move(t);
  return out;
}

namespace {

AssembledMatrix oracle_laplacian(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                                 Variant variant, const VertexOrder& order, std::size_t cap) {
  const bool custom = sheaf.has_custom_gram();
  if (variant != Variant::Alternating) {
    AssembledMatrix delta_k = coboundary(h, sheaf, degree, variant, order, cap);
    Eigen::SparseMatrix<double> up;
    if (custom) {
      const auto inv_k = block_gram_inverse(delta_k.cols, sheaf);
      const auto ip_k1 = InnerProductStructure::for_space(delta_k.rows, sheaf);
      up = inv_k * Eigen::SparseMatrix<double>(delta_k.mat.transpose()) * ip_k1.gram *
           delta_k.mat;
    } else {
      up = Eigen::SparseMatrix<double>(delta_k.mat.transpose()) * delta_k.mat;
    }
    AssembledMatrix out;
    out.rows = delta_k.cols;
    out.cols = delta_k.cols;
    out.mat = up;
    if (degree > 0) {
      AssembledMatrix delta_km = coboundary(h, sheaf, degree - 1, variant, order, cap);
      if (custom) {
        const auto inv_km = block_gram_inverse(delta_km.cols, sheaf);
        const auto ip_k = InnerProductStructure::for_space(delta_km.rows, sheaf);
        out.mat = up + Eigen::SparseMatrix<double>(
                           delta_km.mat * inv_km *
                           Eigen::SparseMatrix<double>(delta_km.mat.transpose()) * ip_k.gram);
      } else {
        out.mat = up + Eigen::SparseMatrix<double>(
                           delta_km.mat *
                           Eigen::SparseMatrix<double>(delta_km.mat.transpose()));
      }
    }
    return out;
  }

  // alternating: restriction P_k (delta* delta + delta delta*) E_k of the
  // unordered Laplacian, in the ordered parameterization
  const AssembledMatrix lap_u =
      oracle_laplacian(h, sheaf, degree, Variant::Unordered, order, cap);
  const AssembledMatrix incl = alt_inclusion(h, sheaf, degree, order, cap);
  const AssembledMatrix readoff = ordered_readoff(h, sheaf, degree, order, cap);
  AssembledMatrix out;
  out.rows = readoff.rows;
  out.rows.variant = Variant::Alternating;
  out.cols = incl.cols;
  out.cols.variant = Variant::Alternating;
  out.mat = readoff.mat * lap_u.mat * incl.mat;
  return out;
}

struct SortedTuple {
  Simplex sorted;
  int sign = 0;  // 0 for degenerate tuples
};

SortedTuple sort_with_parity(const Simplex& u, const VertexOrder& order) {
  std::vector<int> perm(u.entries.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    return order.rank(u.entries[a]) < order.rank(u.entries[b]);
  });
  SortedTuple out;
  out.sorted.entries.reserve(u.entries.size());
  for (int i : perm) out.sorted.entries.push_back(u.entries[i]);
  for (std::size_t i = 1; i < out.sorted.entries.size(); ++i)
    if (out.sorted.entries[i - 1] == out.sorted.entries[i]) return {Simplex{}, 0};
  out.sign = permutation_sign(perm);
  return out;
}

Simplex insert_at(const Simplex& s, int pos, VertexId v) {
  Simplex out = s;
  out.entries.insert(out.entries.begin() + pos, v);
  return out;
}

// V([v_i]) over the extended structure map: the union of f(x') over all
// x' in E(H) ⊔ V(H) whose image contains the support
std::vector<VertexId> vertex_neighborhood(const Hypergraph& h,
                                          const std::vector<VertexId>& supp) {
  std::vector<bool> in(h.vertex_count(), false);
  for (const auto& edge : h.edge_members()) {
    if (std::includes(edge.begin(), edge.end(), supp.begin(), supp.end()))
      for (VertexId v : edge) in[v] = true;
  }
  if (supp.size() == 1) in[supp[0]] = true;
  std::vector<VertexId> out;
  for (VertexId v = 0; v < h.vertex_count(); ++v)
    if (in[v]) out.push_back(v);
  return out;
}

AssembledMatrix formula_laplacian(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                                  Variant variant, const VertexOrder& order, std::size_t cap) {
  if (sheaf.has_custom_gram())
    throw InputError(
        "formula route requires identity stalk inner products; use route=oracle");
  CochainSpace space = cochain_space(h, sheaf, degree, variant, order, cap);
  const auto& poset = sheaf.poset();
  std::map<std::pair<int, int>, Eigen::MatrixXd> restr;
  auto restriction = [&](const std::vector<VertexId>& sub,
                         const std::vector<VertexId>& sup) -> const Eigen::MatrixXd& {
    const int a = poset.node_id(sub), b = poset.node_id(sup);
    auto it = restr.find({a, b});
    if (it == restr.end()) it = restr.emplace(std::pair{a, b}, sheaf.restriction(a, b)).first;
    return it->second;
  };
  std::map<std::vector<VertexId>, std::vector<VertexId>> vext_cache;
  auto vext = [&](const std::vector<VertexId>& supp) -> const std::vector<VertexId>& {
    auto it = vext_cache.find(supp);
    if (it == vext_cache.end())
      it = vext_cache.emplace(supp, vertex_neighborhood(h, supp)).first;
    return it->second;
  };

  std::vector<Eigen::Triplet<double>> triplets;
  auto add = [&](int row_block, int col_block, const Eigen::MatrixXd& m, double scale) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double v = scale * m(i, j);
        if (v != 0.0)
          triplets.emplace_back(space.offsets[row_block] + i, space.offsets[col_block] + j, v);
      }
  };

  const int k = degree;
  for (int r = 0; r < space.block_count(); ++r) {
    const Simplex& t = space.simplices[r];
    const auto supp = t.support();

    if (variant == Variant::Unordered) {
      // up: sum over l, l' in [k+1] and v in V(t)
      for (VertexId v : vext(supp)) {
        for (int l = 0; l <= k + 1; ++l) {
          const Simplex z = insert_at(t, l, v);
          const auto supp_z = z.support();
          const Eigen::MatrixXd& a = restriction(supp, supp_z);  // F(t <= z)
          for (int lp = 0; lp <= k + 1; ++lp) {
            const Simplex f = face(z, lp);
            const int c = space.find(f);
            const Eigen::MatrixXd& b = restriction(f.support(), supp_z);
            add(r, c, a.transpose() * b, (l + lp) % 2 == 0 ? 1.0 : -1.0);
          }
        }
      }
      // down: sum over faces sigma = d_l(t), then v in V(sigma), l' in [k]
      for (int l = 0; l <= k && k >= 1; ++l) {
        const Simplex sigma = face(t, l);
        const auto supp_s = sigma.support();
        const Eigen::MatrixXd& cmat = restriction(supp_s, supp);  // F(sigma <= t)
        for (VertexId v : vext(supp_s)) {
          for (int lp = 0; lp <= k; ++lp) {
            const Simplex tau = insert_at(sigma, lp, v);
            const int c = space.find(tau);
            const Eigen::MatrixXd& d = restriction(supp_s, tau.support());
            add(r, c, cmat * d.transpose(), (l + lp) % 2 == 0 ? 1.0 : -1.0);
          }
        }
      }
    } else if (variant == Variant::Alternating) {
      // up: (k+2) sum over l in [k+1], v in V(t), joins at position 0
      for (VertexId v : vext(supp)) {
        const Simplex z = insert_at(t, 0, v);
        const auto supp_z = z.support();
        const Eigen::MatrixXd& a = restriction(supp, supp_z);
        for (int l = 0; l <= k + 1; ++l) {
          const Simplex u = face(z, l);
          const auto [su, sgn] = sort_with_parity(u, order);
          if (sgn == 0) continue;  // alternating cochains vanish on degenerate tuples
          const int c = space.find(su);
          const Eigen::MatrixXd& b = restriction(u.support(), supp_z);
          add(r, c, a.transpose() * b,
              static_cast<double>(k + 2) * sgn * (l % 2 == 0 ? 1.0 : -1.0));
        }
      }
      // down: (k+1) sum over l in [k], v in V(d_l t), joins at position 0
      for (int l = 0; l <= k && k >= 1; ++l) {
        const Simplex sigma = face(t, l);
        const auto supp_s = sigma.support();
        const Eigen::MatrixXd& cmat = restriction(supp_s, supp);
        for (VertexId v : vext(supp_s)) {
          const Simplex tau = insert_at(sigma, 0, v);
          const auto [st, sgn] = sort_with_parity(tau, order);
          if (sgn == 0) continue;
          const int c = space.find(st);
          const Eigen::MatrixXd& d = restriction(supp_s, tau.support());
          add(r, c, cmat * d.transpose(),
              static_cast<double>(k + 1) * sgn * (l % 2 == 0 ? 1.0 : -1.0));
        }
      }
    } else {
      // ordered: insertion-position signs over strictly increasing tuples;
      // vertices already in the tuple are skipped (l(v) undefined)
      for (VertexId v : vext(supp)) {
        if (std::binary_search(supp.begin(), supp.end(), v)) continue;
        const int lv = order.insertion_position(t.entries, v);
        const Simplex z = insert_at(t, lv, v);
        const auto supp_z = z.support();
        const Eigen::MatrixXd& a = restriction(supp, supp_z);
        for (int l = 0; l <= k + 1; ++l) {
          const Simplex u = face(z, l);
          const int c = space.find(u);
          const Eigen::MatrixXd& b = restriction(u.support(), supp_z);
          add(r, c, a.transpose() * b, (l + lv) % 2 == 0 ? 1.0 : -1.0);
        }
      }
      for (int l = 0; l <= k && k >= 1; ++l) {
        const Simplex sigma = face(t, l);
        const auto supp_s = sigma.support();
        const Eigen::MatrixXd& cmat = restriction(supp_s, supp);
        for (VertexId v : vext(supp_s)) {
          if (std::binary_search(supp_s.begin(), supp_s.end(), v)) continue;
          const int lv = order.insertion_position(sigma.entries, v);
          const Simplex tau = insert_at(sigma, lv, v);
          const int c = space.find(tau);
          const Eigen::MatrixXd& d = restriction(supp_s, tau.support());
          add(r, c, cmat * d.transpose(), (l + lv) % 2 == 0 ? 1.0 : -1.0);
        }
      }
    }
  }

  AssembledMatrix out;
  out.rows = space;
  out.cols = std::move(space);
  out.mat.resize(out.rows.total_dim(), out.rows.total_dim());
  out.mat.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

AssembledMatrix laplacian(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                          Variant variant, Route route, const VertexOrder& order,
                          std::size_t cap) {
  if (degree < 0) throw InputError("degree must be nonnegative");
  if (route == Route::Oracle) return oracle_laplacian(h, sheaf, degree, variant, order, cap);
  return formula_laplacian(h, sheaf, degree, variant, order, cap);
}

void lanczos_smallest(const Eigen::SparseMatrix<double>& a, int pairs,
                      std::vector<double>& values, Eigen::MatrixXd& vectors,
                      std::uint64_t seed) {
  const Eigen::Index n = a.rows();
  values.clear();
  vectors.resize(n, 0);
  if (n == 0) return;
  const int steps = static_cast<int>(std::min<Eigen::Index>(n, std::max(3 * pairs, 96)));

  std::mt19937_64 rng(seed);
  auto random_vector = [&]() {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = 2.0 * (static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
    return v;
  };

  Eigen::MatrixXd basis(n, steps);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(steps);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(steps);
  Eigen::VectorXd q = random_vector();
  q.normalize();
  int m = 0;
  for (int j = 0; j < steps; ++j) {
    basis.col(j) = q;
    ++m;
    Eigen::VectorXd w = a * q;
    alpha(j) = q.dot(w);
    w -= alpha(j) * q;
    if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    const double norm = w.norm();
    if (j + 1 == steps) break;
    if (norm < 1e-12) {
      // invariant subspace found; restart with a fresh direction
      Eigen::VectorXd v = random_vector();
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) v -= basis.col(i).dot(v) * basis.col(i);
      const double vn = v.norm();
      if (vn < 1e-12) break;
      beta(j) = 0.0;
      q = v / vn;
    } else {
      beta(j) = norm;
      q = w / norm;
    }
  }

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    tri(i, i) = alpha(i);
    if (i + 1 < m) {
      tri(i, i + 1) = beta(i);
      tri(i + 1, i) = beta(i);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
  const int keep = std::min(pairs, m);
  values.assign(es.eigenvalues().data(), es.eigenvalues().data() + keep);
  vectors = basis.leftCols(m) * es.eigenvectors().leftCols(keep);
}

SpectralReport spectral_report(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                               Variant variant, const VertexOrder& order, std::size_t cap,
                               double tol_rank, int dense_limit) {
  const AssembledMatrix lap = laplacian(h, sheaf, degree, variant, Route::Oracle, order, cap);
  SpectralReport report;
  report.degree = degree;
  report.variant = variant;
  report.dim = lap.mat.rows();

  const bool custom = sheaf.has_custom_gram();
  double lambda_max = 0.0;
  if (report.dim == 0) {
    report.dense_path = true;
  } else if (custom || report.dim <= dense_limit) {
    report.dense_path = true;
    const Eigen::MatrixXd dense = Eigen::MatrixXd(lap.mat);
    if (!custom) {
      const Eigen::MatrixXd sym = 0.5 * (dense + dense.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
      report.eigenvalues.assign(es.eigenvalues().data(),
                                es.eigenvalues().data() + es.eigenvalues().size());
      report.harmonic_basis = es.eigenvectors();
    } else {
      // L is self-adjoint w.r.t. the Gram inner product: solve (G L) x = lambda G x
      const auto ip = InnerProductStructure::for_space(lap.rows, sheaf);
      const Eigen::MatrixXd g = Eigen::MatrixXd(ip.gram);
      const Eigen::MatrixXd gl = g * dense;
      const Eigen::MatrixXd sym = 0.5 * (gl + gl.transpose());
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, g);
      report.eigenvalues.assign(es.eigenvalues().data(),
                                es.eigenvalues().data() + es.eigenvalues().size());
      report.harmonic_basis = es.eigenvectors();
    }
    lambda_max = report.eigenvalues.empty() ? 0.0 : report.eigenvalues.back();
  } else {
    report.dense_path = false;
    Eigen::SparseMatrix<double> sym = 0.5 * (Eigen::SparseMatrix<double>(lap.mat.transpose()) +
                                             lap.mat);
    Eigen::MatrixXd vecs;
    lanczos_smallest(sym, kLanczosPairs, report.eigenvalues, vecs);
    report.harmonic_basis = vecs;
    // crude upper bound for the zero threshold: Gershgorin row sums
    for (Eigen::Index i = 0; i < sym.outerSize(); ++i) {
      double row = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(sym, i); it; ++it)
        row += std::abs(it.value());
      lambda_max = std::max(lambda_max, row);
    }
  }

  const double thresh = tol_rank * std::max(1.0, lambda_max);
  int betti = 0;
  for (double ev : report.eigenvalues)
    if (ev <= thresh) ++betti;
  report.betti = betti;
  report.harmonic_basis =
      report.harmonic_basis.size() ? report.harmonic_basis.leftCols(betti) : report.harmonic_basis;

  // rank-nullity cross-check from the assembled coboundaries
  auto rank_of = [&](const Eigen::SparseMatrix<double>& m) -> Eigen::Index {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    const Eigen::MatrixXd dense = Eigen::MatrixXd(m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    const auto& sv = svd.singularValues();
    const double t = tol_rank * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > t) ++r;
    return r;
  };
  const AssembledMatrix dk = coboundary(h, sheaf, degree, variant, order, cap);
  Eigen::Index rk = rank_of(dk.mat);
  Eigen::Index rkm = 0;
  if (degree > 0) {
    const AssembledMatrix dkm = coboundary(h, sheaf, degree - 1, variant, order, cap);
    rkm = rank_of(dkm.mat);
  }
  report.betti_rank_check = static_cast<int>(report.dim - rk - rkm);
  return report;
}

}  // namespace hyplap
