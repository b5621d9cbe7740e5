#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "hyplap/complex.hpp"

namespace hyplap {

inline constexpr int kDenseEigLimit = 2000;
inline constexpr int kLanczosPairs = 32;

/// Block-diagonal Gram matrix of a cochain space (identity unless the sheaf
/// carries stalk Gram matrices).
struct InnerProductStructure {
  Eigen::SparseMatrix<double> gram;
  bool identity = true;

  static InnerProductStructure for_space(const CochainSpace& space, const CellularSheaf& sheaf);
};

/// The adjoint of an assembled coboundary: G_dom^{-1} delta^T G_cod; exactly
/// the transpose under identity Gram matrices.
AssembledMatrix adjoint(const AssembledMatrix& delta, const InnerProductStructure& codomain_ip,
                        const InnerProductStructure& domain_ip);

enum class Route { Oracle, Formula };

Route route_from_string(std::string_view s);
std::string to_string(Route r);

/// L^k = delta* delta + delta delta* (L^0_- = 0).
///
/// Oracle route: products of the assembled matrices — per-variant assembled
/// coboundaries for unordered and ordered; for alternating, the restriction
/// P_k (delta* delta + delta delta*) E_k of the unordered Laplacian in the
/// ordered parameterization.
///
/// Formula route: entrywise assembly from the closed forms (double signed sum
/// over insertions and faces for unordered; single-l sums with (k+2)/(k+1)
/// prefactors and position-0 joins for alternating; insertion-position signs
/// over strictly increasing tuples for ordered). Requires identity Gram
/// matrices.
AssembledMatrix laplacian(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                          Variant variant, Route route, const VertexOrder& order,
                          std::size_t cap = kDefaultBasisCap);

struct SpectralReport {
  int degree = 0;
  Variant variant = Variant::Unordered;
  Eigen::Index dim = 0;
  std::vector<double> eigenvalues;  // ascending; all computed on the dense
                                    // path, smallest pairs on the Lanczos path
  int betti = 0;                    // multiplicity of 0 at tol_rank
  int betti_rank_check = 0;         // dim C^k - rank delta^k - rank delta^{k-1}
  Eigen::MatrixXd harmonic_basis;   // dim x betti
  bool dense_path = true;
};

/// Symmetric (or Gram-generalized) eigendecomposition of the oracle-route
/// Laplacian; dense up to dense_limit, Lanczos for the smallest pairs beyond.
SpectralReport spectral_report(const Hypergraph& h, const CellularSheaf& sheaf, int degree,
                               Variant variant, const VertexOrder& order,
                               std::size_t cap = kDefaultBasisCap,
                               double tol_rank = kTolRank, int dense_limit = kDenseEigLimit);

/// Smallest `pairs` eigenpairs of a symmetric PSD operator by reorthogonalized
/// Lanczos. Exposed for testing against the dense path.
void lanczos_smallest(const Eigen::SparseMatrix<double>& a, int pairs,
                      std::vector<double>& values, Eigen::MatrixXd& vectors,
                      std::uint64_t seed = 12345);

}  // namespace hyplap
