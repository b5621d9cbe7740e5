#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyplap/hypergraph.hpp"

namespace hyplap {

inline constexpr double kTolFun = 1e-9;   // functoriality residual, absolute
inline constexpr double kTolRank = 1e-9;  // relative singular/eigen zero threshold
inline constexpr double kTolSpec = 1e-8;  // relative spectral comparison slack

/// A cellular sheaf of finite-dimensional real inner-product spaces on the
/// support poset: a stalk dimension per node, a restriction matrix per Hasse
/// cover (shape dim[S'] x dim[S]), optional SPD stalk Gram matrices.
/// Functoriality of the cover squares is validated at construction.
/// Immutable afterwards; safe to share across threads.
class CellularSheaf {
 public:
  CellularSheaf(Hypergraph h, SupportPoset poset, std::vector<int> stalk_dims,
                std::vector<Eigen::MatrixXd> hasse_maps,
                std::map<int, Eigen::MatrixXd> grams = {}, double tol_fun = kTolFun);

  /// Loads {"stalks":{...},"maps":{"S->T":[[...]]},"gram":{...}} with supports
  /// keyed by "|"-joined sorted vertex names. Every poset node needs a stalk
  /// entry and every Hasse cover a map; missing gram entries default to the
  /// identity.
  static CellularSheaf load(std::string_view json_text, const Hypergraph& h,
                            double tol_fun = kTolFun,
                            std::size_t node_cap = kDefaultBasisCap);

  std::string to_json(int indent = -1) const;

  const Hypergraph& hypergraph() const { return hypergraph_; }
  const SupportPoset& poset() const { return poset_; }

  int stalk_dim(int node) const { return stalk_dims_.at(node); }
  const std::vector<int>& stalk_dims() const { return stalk_dims_; }

  bool has_custom_gram() const { return !grams_.empty(); }
  Eigen::MatrixXd gram(int node) const;  // identity when none stored
  const std::map<int, Eigen::MatrixXd>& stored_grams() const { return grams_; }

  const Eigen::MatrixXd& hasse_map(int cover) const { return hasse_maps_.at(cover); }

  /// F(S <= T): product of Hasse maps along the canonical chain that inserts
  /// the missing vertices in increasing order; identity when S == T.
  Eigen::MatrixXd restriction(int sub_node, int super_node) const;
  Eigen::MatrixXd restriction(const Support& sub, const Support& sup) const;

  struct FunctorialityReport {
    double worst_residual = 0.0;
    std::string worst_square;  // "S -> T via a,b"
  };
  FunctorialityReport functoriality_residual() const;

  double tol_fun() const { return tol_fun_; }

 private:
  void validate() const;

  Hypergraph hypergraph_;
  SupportPoset poset_;
  std::vector<int> stalk_dims_;
  std::vector<Eigen::MatrixXd> hasse_maps_;  // aligned with poset_.covers
  std::map<int, Eigen::MatrixXd> grams_;
  double tol_fun_ = kTolFun;
};

/// Test-sheaf factory kinds.
CellularSheaf constant_sheaf(const Hypergraph& h, int dim,
                             std::size_t node_cap = kDefaultBasisCap);

/// Gauge-twisted constant sheaf: a random orthogonal Q_S per node, Hasse map
/// Q_{S'} Q_S^T. Spectrally indistinguishable from the constant sheaf of the
/// same dimension.
CellularSheaf twisted_sheaf(const Hypergraph& h, int dim, std::uint64_t seed,
                            std::size_t node_cap = kDefaultBasisCap);

/// Stalk R^dim on nodes containing base, 0 elsewhere; maps identity or the
/// empty map as forced.
CellularSheaf skyscraper_sheaf(const Hypergraph& h, const Support& base, int dim,
                               std::size_t node_cap = kDefaultBasisCap);

CellularSheaf direct_sum_sheaf(const CellularSheaf& a, const CellularSheaf& b);

/// Generator spec string: "constant:d=2", "twisted:d=2,seed=7",
/// "skyscraper:base=a|b,d=1", "direct_sum:a=(constant:d=1),b=(twisted:d=2)".
CellularSheaf generate_sheaf(const Hypergraph& h, std::string_view spec,
                             std::uint64_t default_seed = 0,
                             std::size_t node_cap = kDefaultBasisCap);

/// A union of basic opens W_S, given by its generating supports.
struct OpenSet {
  std::vector<Support> generators;
};

struct SectionSpace {
  int dimension = 0;
  std::vector<int> nodes;    // poset node ids of the open set, canonical order
  std::vector<int> offsets;  // coordinate offsets per node (size nodes+1)
  Eigen::MatrixXd basis;     // total coords x dimension, orthonormal columns
};

/// Sections over U: the finite limit of the stalks over the up-closure of the
/// generators, computed as the null space of the stacked cover constraints
/// restriction(S,S') s_S - s_{S'} = 0.
SectionSpace sections(const CellularSheaf& sheaf, const OpenSet& open_set,
                      double tol_rank = kTolRank);

}  // namespace hyplap
