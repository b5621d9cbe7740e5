#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyplap/errors.hpp"

namespace hyplap {

using VertexId = int;

inline constexpr std::size_t kDefaultBasisCap = 1'000'000;

/// A nonempty vertex subset that lies inside the image of the extended
/// structure map: either a singleton {v} or a subset of some hyperedge.
/// Members are strictly increasing vertex ids.
struct Support {
  std::vector<VertexId> members;

  int size() const { return static_cast<int>(members.size()); }
  bool contains(VertexId v) const;
  bool subset_of(const Support& other) const;

  friend bool operator==(const Support&, const Support&) = default;
  friend auto operator<=>(const Support& a, const Support& b) {
    return a.members <=> b.members;
  }
};

/// Hypergraph (E, V, f): named hyperedges of >= 2 distinct vertices over a
/// lexicographically sorted vertex universe. Immutable after construction;
/// safe to share across threads.
class Hypergraph {
 public:
  /// Parses and validates the canonical JSON form
  /// {"vertices":[...],"edges":{name:[...]}}. Edge vertex lists are
  /// deduplicated; duplicate names and unknown vertices are errors.
  static Hypergraph parse(std::string_view json_text);

  static Hypergraph make(std::vector<std::string> vertices,
                         std::vector<std::pair<std::string, std::vector<std::string>>> edges);

  /// Canonical serialization: all lists sorted lexicographically.
  /// parse(to_json()) reproduces the hypergraph exactly.
  std::string to_json(int indent = -1) const;

  int vertex_count() const { return static_cast<int>(vertex_names_.size()); }
  const std::vector<std::string>& vertex_names() const { return vertex_names_; }
  const std::string& vertex_name(VertexId v) const { return vertex_names_.at(v); }
  VertexId vertex_id(std::string_view name) const;  // throws InputError if unknown
  bool has_vertex(std::string_view name) const;

  int edge_count() const { return static_cast<int>(edge_names_.size()); }
  const std::vector<std::string>& edge_names() const { return edge_names_; }
  const std::vector<std::vector<VertexId>>& edge_members() const { return edge_members_; }

  /// True iff |S| == 1 or S is contained in some hyperedge's vertex set.
  bool is_valid_support(std::span<const VertexId> members) const;

  /// The extended structure map: f(e) for an edge name, {v} for a vertex name.
  Support extended_structure(std::string_view name) const;

  Support make_support(std::span<const VertexId> members) const;  // validates
  Support support_from_names(std::span<const std::string> names) const;

  std::string support_key(const Support& s) const;        // "a|b|c"
  Support parse_support_key(std::string_view key) const;  // validates

 private:
  Hypergraph() = default;

  std::vector<std::string> vertex_names_;            // strictly increasing
  std::vector<std::string> edge_names_;              // strictly increasing
  std::vector<std::vector<VertexId>> edge_members_;  // aligned with edge_names_
};

/// The poset of valid supports ordered by inclusion, with its Hasse covers.
/// Node order is deterministic: by cardinality, then lexicographic.
struct SupportPoset {
  std::vector<Support> nodes;
  std::vector<std::pair<int, int>> covers;  // (sub, super) node indices
  std::vector<std::vector<int>> covers_above;  // node -> cover indices where node is sub
  std::vector<std::vector<int>> covers_below;  // node -> cover indices where node is super

  int node_count() const { return static_cast<int>(nodes.size()); }
  int node_id(std::span<const VertexId> members) const;  // -1 if absent
  int node_id_or_throw(const Support& s) const;
  int cover_id(int sub, int super) const;  // -1 if not a cover pair

  friend bool operator==(const SupportPoset& a, const SupportPoset& b) {
    return a.nodes == b.nodes && a.covers == b.covers;
  }

 private:
  friend SupportPoset support_poset(const Hypergraph&, std::size_t);
  std::map<std::vector<VertexId>, int> index_;
  std::map<std::pair<int, int>, int> cover_index_;
};

/// Builds the support poset: all nonempty subsets of hyperedges plus all
/// singletons, with (S, S') covers for |S'| = |S|+1. Throws LimitError
/// (reporting the count) past node_cap.
SupportPoset support_poset(const Hypergraph& h, std::size_t node_cap = kDefaultBasisCap);

}  // namespace hyplap
