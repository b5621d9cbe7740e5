#include "hyplap/hypergraph.hpp"

#include <algorithm>
#include <set>

#include "json_util.hpp"

namespace hyplap {

bool Support::contains(VertexId v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

bool Support::subset_of(const Support& other) const {
  return std::includes(other.members.begin(), other.members.end(), members.begin(),
                       members.end());
}

Hypergraph Hypergraph::make(
    std::vector<std::string> vertices,
    std::vector<std::pair<std::string, std::vector<std::string>>> edges) {
  Hypergraph h;
  std::sort(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& name = vertices[i];
    if (name.empty()) throw InputError("vertex names must be nonempty");
    if (name.find('|') != std::string::npos)
      throw InputError("vertex name '" + name + "' contains the reserved character '|'");
    if (i > 0 && vertices[i - 1] == name)
      throw InputError("duplicate vertex name '" + name + "'");
  }
  h.vertex_names_ = std::move(vertices);

  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& [name, member_names] = edges[i];
    if (name.empty()) throw InputError("edge names must be nonempty");
    if (i > 0 && edges[i - 1].first == name)
      throw InputError("duplicate edge name '" + name + "'");
    std::vector<VertexId> ids;
    for (const auto& vn : member_names) {
      auto it = std::lower_bound(h.vertex_names_.begin(), h.vertex_names_.end(), vn);
      if (it == h.vertex_names_.end() || *it != vn)
        throw InputError("edge '" + name + "' references unknown vertex '" + vn + "'");
      ids.push_back(static_cast<VertexId>(it - h.vertex_names_.begin()));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 2)
      throw InputError("edge '" + name + "' has fewer than 2 distinct vertices");
    h.edge_names_.push_back(name);
    h.edge_members_.push_back(std::move(ids));
  }
  return h;
}

Hypergraph Hypergraph::parse(std::string_view json_text) {
  auto doc = detail::parse_json_strict(json_text, "hypergraph document");
  if (!doc.is_object()) throw InputError("hypergraph document must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (key != "vertices" && key != "edges")
      throw InputError("hypergraph document: unknown key '" + key + "'");
  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    throw InputError("hypergraph document: missing 'vertices' array");

  std::vector<std::string> vertices;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) throw InputError("'vertices' entries must be strings");
    vertices.push_back(v.get<std::string>());
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_object()) throw InputError("'edges' must be a JSON object");
    for (const auto& [name, members] : doc["edges"].items()) {
      if (!members.is_array())
        throw InputError("edge '" + name + "' must map to an array of vertex names");
      std::vector<std::string> mnames;
      for (const auto& m : members) {
        if (!m.is_string())
          throw InputError("edge '" + name + "' has a non-string vertex entry");
        mnames.push_back(m.get<std::string>());
      }
      edges.emplace_back(name, std::move(mnames));
    }
  }
  return make(std::move(vertices), std::move(edges));
}

std::string Hypergraph::to_json(int indent) const {
  detail::ordered_json doc;
  doc["vertices"] = vertex_names_;
  detail::ordered_json edges = detail::ordered_json::object();
  for (std::size_t i = 0; i < edge_names_.size(); ++i) {
    std::vector<std::string> names;
    for (VertexId v : edge_members_[i]) names.push_back(vertex_names_[v]);
    edges[edge_names_[i]] = names;
  }
  doc["edges"] = edges;
  return doc.dump(indent);
}

VertexId Hypergraph::vertex_id(std::string_view name) const {
  auto it = std::lower_bound(vertex_names_.begin(), vertex_names_.end(), name);
  if (it == vertex_names_.end() || *it != name)
    throw InputError("unknown vertex '" + std::string(name) + "'");
  return static_cast<VertexId>(it - vertex_names_.begin());
}

bool Hypergraph::has_vertex(std::string_view name) const {
  return std::binary_search(vertex_names_.begin(), vertex_names_.end(), name);
}

bool Hypergraph::is_valid_support(std::span<const VertexId> members) const {
  if (members.empty()) return false;
  if (members.size() == 1) return members[0] >= 0 && members[0] < vertex_count();
  for (const auto& edge : edge_members_) {
    if (std::includes(edge.begin(), edge.end(), members.begin(), members.end())) return true;
  }
  return false;
}

Support Hypergraph::extended_structure(std::string_view name) const {
  auto it = std::lower_bound(edge_names_.begin(), edge_names_.end(), name);
  if (it != edge_names_.end() && *it == name)
    return Support{edge_members_[it - edge_names_.begin()]};
  if (has_vertex(name)) return Support{{vertex_id(name)}};
  throw InputError("unknown edge or vertex '" + std::string(name) + "'");
}

Support Hypergraph::make_support(std::span<const VertexId> members) const {
  std::vector<VertexId> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (VertexId v : sorted)
    if (v < 0 || v >= vertex_count()) throw InputError("support contains an unknown vertex id");
  if (!is_valid_support(sorted)) {
    Support bad{sorted};
    throw InputError("'" + support_key(bad) + "' is not a valid support (no hyperedge contains it)");
  }
  return Support{std::move(sorted)};
}

Support Hypergraph::support_from_names(std::span<const std::string> names) const {
  std::vector<VertexId> ids;
  for (const auto& n : names) ids.push_back(vertex_id(n));
  return make_support(ids);
}

std::string Hypergraph::support_key(const Support& s) const {
  std::string key;
  for (std::size_t i = 0; i < s.members.size(); ++i) {
    if (i) key += '|';
    key += vertex_names_.at(s.members[i]);
  }
  return key;
}

Support Hypergraph::parse_support_key(std::string_view key) const {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (start <= key.size()) {
    std::size_t pos = key.find('|', start);
    if (pos == std::string_view::npos) pos = key.size();
    names.emplace_back(key.substr(start, pos - start));
    start = pos + 1;
    if (pos == key.size()) break;
  }
  return support_from_names(names);
}

int SupportPoset::node_id(std::span<const VertexId> members) const {
  auto it = index_.find(std::vector<VertexId>(members.begin(), members.end()));
  return it == index_.end() ? -1 : it->second;
}

int SupportPoset::node_id_or_throw(const Support& s) const {
  int id = node_id(s.members);
  if (id < 0) throw InputError("support is not a node of the poset");
  return id;
}

int SupportPoset::cover_id(int sub, int super) const {
  auto it = cover_index_.find({sub, super});
  return it == cover_index_.end() ? -1 : it->second;
}

SupportPoset support_poset(const Hypergraph& h, std::size_t node_cap) {
  std::set<std::vector<VertexId>> members;
  for (int v = 0; v < h.vertex_count(); ++v) members.insert({v});
  for (const auto& edge : h.edge_members()) {
    const std::size_t m = edge.size();
    if (m >= 8 * sizeof(std::size_t) - 1 || ((std::size_t{1} << m) - 1) > node_cap)
      throw LimitError("support poset exceeds the node cap: a single hyperedge of " +
                       std::to_string(m) + " vertices induces 2^" + std::to_string(m) +
                       "-1 nodes");
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
      std::vector<VertexId> subset;
      for (std::size_t b = 0; b < m; ++b)
        if (mask & (std::size_t{1} << b)) subset.push_back(edge[b]);
      members.insert(std::move(subset));
      if (members.size() > node_cap)
        throw LimitError("support poset exceeds the node cap (" + std::to_string(node_cap) +
                         "): more than " + std::to_string(node_cap) + " nodes");
    }
  }

  SupportPoset poset;
  poset.nodes.reserve(members.size());
  for (auto& m : members) poset.nodes.push_back(Support{m});
  std::sort(poset.nodes.begin(), poset.nodes.end(), [](const Support& a, const Support& b) {
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return a.members < b.members;
  });
  for (int i = 0; i < poset.node_count(); ++i) poset.index_[poset.nodes[i].members] = i;

  poset.covers_above.resize(poset.nodes.size());
  poset.covers_below.resize(poset.nodes.size());
  for (int j = 0; j < poset.node_count(); ++j) {
    const auto& sup = poset.nodes[j].members;
    if (sup.size() < 2) continue;
    // dropping the largest member first lists the facets in ascending lex order
    for (std::size_t d = sup.size(); d-- > 0;) {
      const std::size_t drop = d;
      std::vector<VertexId> sub;
      for (std::size_t t = 0; t < sup.size(); ++t)
        if (t != drop) sub.push_back(sup[t]);
      const int i = poset.node_id(sub);
      // downward closure guarantees the facet is a node
      const int cid = static_cast<int>(poset.covers.size());
      poset.covers.emplace_back(i, j);
      poset.cover_index_[{i, j}] = cid;
      poset.covers_above[i].push_back(cid);
      poset.covers_below[j].push_back(cid);
    }
  }
  return poset;
}

}  // namespace hyplap
