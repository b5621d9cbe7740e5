#include "hyplap/sheaf.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <random>

#include "json_util.hpp"

namespace hyplap {

namespace {

double uniform_pm1(std::mt19937_64& rng) {
  // top 53 bits -> [0,1), mapped to [-1,1); avoids distribution portability issues
  const double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  return 2.0 * u - 1.0;
}

Eigen::MatrixXd random_orthogonal(int d, std::mt19937_64& rng) {
  if (d == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = uniform_pm1(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Eigen::MatrixXd parse_matrix(const detail::json& value, const std::string& key) {
  if (!value.is_array()) throw InputError("matrix '" + key + "' must be a nested array");
  const Eigen::Index rows = static_cast<Eigen::Index>(value.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = value[i];
    if (!row.is_array()) throw InputError("matrix '" + key + "' must be a nested array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError("matrix '" + key + "' has ragged rows");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!row[j].is_number()) throw InputError("matrix '" + key + "' has a non-numeric entry");
      m(i, j) = row[j].get<double>();
    }
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

detail::ordered_json dump_matrix(const Eigen::MatrixXd& m) {
  detail::ordered_json rows = detail::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    detail::ordered_json row = detail::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

CellularSheaf::CellularSheaf(Hypergraph h, SupportPoset poset, std::vector<int> stalk_dims,
                             std::vector<Eigen::MatrixXd> hasse_maps,
                             std::map<int, Eigen::MatrixXd> grams, double tol_fun)
    : hypergraph_(std::move(h)),
      poset_(std::move(poset)),
      stalk_dims_(std::move(stalk_dims)),
      hasse_maps_(std::move(hasse_maps)),
      grams_(std::move(grams)),
      tol_fun_(tol_fun) {
  validate();
}

void CellularSheaf::validate() const {
  if (static_cast<int>(stalk_dims_.size()) != poset_.node_count())
    throw InputError("stalk dimensions must cover every poset node");
  for (int d : stalk_dims_)
    if (d < 0) throw InputError("stalk dimensions must be nonnegative");
  if (hasse_maps_.size() != poset_.covers.size())
    throw InputError("restriction maps must cover every Hasse cover");
  for (std::size_t c = 0; c < poset_.covers.size(); ++c) {
    const auto [sub, sup] = poset_.covers[c];
    const auto& m = hasse_maps_[c];
    if (m.rows() != stalk_dims_[sup] || m.cols() != stalk_dims_[sub])
      throw InputError("map '" + hypergraph_.support_key(poset_.nodes[sub]) + "->" +
                       hypergraph_.support_key(poset_.nodes[sup]) + "' has shape " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                       ", expected " + std::to_string(stalk_dims_[sup]) + "x" +
                       std::to_string(stalk_dims_[sub]));
  }
  for (const auto& [node, g] : grams_) {
    if (node < 0 || node >= poset_.node_count())
      throw InputError("gram entry references an unknown node");
    const std::string key = hypergraph_.support_key(poset_.nodes[node]);
    if (g.rows() != stalk_dims_[node] || g.cols() != stalk_dims_[node])
      throw InputError("gram '" + key + "' has the wrong shape");
    if (g.rows() == 0) continue;
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw CheckError("gram '" + key + "' is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw CheckError("gram '" + key + "' is not positive definite");
  }
  const auto rep = functoriality_residual();
  if (rep.worst_residual > tol_fun_)
    throw CheckError("functoriality violation: square " + rep.worst_square + " differs by " +
                     std::to_string(rep.worst_residual));
}

CellularSheaf::FunctorialityReport CellularSheaf::functoriality_residual() const {
  FunctorialityReport report;
  for (int t = 0; t < poset_.node_count(); ++t) {
    const auto& top = poset_.nodes[t].members;
    if (top.size() < 3) continue;
    for (std::size_t ai = 0; ai < top.size(); ++ai) {
      for (std::size_t bi = ai + 1; bi < top.size(); ++bi) {
        std::vector<VertexId> base;
        for (std::size_t k = 0; k < top.size(); ++k)
          if (k != ai && k != bi) base.push_back(top[k]);
        std::vector<VertexId> via_a = base, via_b = base;
        via_a.insert(std::lower_bound(via_a.begin(), via_a.end(), top[ai]), top[ai]);
        via_b.insert(std::lower_bound(via_b.begin(), via_b.end(), top[bi]), top[bi]);
        const int s = poset_.node_id(base);
        const int na = poset_.node_id(via_a);
        const int nb = poset_.node_id(via_b);
        const Eigen::MatrixXd m1 =
            hasse_maps_[poset_.cover_id(na, t)] * hasse_maps_[poset_.cover_id(s, na)];
        const Eigen::MatrixXd m2 =
            hasse_maps_[poset_.cover_id(nb, t)] * hasse_maps_[poset_.cover_id(s, nb)];
        const double res = m1.size() == 0 ? 0.0 : (m1 - m2).cwiseAbs().maxCoeff();
        if (res > report.worst_residual) {
          report.worst_residual = res;
          report.worst_square = hypergraph_.support_key(poset_.nodes[s]) + " -> " +
                                hypergraph_.support_key(poset_.nodes[t]) + " via " +
                                hypergraph_.vertex_name(top[ai]) + "," +
                                hypergraph_.vertex_name(top[bi]);
        }
      }
    }
  }
  return report;
}

Eigen::MatrixXd CellularSheaf::gram(int node) const {
  auto it = grams_.find(node);
  if (it != grams_.end()) return it->second;
  return Eigen::MatrixXd::Identity(stalk_dims_[node], stalk_dims_[node]);
}

Eigen::MatrixXd CellularSheaf::restriction(int sub_node, int super_node) const {
  const auto& sub = poset_.nodes.at(sub_node).members;
  const auto& sup = poset_.nodes.at(super_node).members;
  if (!std::includes(sup.begin(), sup.end(), sub.begin(), sub.end()))
    throw InputError("restriction requires nested supports");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(stalk_dims_[sub_node], stalk_dims_[sub_node]);
  std::vector<VertexId> missing;
  std::set_difference(sup.begin(), sup.end(), sub.begin(), sub.end(),
                      std::back_inserter(missing));
  std::vector<VertexId> current = sub;
  int current_node = sub_node;
  for (VertexId v : missing) {  // canonical chain: insert missing vertices ascending
    current.insert(std::lower_bound(current.begin(), current.end(), v), v);
    const int next_node = poset_.node_id(current);
    m = hasse_maps_[poset_.cover_id(current_node, next_node)] * m;
    current_node = next_node;
  }
  return m;
}

Eigen::MatrixXd CellularSheaf::restriction(const Support& sub, const Support& sup) const {
  return restriction(poset_.node_id_or_throw(sub), poset_.node_id_or_throw(sup));
}

CellularSheaf CellularSheaf::load(std::string_view json_text, const Hypergraph& h,
                                  double tol_fun, std::size_t node_cap) {
  auto doc = detail::parse_json_strict(json_text, "sheaf document");
  if (!doc.is_object()) throw InputError("sheaf document must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (key != "stalks" && key != "maps" && key != "gram")
      throw InputError("sheaf document: unknown key '" + key + "'");
  if (!doc.contains("stalks") || !doc["stalks"].is_object())
    throw InputError("sheaf document: missing 'stalks' object");

  SupportPoset poset = support_poset(h, node_cap);

  std::vector<int> dims(poset.node_count(), -1);
  for (const auto& [key, value] : doc["stalks"].items()) {
    const Support s = h.parse_support_key(key);
    const int node = poset.node_id(s.members);
    if (node < 0) throw InputError("stalk key '" + key + "' is not a poset node");
    if (!value.is_number_integer() || value.get<int>() < 0)
      throw InputError("stalk '" + key + "' must be a nonnegative integer");
    dims[node] = value.get<int>();
  }
  for (int i = 0; i < poset.node_count(); ++i)
    if (dims[i] < 0)
      throw InputError("missing stalk entry for support '" +
                       h.support_key(poset.nodes[i]) + "'");

  std::vector<Eigen::MatrixXd> maps(poset.covers.size());
  std::vector<bool> seen(poset.covers.size(), false);
  if (doc.contains("maps")) {
    if (!doc["maps"].is_object()) throw InputError("'maps' must be a JSON object");
    for (const auto& [key, value] : doc["maps"].items()) {
      const auto arrow = key.find("->");
      if (arrow == std::string::npos)
        throw InputError("map key '" + key + "' is not of the form 'S->T'");
      const Support sub = h.parse_support_key(key.substr(0, arrow));
      const Support sup = h.parse_support_key(key.substr(arrow + 2));
      const int sub_node = poset.node_id(sub.members);
      const int sup_node = poset.node_id(sup.members);
      if (sub_node < 0 || sup_node < 0)
        throw InputError("map key '" + key + "' references a non-node support");
      const int cover = poset.cover_id(sub_node, sup_node);
      if (cover < 0) throw InputError("map key '" + key + "' is not a Hasse cover");
      maps[cover] = parse_matrix(value, key);
      seen[cover] = true;
    }
  }
  for (std::size_t c = 0; c < poset.covers.size(); ++c)
    if (!seen[c])
      throw InputError("missing restriction map for cover '" +
                       h.support_key(poset.nodes[poset.covers[c].first]) + "->" +
                       h.support_key(poset.nodes[poset.covers[c].second]) + "'");

  std::map<int, Eigen::MatrixXd> grams;
  if (doc.contains("gram")) {
    if (!doc["gram"].is_object()) throw InputError("'gram' must be a JSON object");
    for (const auto& [key, value] : doc["gram"].items()) {
      const Support s = h.parse_support_key(key);
      const int node = poset.node_id(s.members);
      if (node < 0) throw InputError("gram key '" + key + "' is not a poset node");
      grams[node] = parse_matrix(value, key);
    }
  }
  return CellularSheaf(h, std::move(poset), std::move(dims), std::move(maps),
                       std::move(grams), tol_fun);
}

std::string CellularSheaf::to_json(int indent) const {
  detail::ordered_json doc;
  detail::ordered_json stalks = detail::ordered_json::object();
  for (int i = 0; i < poset_.node_count(); ++i)
    stalks[hypergraph_.support_key(poset_.nodes[i])] = stalk_dims_[i];
  doc["stalks"] = stalks;
  detail::ordered_json maps = detail::ordered_json::object();
  for (std::size_t c = 0; c < poset_.covers.size(); ++c) {
    const auto [sub, sup] = poset_.covers[c];
    maps[hypergraph_.support_key(poset_.nodes[sub]) + "->" +
         hypergraph_.support_key(poset_.nodes[sup])] = dump_matrix(hasse_maps_[c]);
  }
  doc["maps"] = maps;
  if (!grams_.empty()) {
    detail::ordered_json grams = detail::ordered_json::object();
    for (const auto& [node, g] : grams_)
      grams[hypergraph_.support_key(poset_.nodes[node])] = dump_matrix(g);
    doc["gram"] = grams;
  }
  return doc.dump(indent);
}

CellularSheaf constant_sheaf(const Hypergraph& h, int dim, std::size_t node_cap) {
  if (dim < 0) throw InputError("constant sheaf dimension must be nonnegative");
  SupportPoset poset = support_poset(h, node_cap);
  std::vector<int> dims(poset.node_count(), dim);
  std::vector<Eigen::MatrixXd> maps(poset.covers.size(), Eigen::MatrixXd::Identity(dim, dim));
  return CellularSheaf(h, std::move(poset), std::move(dims), std::move(maps));
}

CellularSheaf twisted_sheaf(const Hypergraph& h, int dim, std::uint64_t seed,
                            std::size_t node_cap) {
  if (dim < 0) throw InputError("twisted sheaf dimension must be nonnegative");
  SupportPoset poset = support_poset(h, node_cap);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<Eigen::MatrixXd> q;
  q.reserve(poset.node_count());
  for (int i = 0; i < poset.node_count(); ++i) q.push_back(random_orthogonal(dim, rng));
  std::vector<int> dims(poset.node_count(), dim);
  std::vector<Eigen::MatrixXd> maps;
  maps.reserve(poset.covers.size());
  for (const auto& [sub, sup] : poset.covers) maps.push_back(q[sup] * q[sub].transpose());
  return CellularSheaf(h, std::move(poset), std::move(dims), std::move(maps));
}

CellularSheaf skyscraper_sheaf(const Hypergraph& h, const Support& base, int dim,
                               std::size_t node_cap) {
  if (dim < 0) throw InputError("skyscraper dimension must be nonnegative");
  SupportPoset poset = support_poset(h, node_cap);
  for (VertexId v : base.members)
    if (v < 0 || v >= h.vertex_count())
      throw InputError("skyscraper base references an unknown vertex");
  if (poset.node_id(base.members) < 0)
    throw InputError("skyscraper base '" + h.support_key(base) + "' is not a valid support");
  std::vector<int> dims(poset.node_count(), 0);
  for (int i = 0; i < poset.node_count(); ++i)
    if (base.subset_of(poset.nodes[i])) dims[i] = dim;
  std::vector<Eigen::MatrixXd> maps;
  maps.reserve(poset.covers.size());
  for (const auto& [sub, sup] : poset.covers) {
    if (dims[sub] == dim && dims[sup] == dim && dim > 0)
      maps.push_back(Eigen::MatrixXd::Identity(dim, dim));
    else
      maps.push_back(Eigen::MatrixXd::Zero(dims[sup], dims[sub]));
  }
  return CellularSheaf(h, std::move(poset), std::move(dims), std::move(maps));
}

CellularSheaf direct_sum_sheaf(const CellularSheaf& a, const CellularSheaf& b) {
  if (!(a.poset() == b.poset()) || a.hypergraph().to_json() != b.hypergraph().to_json())
    throw InputError("direct sum requires sheaves over the same hypergraph");
  const auto& poset = a.poset();
  std::vector<int> dims(poset.node_count());
  for (int i = 0; i < poset.node_count(); ++i) dims[i] = a.stalk_dim(i) + b.stalk_dim(i);
  std::vector<Eigen::MatrixXd> maps;
  maps.reserve(poset.covers.size());
  for (std::size_t c = 0; c < poset.covers.size(); ++c) {
    const auto [sub, sup] = poset.covers[c];
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dims[sup], dims[sub]);
    m.topLeftCorner(a.stalk_dim(sup), a.stalk_dim(sub)) = a.hasse_map(static_cast<int>(c));
    m.bottomRightCorner(b.stalk_dim(sup), b.stalk_dim(sub)) = b.hasse_map(static_cast<int>(c));
    maps.push_back(std::move(m));
  }
  std::map<int, Eigen::MatrixXd> grams;
  if (a.has_custom_gram() || b.has_custom_gram()) {
    for (int i = 0; i < poset.node_count(); ++i) {
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dims[i], dims[i]);
      g.topLeftCorner(a.stalk_dim(i), a.stalk_dim(i)) = a.gram(i);
      g.bottomRightCorner(b.stalk_dim(i), b.stalk_dim(i)) = b.gram(i);
      grams[i] = std::move(g);
    }
  }
  return CellularSheaf(a.hypergraph(), poset, std::move(dims), std::move(maps),
                       std::move(grams), std::min(a.tol_fun(), b.tol_fun()));
}

namespace {

// splits "k1=v1,k2=v2" at top level, respecting parentheses
std::vector<std::pair<std::string, std::string>> parse_params(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  int depth = 0;
  std::string current;
  auto flush = [&]() {
    if (current.empty()) return;
    const auto eq = current.find('=');
    if (eq == std::string::npos)
      throw InputError("generator parameter '" + current + "' is not of the form key=value");
    out.emplace_back(current.substr(0, eq), current.substr(eq + 1));
    current.clear();
  };
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      flush();
      continue;
    }
    current += ch;
  }
  if (depth != 0) throw InputError("unbalanced parentheses in generator spec");
  flush();
  return out;
}

std::string strip_parens(std::string_view s) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')')
    return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

}  // namespace

CellularSheaf generate_sheaf(const Hypergraph& h, std::string_view spec,
                             std::uint64_t default_seed, std::size_t node_cap) {
  const auto colon = spec.find(':');
  const std::string kind(colon == std::string_view::npos ? spec : spec.substr(0, colon));
  const std::string params(colon == std::string_view::npos ? "" : spec.substr(colon + 1));
  auto kv = parse_params(params);
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    for (auto it = kv.begin(); it != kv.end(); ++it)
      if (it->first == key) {
        std::string v = it->second;
        kv.erase(it);
        return v;
      }
    return std::nullopt;
  };
  auto finish = [&]() {
    if (!kv.empty())
      throw InputError("generator '" + kind + "': unknown parameter '" + kv.front().first + "'");
  };
  auto to_int = [&](const std::string& v, const std::string& key) {
    try {
      return std::stoi(v);
    } catch (...) {
      throw InputError("generator parameter '" + key + "' must be an integer");
    }
  };

  if (kind == "constant") {
    const int d = to_int(take("d").value_or("1"), "d");
    finish();
    return constant_sheaf(h, d, node_cap);
  }
  if (kind == "twisted") {
    const int d = to_int(take("d").value_or("2"), "d");
    const auto seed_str = take("seed");
    const std::uint64_t seed =
        seed_str ? static_cast<std::uint64_t>(std::stoull(*seed_str)) : default_seed;
    finish();
    return twisted_sheaf(h, d, seed, node_cap);
  }
  if (kind == "skyscraper") {
    const auto base_key = take("base");
    if (!base_key) throw InputError("generator 'skyscraper' needs base=<support key>");
    const int d = to_int(take("d").value_or("1"), "d");
    finish();
    return skyscraper_sheaf(h, h.parse_support_key(*base_key), d, node_cap);
  }
  if (kind == "direct_sum") {
    const auto a = take("a"), b = take("b");
    if (!a || !b)
      throw InputError("generator 'direct_sum' needs a=(<spec>) and b=(<spec>)");
    finish();
    return direct_sum_sheaf(generate_sheaf(h, strip_parens(*a), default_seed, node_cap),
                            generate_sheaf(h, strip_parens(*b), default_seed + 1, node_cap));
  }
  throw InputError("unknown sheaf generator kind '" + kind + "'");
}

SectionSpace sections(const CellularSheaf& sheaf, const OpenSet& open_set, double tol_rank) {
  if (open_set.generators.empty()) throw InputError("sections over the empty open set");
  const auto& poset = sheaf.poset();
  std::vector<int> gen_nodes;
  for (const auto& g : open_set.generators) gen_nodes.push_back(poset.node_id_or_throw(g));

  SectionSpace space;
  for (int i = 0; i < poset.node_count(); ++i) {
    for (int g : gen_nodes) {
      if (poset.nodes[g].subset_of(poset.nodes[i])) {
        space.nodes.push_back(i);
        break;
      }
    }
  }
  std::vector<int> position(poset.node_count(), -1);
  space.offsets.assign(1, 0);
  for (std::size_t k = 0; k < space.nodes.size(); ++k) {
    position[space.nodes[k]] = static_cast<int>(k);
    space.offsets.push_back(space.offsets.back() + sheaf.stalk_dim(space.nodes[k]));
  }
  const int total = space.offsets.back();
  if (total == 0) {
    space.dimension = 0;
    space.basis.resize(0, 0);
    return space;
  }

  // stacked cover constraints inside the open set
  Eigen::Index rows = 0;
  std::vector<std::size_t> used_covers;
  for (std::size_t c = 0; c < poset.covers.size(); ++c) {
    const auto [sub, sup] = poset.covers[c];
    if (position[sub] >= 0 && position[sup] >= 0) {
      used_covers.push_back(c);
      rows += sheaf.stalk_dim(sup);
    }
  }
  if (rows == 0) {
    space.dimension = total;
    space.basis = Eigen::MatrixXd::Identity(total, total);
    return space;
  }
  Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(rows, total);
  Eigen::Index row = 0;
  for (std::size_t c : used_covers) {
    const auto [sub, sup] = poset.covers[c];
    const int dsub = sheaf.stalk_dim(sub), dsup = sheaf.stalk_dim(sup);
    constraints.block(row, space.offsets[position[sub]], dsup, dsub) =
        sheaf.hasse_map(static_cast<int>(c));
    constraints.block(row, space.offsets[position[sup]], dsup, dsup) =
        -Eigen::MatrixXd::Identity(dsup, dsup);
    row += dsup;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thresh = tol_rank * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  space.dimension = static_cast<int>(total - rank);
  space.basis = svd.matrixV().rightCols(total - rank);
  return space;
}

}  // namespace hyplap
