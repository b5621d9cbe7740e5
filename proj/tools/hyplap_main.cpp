#include <CLI11.hpp>
#include <Eigen/SVD>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hyplap/complex.hpp"
#include "hyplap/laplacian.hpp"
#include "hyplap/sheaf.hpp"

namespace {

constexpr const char* kVersion = "hyplap 0.1.0";

using hyplap::AssembledMatrix;
using hyplap::CellularSheaf;
using hyplap::Hypergraph;
using hyplap::Variant;
using hyplap::VertexOrder;
using ojson = nlohmann::ordered_json;

struct Config {
  std::string hypergraph_path;
  std::string sheaf_path;
  std::string generate_spec;
  std::string vertex_order_path;
  int max_dim = 3;
  int degree = 0;
  std::string variant = "ordered";
  std::string route = "oracle";
  std::uint64_t seed = 0;
  double tol_fun = hyplap::kTolFun;
  double tol_rank = hyplap::kTolRank;
  double tol_spec = hyplap::kTolSpec;
  std::size_t basis_cap = hyplap::kDefaultBasisCap;
  std::string out_path;
  std::string generators;
  std::vector<std::string> ingest;
  bool csv = false;
  bool list = false;
  bool harmonic = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hyplap::InputError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) throw hyplap::InputError("cannot write file '" + cfg.out_path + "'");
  out << text << "\n";
}

ojson config_echo(const Config& cfg) {
  ojson j;
  j["hypergraph"] = cfg.hypergraph_path;
  if (!cfg.sheaf_path.empty()) j["sheaf"] = cfg.sheaf_path;
  if (!cfg.generate_spec.empty()) j["generate"] = cfg.generate_spec;
  if (!cfg.vertex_order_path.empty()) j["vertex_order"] = cfg.vertex_order_path;
  j["max_dim"] = cfg.max_dim;
  j["degree"] = cfg.degree;
  j["variant"] = cfg.variant;
  j["route"] = cfg.route;
  j["seed"] = cfg.seed;
  j["basis_cap"] = cfg.basis_cap;
  j["tolerances"] = {{"tol_fun", cfg.tol_fun}, {"tol_rank", cfg.tol_rank},
                     {"tol_spec", cfg.tol_spec}};
  return j;
}

struct Inputs {
  Hypergraph h;
  CellularSheaf sheaf;
  VertexOrder order;
};

Inputs load_inputs(const Config& cfg) {
  Hypergraph h = Hypergraph::parse(read_file(cfg.hypergraph_path));
  VertexOrder order = VertexOrder::lexicographic(h);
  if (!cfg.vertex_order_path.empty()) {
    const auto doc = nlohmann::json::parse(read_file(cfg.vertex_order_path), nullptr, false);
    if (doc.is_discarded() || !doc.is_array())
      throw hyplap::InputError("vertex order file must hold a JSON array of names");
    std::vector<std::string> names;
    for (const auto& n : doc) names.push_back(n.get<std::string>());
    order = VertexOrder::from_names(h, names);
  }
  if (!cfg.sheaf_path.empty() && !cfg.generate_spec.empty())
    throw hyplap::InputError("--sheaf and --generate are mutually exclusive");
  CellularSheaf sheaf =
      !cfg.sheaf_path.empty()
          ? CellularSheaf::load(read_file(cfg.sheaf_path), h, cfg.tol_fun, cfg.basis_cap)
          : hyplap::generate_sheaf(h, cfg.generate_spec.empty() ? "constant:d=1"
                                                                : cfg.generate_spec,
                                   cfg.seed, cfg.basis_cap);
  return Inputs{std::move(h), std::move(sheaf), std::move(order)};
}

ojson basis_manifest(const Hypergraph& h, const hyplap::CochainSpace& space) {
  ojson j;
  j["variant"] = hyplap::to_string(space.variant);
  j["degree"] = space.degree;
  j["count"] = space.simplices.size();
  j["total_dim"] = space.total_dim();
  ojson basis = ojson::array();
  for (int i = 0; i < space.block_count(); ++i) {
    ojson entry;
    std::vector<std::string> tuple;
    for (hyplap::VertexId v : space.simplices[i].entries) tuple.push_back(h.vertex_name(v));
    entry["tuple"] = tuple;
    entry["offset"] = space.offsets[i];
    entry["dim"] = space.block_dim(i);
    basis.push_back(entry);
  }
  j["basis"] = basis;
  return j;
}

ojson triplets_json(const Eigen::SparseMatrix<double>& mat) {
  std::vector<Eigen::Triplet<double>> entries;
  for (int k = 0; k < mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
      if (it.value() != 0.0) entries.emplace_back(it.row(), it.col(), it.value());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  ojson out = ojson::array();
  for (const auto& t : entries) out.push_back({t.row(), t.col(), t.value()});
  return out;
}

ojson matrix_document(const Config& cfg, const Hypergraph& h, const AssembledMatrix& m) {
  ojson j;
  j["version"] = kVersion;
  j["config"] = config_echo(cfg);
  j["rows"] = basis_manifest(h, m.rows);
  j["cols"] = basis_manifest(h, m.cols);
  j["shape"] = {m.mat.rows(), m.mat.cols()};
  j["triplets"] = triplets_json(m.mat);
  return j;
}

int cmd_validate(const Config& cfg) {
  Hypergraph h = Hypergraph::parse(read_file(cfg.hypergraph_path));
  const auto poset = hyplap::support_poset(h, cfg.basis_cap);
  ojson j;
  j["version"] = kVersion;
  j["valid"] = true;
  j["vertices"] = h.vertex_count();
  j["edges"] = h.edge_count();
  j["poset_nodes"] = poset.node_count();
  j["canonical"] = nlohmann::ordered_json::parse(h.to_json());
  if (!cfg.sheaf_path.empty()) {
    const auto sheaf = CellularSheaf::load(read_file(cfg.sheaf_path), h, cfg.tol_fun,
                                           cfg.basis_cap);
    j["sheaf"] = {{"loaded", true},
                  {"functoriality_residual", sheaf.functoriality_residual().worst_residual}};
  }
  emit(cfg, j.dump(2));
  return 0;
}

int cmd_simplices(const Config& cfg) {
  const Hypergraph h = Hypergraph::parse(read_file(cfg.hypergraph_path));
  ojson degrees;
  for (int k = 0; k <= cfg.max_dim; ++k) {
    const auto simplices = hyplap::enumerate_simplices(h, k, cfg.basis_cap);
    ojson entry;
    entry["count"] = simplices.size();
    if (cfg.list) {
      ojson tuples = ojson::array();
      for (const auto& s : simplices) {
        std::vector<std::string> names;
        for (hyplap::VertexId v : s.entries) names.push_back(h.vertex_name(v));
        tuples.push_back(names);
      }
      entry["tuples"] = tuples;
    }
    degrees[std::to_string(k)] = entry;
  }
  ojson j;
  j["version"] = kVersion;
  j["config"] = config_echo(cfg);
  j["degrees"] = degrees;
  emit(cfg, j.dump(2));
  return 0;
}

int cmd_coboundary(const Config& cfg) {
  const Inputs in = load_inputs(cfg);
  const auto delta = hyplap::coboundary(in.h, in.sheaf, cfg.degree,
                                        hyplap::variant_from_string(cfg.variant), in.order,
                                        cfg.basis_cap);
  emit(cfg, matrix_document(cfg, in.h, delta).dump(2));
  return 0;
}

int cmd_laplacian(const Config& cfg) {
  const Inputs in = load_inputs(cfg);
  const auto lap = hyplap::laplacian(in.h, in.sheaf, cfg.degree,
                                     hyplap::variant_from_string(cfg.variant),
                                     hyplap::route_from_string(cfg.route), in.order,
                                     cfg.basis_cap);
  emit(cfg, matrix_document(cfg, in.h, lap).dump(2));
  return 0;
}

Eigen::Index rank_of_dense(const Eigen::MatrixXd& m, double tol_rank) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double t = tol_rank * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > t) ++r;
  return r;
}

int cmd_betti(const Config& cfg) {
  ojson betti;
  if (!cfg.ingest.empty()) {
    // verifier path: recompute betti numbers from emitted coboundary matrices
    std::vector<Eigen::MatrixXd> deltas;
    for (const auto& path : cfg.ingest) {
      const auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
      if (doc.is_discarded() || !doc.contains("shape") || !doc.contains("triplets"))
        throw hyplap::InputError("'" + path + "' is not an emitted coboundary document");
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(doc["shape"][0].get<Eigen::Index>(),
                                                doc["shape"][1].get<Eigen::Index>());
      for (const auto& t : doc["triplets"])
        m(t[0].get<Eigen::Index>(), t[1].get<Eigen::Index>()) = t[2].get<double>();
      if (!deltas.empty() && deltas.back().rows() != m.cols())
        throw hyplap::InputError("ingested matrices do not chain: '" + path + "'");
      deltas.push_back(std::move(m));
    }
    for (std::size_t q = 0; q < deltas.size(); ++q) {
      const Eigen::Index dim = deltas[q].cols();
      const Eigen::Index rk = rank_of_dense(deltas[q], cfg.tol_rank);
      const Eigen::Index rkm = q > 0 ? rank_of_dense(deltas[q - 1], cfg.tol_rank) : 0;
      betti[std::to_string(q)] = dim - rk - rkm;
    }
  } else {
    const Inputs in = load_inputs(cfg);
    for (int q = 0; q <= cfg.max_dim; ++q) {
      const auto report = hyplap::spectral_report(in.h, in.sheaf, q,
                                                  hyplap::variant_from_string(cfg.variant),
                                                  in.order, cfg.basis_cap, cfg.tol_rank);
      betti[std::to_string(q)] = report.betti;
    }
  }
  if (cfg.csv) {
    std::string csv = "degree,betti";
    for (const auto& [k, v] : betti.items()) csv += "\n" + k + "," + v.dump();
    emit(cfg, csv);
    return 0;
  }
  ojson j;
  j["version"] = kVersion;
  j["config"] = config_echo(cfg);
  j["betti"] = betti;
  emit(cfg, j.dump(2));
  return 0;
}

int cmd_spectrum(const Config& cfg) {
  const Inputs in = load_inputs(cfg);
  const auto report = hyplap::spectral_report(in.h, in.sheaf, cfg.degree,
                                              hyplap::variant_from_string(cfg.variant),
                                              in.order, cfg.basis_cap, cfg.tol_rank);
  if (cfg.csv) {
    std::string csv = "index,eigenvalue";
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i)
      csv += "\n" + std::to_string(i) + "," + ojson(report.eigenvalues[i]).dump();
    emit(cfg, csv);
    return 0;
  }
  ojson j;
  j["version"] = kVersion;
  j["config"] = config_echo(cfg);
  j["degree"] = cfg.degree;
  j["variant"] = cfg.variant;
  j["dim"] = report.dim;
  j["dense_path"] = report.dense_path;
  j["betti"] = report.betti;
  j["eigenvalues"] = report.eigenvalues;
  emit(cfg, j.dump(2));
  return 0;
}

int cmd_sections(const Config& cfg) {
  const Inputs in = load_inputs(cfg);
  hyplap::OpenSet open_set;
  if (cfg.generators.empty()) {
    for (const auto& name : in.h.vertex_names())
      open_set.generators.push_back(in.h.extended_structure(name));
  } else {
    std::stringstream ss(cfg.generators);
    std::string key;
    while (std::getline(ss, key, ','))
      open_set.generators.push_back(in.h.parse_support_key(key));
  }
  const auto space = hyplap::sections(in.sheaf, open_set, cfg.tol_rank);
  ojson j;
  j["version"] = kVersion;
  j["config"] = config_echo(cfg);
  j["dimension"] = space.dimension;
  std::vector<std::string> node_keys;
  for (int n : space.nodes) node_keys.push_back(in.h.support_key(in.sheaf.poset().nodes[n]));
  j["nodes"] = node_keys;
  if (cfg.list) {
    ojson basis = ojson::array();
    for (Eigen::Index i = 0; i < space.basis.rows(); ++i) {
      ojson row = ojson::array();
      for (Eigen::Index c = 0; c < space.basis.cols(); ++c) row.push_back(space.basis(i, c));
      basis.push_back(row);
    }
    j["basis"] = basis;
  }
  emit(cfg, j.dump(2));
  return 0;
}

int cmd_check(const Config& cfg) {
  const Inputs in = load_inputs(cfg);
  const Variant variants[] = {Variant::Unordered, Variant::Alternating, Variant::Ordered};
  ojson checks = ojson::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, const ojson& detail) {
    ojson c;
    c["name"] = name;
    c["pass"] = pass;
    c["detail"] = detail;
    checks.push_back(c);
    all_pass = all_pass && pass;
  };

  record("hypergraph-valid", true,
         {{"vertices", in.h.vertex_count()},
          {"edges", in.h.edge_count()},
          {"poset_nodes", in.sheaf.poset().node_count()}});

  const auto cech = hyplap::verify_cech(in.h, cfg.max_dim, cfg.basis_cap);
  record("cech-closedness", cech.pass(),
         {{"closed", cech.closed_ok},
          {"cech", cech.cech_ok},
          {"natural", cech.natural_ok},
          {"support_pairs", cech.support_pairs_checked},
          {"simplex_counts", cech.simplex_counts},
          {"cech_counts", cech.cech_counts},
          {"failures", cech.failures}});

  const auto fun = in.sheaf.functoriality_residual();
  record("sheaf-functoriality", fun.worst_residual <= cfg.tol_fun,
         {{"residual", fun.worst_residual}, {"worst_square", fun.worst_square}});

  {
    double worst = 0.0;
    for (Variant v : variants) {
      for (int k = 0; k + 1 <= cfg.max_dim; ++k) {
        const auto dk = hyplap::coboundary(in.h, in.sheaf, k, v, in.order, cfg.basis_cap);
        const auto dk1 = hyplap::coboundary(in.h, in.sheaf, k + 1, v, in.order, cfg.basis_cap);
        const Eigen::SparseMatrix<double> dd = dk1.mat * dk.mat;
        const AssembledMatrix composite{dk1.rows, dk.cols, dd};
        worst = std::max(worst, composite.max_abs());
      }
    }
    record("delta-squared-zero", worst <= 1e-12, {{"max_entry", worst}});
  }

  if (!in.sheaf.has_custom_gram()) {
    double worst = 0.0;
    for (Variant v : variants) {
      for (int k = 0; k <= std::min(2, cfg.max_dim); ++k) {
        const auto oracle = hyplap::laplacian(in.h, in.sheaf, k, v, hyplap::Route::Oracle,
                                              in.order, cfg.basis_cap);
        const auto formula = hyplap::laplacian(in.h, in.sheaf, k, v, hyplap::Route::Formula,
                                               in.order, cfg.basis_cap);
        const Eigen::SparseMatrix<double> diff = oracle.mat - formula.mat;
        const AssembledMatrix d{oracle.rows, oracle.cols, diff};
        worst = std::max(worst, d.max_abs());
      }
    }
    record("formula-oracle-laplacian", worst <= 1e-10, {{"max_entry", worst}});
  } else {
    record("formula-oracle-laplacian", true,
           {{"skipped", "formula route requires identity stalk inner products"}});
  }

  {
    bool equal = true;
    ojson table;
    for (int q = 0; q <= std::min(2, cfg.max_dim - 1); ++q) {
      std::vector<int> bettis;
      for (Variant v : variants)
        bettis.push_back(hyplap::spectral_report(in.h, in.sheaf, q, v, in.order, cfg.basis_cap,
                                                 cfg.tol_rank)
                             .betti);
      table[std::to_string(q)] = bettis;
      equal = equal && bettis[0] == bettis[1] && bettis[1] == bettis[2];
    }
    record("betti-cross-variant", equal, {{"betti", table}});
  }

  ojson j;
  j["version"] = kVersion;
  j["config"] = config_echo(cfg);
  j["checks"] = checks;
  j["pass"] = all_pass;
  emit(cfg, j.dump(2));
  return all_pass ? 0 : 1;
}

int cmd_report(const Config& cfg) {
  const Inputs in = load_inputs(cfg);
  const Variant variant = hyplap::variant_from_string(cfg.variant);
  ojson degrees;
  std::string csv = "degree,dim,delta_nnz,betti,eigenvalues";
  for (int k = 0; k <= cfg.max_dim; ++k) {
    const auto delta = hyplap::coboundary(in.h, in.sheaf, k, variant, in.order, cfg.basis_cap);
    const auto report = hyplap::spectral_report(in.h, in.sheaf, k, variant, in.order,
                                                cfg.basis_cap, cfg.tol_rank);
    ojson entry;
    entry["dim"] = report.dim;
    entry["delta_nnz"] = delta.nonzeros();
    entry["betti"] = report.betti;
    entry["betti_rank_check"] = report.betti_rank_check;
    const std::size_t n_eigs = std::min<std::size_t>(8, report.eigenvalues.size());
    entry["eigenvalues_smallest"] =
        std::vector<double>(report.eigenvalues.begin(), report.eigenvalues.begin() + n_eigs);
    if (cfg.harmonic) {
      ojson basis = ojson::array();
      for (Eigen::Index i = 0; i < report.harmonic_basis.rows(); ++i) {
        ojson row = ojson::array();
        for (Eigen::Index c = 0; c < report.harmonic_basis.cols(); ++c)
          row.push_back(report.harmonic_basis(i, c));
        basis.push_back(row);
      }
      entry["harmonic_basis"] = basis;
    }
    degrees[std::to_string(k)] = entry;

    csv += "\n" + std::to_string(k) + "," + std::to_string(report.dim) + "," +
           std::to_string(delta.nonzeros()) + "," + std::to_string(report.betti);
    for (std::size_t i = 0; i < n_eigs; ++i)
      csv += (i == 0 ? ",\"" : ";") + ojson(report.eigenvalues[i]).dump();
    if (n_eigs) csv += "\"";
  }
  if (cfg.csv) {
    emit(cfg, csv);
    return 0;
  }
  ojson j;
  j["version"] = kVersion;
  j["config"] = config_echo(cfg);
  j["variant"] = cfg.variant;
  j["degrees"] = degrees;
  emit(cfg, j.dump(2));
  return 0;
}

void add_common(CLI::App* cmd, Config& cfg, bool needs_sheaf) {
  cmd->add_option("--hypergraph", cfg.hypergraph_path, "hypergraph JSON path")->required();
  cmd->add_option("--basis-cap", cfg.basis_cap, "index-entry cap per degree");
  cmd->add_option("--max-dim", cfg.max_dim, "maximum simplex degree");
  cmd->add_option("--out", cfg.out_path, "write output to this path");
  cmd->add_option("--tol-fun", cfg.tol_fun, "functoriality tolerance");
  cmd->add_option("--tol-rank", cfg.tol_rank, "rank/null-space tolerance");
  cmd->add_option("--tol-spec", cfg.tol_spec, "spectral comparison tolerance");
  cmd->add_option("--vertex-order", cfg.vertex_order_path,
                  "JSON array of vertex names fixing the total order");
  if (needs_sheaf) {
    cmd->add_option("--sheaf", cfg.sheaf_path, "sheaf JSON path");
    cmd->add_option("--generate", cfg.generate_spec,
                    "sheaf generator KIND:PARAMS (constant, twisted, skyscraper, direct_sum)");
    cmd->add_option("--seed", cfg.seed, "seed for generated sheaves");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) +
               " — cellular sheaf coboundaries, Laplacians and spectra on the symmetric "
               "simplicial set of a hypergraph"};
  app.require_subcommand(1);
  Config cfg;

  auto* validate = app.add_subcommand("validate", "parse and validate inputs");
  add_common(validate, cfg, false);
  validate->add_option("--sheaf", cfg.sheaf_path, "sheaf JSON path");

  auto* simplices = app.add_subcommand("simplices", "enumerate K(H) degree by degree");
  add_common(simplices, cfg, false);
  simplices->add_flag("--list", cfg.list, "include the tuples");

  auto* coboundary = app.add_subcommand("coboundary", "assemble a coboundary matrix");
  add_common(coboundary, cfg, true);
  coboundary->add_option("--degree", cfg.degree, "cochain degree k")->required();
  coboundary->add_option("--variant", cfg.variant, "unordered|alternating|ordered");

  auto* laplacian = app.add_subcommand("laplacian", "assemble a sheaf Laplacian");
  add_common(laplacian, cfg, true);
  laplacian->add_option("--degree", cfg.degree, "cochain degree k")->required();
  laplacian->add_option("--variant", cfg.variant, "unordered|alternating|ordered");
  laplacian->add_option("--route", cfg.route, "oracle|formula");

  auto* betti = app.add_subcommand("betti", "Betti numbers per degree");
  add_common(betti, cfg, true);
  betti->add_option("--variant", cfg.variant, "unordered|alternating|ordered");
  betti->add_option("--ingest", cfg.ingest,
                    "recompute from emitted coboundary JSON files (degrees 0..K)")
      ->delimiter(',');
  betti->add_flag("--csv", cfg.csv, "emit CSV");

  auto* spectrum = app.add_subcommand("spectrum", "Laplacian eigenvalues");
  add_common(spectrum, cfg, true);
  spectrum->add_option("--degree", cfg.degree, "cochain degree k")->required();
  spectrum->add_option("--variant", cfg.variant, "unordered|alternating|ordered");
  spectrum->add_flag("--csv", cfg.csv, "emit CSV");

  auto* sections_cmd = app.add_subcommand("sections", "sections over an Alexandrov open set");
  add_common(sections_cmd, cfg, true);
  sections_cmd->add_option("--generators", cfg.generators,
                           "comma-separated support keys generating the open set "
                           "(default: the whole space)");
  sections_cmd->add_flag("--list", cfg.list, "include the section basis");

  auto* check = app.add_subcommand("check", "run the full invariant suite");
  add_common(check, cfg, true);

  auto* report = app.add_subcommand("report", "dims, sparsity, betti, spectra per degree");
  add_common(report, cfg, true);
  report->add_option("--variant", cfg.variant, "unordered|alternating|ordered");
  report->add_flag("--csv", cfg.csv, "emit CSV");
  report->add_flag("--harmonic", cfg.harmonic, "include harmonic bases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (*validate) return cmd_validate(cfg);
    if (*simplices) return cmd_simplices(cfg);
    if (*coboundary) return cmd_coboundary(cfg);
    if (*laplacian) return cmd_laplacian(cfg);
    if (*betti) return cmd_betti(cfg);
    if (*spectrum) return cmd_spectrum(cfg);
    if (*sections_cmd) return cmd_sections(cfg);
    if (*check) return cmd_check(cfg);
    if (*report) return cmd_report(cfg);
  } catch (const hyplap::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hyplap::CheckError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
