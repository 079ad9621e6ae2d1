#include "ultratext/serialize.h"

#include <charconv>
#include <ostream>

#include "ultratext/error.h"

namespace ultratext {
namespace {

Json proportions_json(const ClassProportions& p, bool with_trivial) {
  Json j;
  if (with_trivial) j["trivial"] = p.trivial;
  j["equilateral"] = p.equilateral;
  j["isosceles"] = p.isosceles;
  j["nonUM"] = p.non_ultrametric;
  return j;
}

Json points_json(const std::vector<std::string>& ids,
                 const Eigen::MatrixXd& coords, const Eigen::VectorXd& masses) {
  Json out = Json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    Json c = Json::array();
    for (Eigen::Index a = 0; a < coords.cols(); ++a) c.push_back(coords(r, a));
    Json point;
    point["id"] = ids[i];
    point["mass"] = masses(r);
    point["coords"] = std::move(c);
    out.push_back(std::move(point));
  }
  return out;
}

void points_from_json(const Json& arr, Eigen::Index rank,
                      std::vector<std::string>& ids, Eigen::MatrixXd& coords,
                      Eigen::VectorXd& masses) {
  const auto n = static_cast<Eigen::Index>(arr.size());
  coords.resize(n, rank);
  masses.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& p = arr.at(static_cast<std::size_t>(i));
    ids.push_back(p.at("id").get<std::string>());
    masses(i) = p.value("mass", 0.0);
    const Json& c = p.at("coords");
    if (static_cast<Eigen::Index>(c.size()) != rank) {
      throw DomainError("point " + ids.back() + " has wrong dimension");
    }
    for (Eigen::Index a = 0; a < rank; ++a) {
      coords(i, a) = c.at(static_cast<std::size_t>(a)).get<double>();
    }
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Json to_json(const UltrametricityReport& report) {
  Json j;
  j["mode"] = to_string(report.mode);
  j["classifier"] = report.classifier;
  j["n"] = report.n;
  j["total"] = report.total_considered();
  j["counts"] = {{"trivial", report.counts.trivial},
                 {"equilateral", report.counts.equilateral},
                 {"isosceles", report.counts.isosceles},
                 {"nonUM", report.counts.non_ultrametric}};
  j["proportions"] = proportions_json(report.proportions(), true);
  j["nontrivial_proportions"] =
      proportions_json(report.nontrivial_proportions(), false);
  j["index"] = report.index();
  j["index_defined"] = report.index_defined();
  if (report.seed) j["seed"] = *report.seed;
  if (report.budget) j["budget"] = *report.budget;
  if (report.unique_triplets) {
    j["unique_triplets"] = *report.unique_triplets;
    j["unique_ultrametric"] = report.unique_ultrametric.value_or(0);
    if (auto u = report.unique_index()) {
      j["unique_index"] = *u;
    } else {
      j["unique_index"] = nullptr;
    }
  }
  return j;
}

Json to_json(const FactorEmbedding& embedding) {
  Json j;
  j["rank"] = embedding.rank();
  Json ev = Json::array();
  for (Eigen::Index a = 0; a < embedding.rank(); ++a) {
    ev.push_back(embedding.eigenvalues(a));
  }
  j["eigenvalues"] = std::move(ev);
  j["rows"] = points_json(embedding.row_ids, embedding.row_coords,
                          embedding.row_masses);
  j["cols"] = points_json(embedding.col_ids, embedding.col_coords,
                          embedding.col_masses);
  j["dropped"] = {{"rows", embedding.dropped_rows},
                  {"cols", embedding.dropped_cols}};
  return j;
}

FactorEmbedding embedding_from_json(const Json& j) {
  FactorEmbedding e;
  const auto rank = j.at("rank").get<Eigen::Index>();
  const Json& ev = j.at("eigenvalues");
  if (static_cast<Eigen::Index>(ev.size()) != rank) {
    throw DomainError("eigenvalue count does not match rank");
  }
  e.eigenvalues.resize(rank);
  for (Eigen::Index a = 0; a < rank; ++a) {
    e.eigenvalues(a) = ev.at(static_cast<std::size_t>(a)).get<double>();
  }
  points_from_json(j.at("rows"), rank, e.row_ids, e.row_coords, e.row_masses);
  points_from_json(j.at("cols"), rank, e.col_ids, e.col_coords, e.col_masses);
  const Json& dropped = j.at("dropped");
  e.dropped_rows = dropped.at("rows").get<std::vector<std::string>>();
  e.dropped_cols = dropped.at("cols").get<std::vector<std::string>>();
  return e;
}

Json to_json(const Dendrogram& dendrogram) {
  Json j;
  j["labels"] = dendrogram.labels;
  j["canonical"] = dendrogram.canonical;
  Json merges = Json::array();
  for (const Merge& m : dendrogram.merges) {
    merges.push_back({{"left", m.left},
                      {"right", m.right},
                      {"level", m.level},
                      {"size", m.size}});
  }
  j["merges"] = std::move(merges);
  return j;
}

Dendrogram dendrogram_from_json(const Json& j) {
  Dendrogram d;
  d.labels = j.at("labels").get<std::vector<std::string>>();
  d.canonical = j.value("canonical", false);
  for (const Json& m : j.at("merges")) {
    d.merges.push_back({m.at("left").get<std::size_t>(),
                        m.at("right").get<std::size_t>(),
                        m.at("level").get<double>(),
                        m.at("size").get<std::size_t>()});
  }
  validate(d);
  return d;
}

Json to_json(const ConceptHierarchy& hierarchy) {
  Json j;
  j["direction"] = to_string(hierarchy.direction);
  Json nodes = Json::array();
  for (const auto& n : hierarchy.nodes) {
    nodes.push_back({{"id", n.id},
                     {"label", n.label},
                     {"members", n.members},
                     {"level", n.level},
                     {"peers", n.peers}});
  }
  j["nodes"] = std::move(nodes);
  Json arcs = Json::array();
  for (const auto& a : hierarchy.arcs) {
    arcs.push_back({{"from", a.from}, {"to", a.to}});
  }
  j["arcs"] = std::move(arcs);
  return j;
}

ConceptHierarchy hierarchy_from_json(const Json& j) {
  ConceptHierarchy h;
  h.direction = parse_direction(j.value("direction", "later"));
  for (const Json& n : j.at("nodes")) {
    ConceptNode node;
    node.id = n.at("id").get<std::string>();
    node.label = n.at("label").get<std::string>();
    node.members = n.at("members").get<std::vector<std::string>>();
    node.level = n.at("level").get<double>();
    node.peers = n.at("peers").get<std::vector<std::string>>();
    h.nodes.push_back(std::move(node));
  }
  for (const Json& a : j.at("arcs")) {
    h.arcs.push_back({a.at("from").get<std::string>(),
                      a.at("to").get<std::string>()});
  }
  return h;
}

Json to_json(const SubsumptionTriple& triple) {
  Json j;
  j["pair"] = {triple.x, triple.y};
  j["apex"] = triple.apex;
  j["positions"] = triple.positions;
  return j;
}

Json to_json(const NearestTermsResult& result) {
  Json j;
  j["query"] = result.query;
  j["k"] = result.k;
  Json rows = Json::array();
  for (const auto& [term, d2] : result.results) {
    rows.push_back({{"term", term}, {"d2", d2}});
  }
  j["results"] = std::move(rows);
  return j;
}

Json to_json(const PromotedTree& tree) {
  Json j;
  Json nodes = Json::array();
  const std::size_t internal = tree.internal_label.size();
  for (std::size_t r = 0; r < internal; ++r) {
    Json node;
    node["rank"] = r + 1;
    node["label"] = tree.labels[tree.internal_label[r]];
    if (tree.arc_target[r] == internal) {
      node["parent"] = "root";
    } else {
      node["parent"] = tree.arc_target[r] + 1;
    }
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  j["root_label"] = tree.labels[tree.root_label];
  return j;
}

void write_merge_tsv(const Dendrogram& dendrogram, std::ostream& out) {
  out << "left\tright\tlevel\tsize\n";
  for (const Merge& m : dendrogram.merges) {
    out << m.left << '\t' << m.right << '\t' << format_number(m.level) << '\t'
        << m.size << '\n';
  }
}

void write_jsonl(std::span<const SubsumptionTriple> triples,
                 std::ostream& out) {
  for (const auto& t : triples) out << to_json(t).dump() << '\n';
}

std::string dump(const Json& j) {
  return j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

}  // namespace ultratext
