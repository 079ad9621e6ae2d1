#include "ultratext/service.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>

#include "ultratext/error.h"
#include "ultratext/schema.h"

namespace ultratext {
namespace {

std::string error_body(std::string_view message) {
  Json j;
  j["error"] = message;
  return j.dump();
}

std::string hash_of(const Json& j, const char* file) {
  if (!j.is_object() || !j.contains("config_hash") ||
      !j["config_hash"].is_string()) {
    throw DomainError(std::string(file) + " has no config_hash");
  }
  return j["config_hash"].get<std::string>();
}

Json load_json_object(const std::filesystem::path& path) {
  Json j = load_json(path);
  if (!j.is_object()) {
    throw DomainError(path.filename().string() + " is not a JSON object");
  }
  return j;
}

}  // namespace

AnalysisBundle AnalysisBundle::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("bundle directory not found: " + dir.string());
  }
  AnalysisBundle b;
  try {
    const Json config = load_json_object(dir / "config.json");
    b.config_hash = hash_of(config, "config.json");

    const Json embedding = load_json_object(dir / "embedding.json");
    if (hash_of(embedding, "embedding.json") != b.config_hash) {
      throw DomainError("embedding.json belongs to a different run");
    }
    b.embedding = embedding_from_json(embedding);

    const Json hierarchy = load_json_object(dir / "hierarchy.json");
    if (hash_of(hierarchy, "hierarchy.json") != b.config_hash) {
      throw DomainError("hierarchy.json belongs to a different run");
    }
    b.hierarchy = hierarchy_from_json(hierarchy);

    const Json segments = load_json_object(dir / "segments.json");
    if (hash_of(segments, "segments.json") != b.config_hash) {
      throw DomainError("segments.json belongs to a different run");
    }
    for (const Json& s : segments.at("segments")) {
      b.segments.push_back({s.at("id").get<std::string>(),
                            s.at("document").get<std::string>(),
                            s.at("ordinal").get<std::size_t>(),
                            s.at("text").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed bundle: ") + e.what());
  }

  std::ifstream tsv(dir / "matrix.tsv");
  if (!tsv) throw IoError("cannot read file: " + (dir / "matrix.tsv").string());
  b.matrix = read_tsv(tsv);
  b.check();
  return b;
}

void AnalysisBundle::check() const {
  const auto segments_size = static_cast<Eigen::Index>(segments.size());
  if (matrix.values.rows() != segments_size) {
    throw DomainError("matrix rows do not match the segment list");
  }
  std::unordered_set<std::string_view> segment_ids;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (matrix.row_ids[i] != segments[i].id) {
      throw DomainError("matrix row " + matrix.row_ids[i] +
                        " does not match segment " + segments[i].id);
    }
    if (!segment_ids.insert(segments[i].id).second) {
      throw DomainError("duplicate segment id: " + segments[i].id);
    }
  }
  for (const auto& id : embedding.row_ids) {
    if (!segment_ids.contains(id)) {
      throw DomainError("embedded segment missing from bundle: " + id);
    }
  }
  const std::unordered_set<std::string_view> terms(matrix.col_ids.begin(),
                                                   matrix.col_ids.end());
  std::unordered_set<std::string_view> placed;
  for (const auto& t : embedding.col_ids) {
    if (!terms.contains(t)) {
      throw DomainError("embedded term missing from matrix: " + t);
    }
    placed.insert(t);
  }
  std::unordered_set<std::string_view> node_ids;
  for (const auto& n : hierarchy.nodes) {
    if (!node_ids.insert(n.id).second) {
      throw DomainError("duplicate hierarchy node: " + n.id);
    }
    for (const auto& m : n.members) {
      if (!placed.contains(m)) {
        throw DomainError("hierarchy term has no map position: " + m);
      }
    }
  }
  for (const auto& n : hierarchy.nodes) {
    for (const auto& p : n.peers) {
      if (!node_ids.contains(p)) throw DomainError("unknown peer node: " + p);
    }
  }
  for (const auto& a : hierarchy.arcs) {
    if (!node_ids.contains(a.from) || !node_ids.contains(a.to)) {
      throw DomainError("hierarchy arc references an unknown node");
    }
  }
}

BundleService::BundleService(AnalysisBundle bundle)
    : bundle_(std::move(bundle)) {
  map_body_ = map().dump();
  Json h = to_json(bundle_.hierarchy);
  hierarchy_body_ = h.dump();
}

Json BundleService::map() const {
  const FactorEmbedding& e = bundle_.embedding;
  const auto coord = [&](const Eigen::MatrixXd& m, Eigen::Index i,
                         Eigen::Index axis) {
    return axis < m.cols() ? m(i, axis) : 0.0;
  };

  const auto depths = bundle_.hierarchy.dominance_depths();
  std::unordered_map<std::string_view, std::size_t> depth_of;
  for (std::size_t n = 0; n < bundle_.hierarchy.nodes.size(); ++n) {
    for (const auto& m : bundle_.hierarchy.nodes[n].members) {
      depth_of[m] = depths[n];
    }
  }

  Json terms = Json::array();
  for (std::size_t j = 0; j < e.col_ids.size(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    Json t;
    t["term"] = e.col_ids[j];
    t["x"] = coord(e.col_coords, r, 0);
    t["y"] = coord(e.col_coords, r, 1);
    auto it = depth_of.find(e.col_ids[j]);
    if (it == depth_of.end()) {
      t["dominance_level"] = nullptr;
    } else {
      t["dominance_level"] = it->second;
    }
    terms.push_back(std::move(t));
  }
  Json segments = Json::array();
  for (std::size_t i = 0; i < e.row_ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    segments.push_back({{"id", e.row_ids[i]},
                        {"x", coord(e.row_coords, r, 0)},
                        {"y", coord(e.row_coords, r, 1)}});
  }
  Json out;
  out["terms"] = std::move(terms);
  out["segments"] = std::move(segments);
  return out;
}

Json BundleService::term_segments(std::string_view term) const {
  const auto& cols = bundle_.matrix.col_ids;
  auto it = std::find(cols.begin(), cols.end(), term);
  if (it == cols.end()) return nullptr;
  const auto c = static_cast<Eigen::Index>(it - cols.begin());
  std::vector<std::pair<double, std::size_t>> hits;
  for (std::size_t i = 0; i < bundle_.segments.size(); ++i) {
    const double v = bundle_.matrix.values(static_cast<Eigen::Index>(i), c);
    if (v > 0) hits.emplace_back(v, i);
  }
  // Bundle order is segment order, so a stable sort keeps ordinal ties.
  std::stable_sort(hits.begin(), hits.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  Json out = Json::array();
  for (const auto& [count, i] : hits) {
    out.push_back({{"segment_id", bundle_.segments[i].id},
                   {"count", static_cast<std::uint64_t>(count)}});
  }
  return out;
}

Response BundleService::handle(std::string_view path) const {
  if (path == "/map") return {200, map_body_};
  if (path == "/hierarchy") return {200, hierarchy_body_};
  if (path == "/health") {
    Json j;
    j["ok"] = true;
    j["config_hash"] = bundle_.config_hash;
    return {200, j.dump()};
  }
  constexpr std::string_view kTerms = "/terms/";
  constexpr std::string_view kTermSuffix = "/segments";
  if (path.starts_with(kTerms) && path.ends_with(kTermSuffix) &&
      path.size() > kTerms.size() + kTermSuffix.size()) {
    const auto term = path.substr(
        kTerms.size(), path.size() - kTerms.size() - kTermSuffix.size());
    Json j = term_segments(term);
    if (j.is_null()) {
      return {404, error_body("unknown term: " + std::string(term))};
    }
    return {200, j.dump()};
  }
  constexpr std::string_view kSegments = "/segments/";
  if (path.starts_with(kSegments) && path.size() > kSegments.size()) {
    const auto id = path.substr(kSegments.size());
    for (const auto& s : bundle_.segments) {
      if (s.id == id) {
        Json j;
        j["id"] = s.id;
        j["text"] = s.text;
        return {200, j.dump(-1, ' ', false, Json::error_handler_t::replace)};
      }
    }
    return {404, error_body("unknown segment: " + std::string(id))};
  }
  return {404, error_body("not found")};
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const BundleService& service)
    : impl_(std::make_unique<Impl>()) {
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  impl_->server.Get(".*", [&service](const httplib::Request& req,
                                     httplib::Response& res) {
    const Response r = service.handle(req.path);
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace ultratext
