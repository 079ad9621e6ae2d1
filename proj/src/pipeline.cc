#include "ultratext/pipeline.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "ultratext/error.h"

namespace ultratext {
namespace {

Linkage linkage_of(const PipelineConfig& config) {
  return parse_linkage(config.criterion);
}

bool uses_sqeuclid(const PipelineConfig& config) {
  if (config.metric == "auto") return linkage_of(config) == Linkage::kWard;
  return config.metric == "sqeuclid";
}

// Keeps the rows and columns of m that have a nonzero total.
FrequencyMatrix drop_empty(const FrequencyMatrix& m, std::vector<std::string>&
                           dropped_rows, std::vector<std::string>& dropped_cols) {
  const auto zr = m.zero_rows();
  const auto zc = m.zero_cols();
  std::vector<Eigen::Index> rows, cols;
  FrequencyMatrix out;
  out.mode = m.mode;
  for (std::size_t i = 0; i < zr.size(); ++i) {
    if (zr[i]) {
      dropped_rows.push_back(m.row_ids[i]);
    } else {
      rows.push_back(static_cast<Eigen::Index>(i));
      out.row_ids.push_back(m.row_ids[i]);
    }
  }
  for (std::size_t j = 0; j < zc.size(); ++j) {
    if (zc[j]) {
      dropped_cols.push_back(m.col_ids[j]);
    } else {
      cols.push_back(static_cast<Eigen::Index>(j));
      out.col_ids.push_back(m.col_ids[j]);
    }
  }
  out.values = m.values(rows, cols);
  return out;
}

// Correspondence analysis of the doubled terms x segments table, re-exposed
// with segments as rows and terms as columns.
FactorEmbedding doubled_embedding(const FrequencyMatrix& counts) {
  std::vector<std::string> dropped_terms, dropped_segments;
  const FrequencyMatrix t =
      drop_empty(counts.transposed(), dropped_terms, dropped_segments);
  const FactorEmbedding ca = correspondence_analysis(double_profiles(t));

  FactorEmbedding view;
  view.eigenvalues = ca.eigenvalues;
  view.col_ids = ca.row_ids;
  view.col_coords = ca.row_coords;
  view.col_masses = ca.row_masses;
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < ca.col_ids.size(); ++j) {
    if (!ca.col_ids[j].ends_with("#c")) {
      keep.push_back(static_cast<Eigen::Index>(j));
      view.row_ids.push_back(ca.col_ids[j]);
    }
  }
  view.row_coords = ca.col_coords(keep, Eigen::all);
  view.row_masses = ca.col_masses(keep);
  view.dropped_rows = dropped_segments;
  view.dropped_cols = dropped_terms;
  for (const auto& id : ca.dropped_rows) view.dropped_cols.push_back(id);
  return view;
}

Json with_hash(const Json& body, const std::string& hash) {
  Json out;
  out["config_hash"] = hash;
  for (const auto& [key, value] : body.items()) out[key] = value;
  return out;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void PipelineConfig::validate() const {
  if (corpus.empty() && synthetic_n == 0) {
    throw DomainError("no corpus given");
  }
  parse_segmentation(segmentation, words_per_segment);
  const MatrixMode mode = parse_matrix_mode(matrix_mode);
  if (doubling && mode != MatrixMode::kCounts) {
    throw DomainError("doubling requires a counts matrix");
  }
  if (ca_vocabulary != "support" && ca_vocabulary != "all") {
    throw DomainError("unknown vocabulary: " + ca_vocabulary);
  }
  if (classifier != "coded" && classifier != "angle") {
    throw DomainError("unknown classifier: " + classifier);
  }
  parse_threshold_mode(threshold_mode);
  if (levels < 2) throw DomainError("levels must be at least 2");
  if (!(angle_tolerance >= 0) || !std::isfinite(angle_tolerance)) {
    throw DomainError("angle tolerance must be a nonnegative number");
  }
  if (scan_mode != "global" && scan_mode != "linear" && scan_mode != "both") {
    throw DomainError("unknown scan mode: " + scan_mode);
  }
  if (synthetic_n > 0 && scan_mode != "global") {
    throw DomainError("synthetic points support only the global scan");
  }
  if (budget == 0) throw DomainError("budget must be positive");
  parse_linkage(criterion);
  if (metric != "auto" && metric != "cvnc" && metric != "sqeuclid") {
    throw DomainError("unknown metric: " + metric);
  }
  parse_direction(direction);
  if (!(level_tolerance >= 0)) {
    throw DomainError("level tolerance must be nonnegative");
  }
  if (k == 0) throw DomainError("k must be at least 1");
  parse_column_coords(column_coords);
  if (synthetic_n > 0 && synthetic_dims == 0) {
    throw DomainError("synthetic points need at least one dimension");
  }
}

Json PipelineConfig::to_json() const {
  Json j;
  Json paths = Json::array();
  for (const auto& p : corpus) paths.push_back(p.generic_string());
  j["corpus"] = std::move(paths);
  j["segmentation"] = segmentation;
  j["words_per_segment"] = words_per_segment;
  j["support"] = support;
  j["min_frequency"] = min_frequency;
  j["matrix_mode"] = matrix_mode;
  j["doubling"] = doubling;
  j["ca_vocabulary"] = ca_vocabulary;
  j["classifier"] = classifier;
  j["threshold_mode"] = threshold_mode;
  j["levels"] = levels;
  j["angle_tolerance"] = angle_tolerance;
  j["scan_mode"] = scan_mode;
  j["budget"] = budget;
  j["seed"] = seed;
  j["criterion"] = criterion;
  j["metric"] = metric;
  j["direction"] = direction;
  j["level_tolerance"] = level_tolerance;
  j["k"] = k;
  j["column_coords"] = column_coords;
  j["synthetic_n"] = synthetic_n;
  j["synthetic_dims"] = synthetic_dims;
  return j;
}

std::string PipelineConfig::hash() const { return fnv1a_hex(to_json().dump()); }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Analysis analyse_corpus(const PipelineConfig& config) {
  Analysis a;
  auto [corpus, segments] = load_and_segment(
      config.corpus,
      parse_segmentation(config.segmentation, config.words_per_segment));
  a.corpus = std::move(corpus);
  a.segments = std::move(segments);

  if (config.support == "heuristic") {
    HeuristicSupportOptions opts;
    opts.min_frequency = config.min_frequency;
    a.support = heuristic_support(a.corpus, opts);
  } else {
    a.support = load_support(config.support);
  }
  a.vocabulary =
      config.ca_vocabulary == "all" ? vocabulary(a.corpus) : a.support;

  a.counts = build_frequency_matrix(a.segments, a.vocabulary, MatrixMode::kCounts);
  if (config.doubling) {
    a.embedding = doubled_embedding(a.counts);
  } else {
    const MatrixMode mode = parse_matrix_mode(config.matrix_mode);
    a.embedding =
        mode == MatrixMode::kCounts
            ? correspondence_analysis(a.counts)
            : correspondence_analysis(
                  build_frequency_matrix(a.segments, a.vocabulary, mode));
  }

  std::unordered_map<std::string_view, Eigen::Index> col;
  for (std::size_t j = 0; j < a.embedding.col_ids.size(); ++j) {
    col[a.embedding.col_ids[j]] = static_cast<Eigen::Index>(j);
  }
  std::vector<Eigen::Index> rows;
  for (const auto& term : a.support.terms()) {
    auto it = col.find(term);
    if (it == col.end()) continue;
    a.term_ids.push_back(term);
    rows.push_back(it->second);
  }
  if (a.term_ids.size() < 3) {
    throw DomainError("fewer than 3 support terms occur in the corpus");
  }
  a.term_coords = a.embedding.col_coords(rows, Eigen::all);
  return a;
}

Eigen::MatrixXd coords_of(const Analysis& analysis,
                          std::span<const std::string> terms) {
  std::unordered_map<std::string_view, Eigen::Index> index;
  for (std::size_t i = 0; i < analysis.term_ids.size(); ++i) {
    index[analysis.term_ids[i]] = static_cast<Eigen::Index>(i);
  }
  std::vector<Eigen::Index> rows;
  for (const auto& t : terms) {
    auto it = index.find(t);
    if (it == index.end()) throw DomainError("term has no coordinates: " + t);
    rows.push_back(it->second);
  }
  return analysis.term_coords(rows, Eigen::all);
}

RecodeOptions recode_options(const PipelineConfig& config) {
  RecodeOptions o;
  o.mode = parse_threshold_mode(config.threshold_mode);
  o.levels = config.levels;
  o.threads = config.threads;
  return o;
}

ConfiguredClassifier make_classifier(const PipelineConfig& config,
                                     const Eigen::MatrixXd& coords,
                                     std::vector<std::string> ids) {
  ConfiguredClassifier c;
  if (config.classifier == "angle") {
    c.classifier =
        std::make_unique<AngleClassifier>(coords, config.angle_tolerance);
  } else {
    c.coded = std::make_unique<CodedDistanceMatrix>(
        recode_coordinates(coords, std::move(ids), recode_options(config)));
    c.classifier = std::make_unique<CodedClassifier>(*c.coded);
  }
  return c;
}

Eigen::MatrixXd synthetic_points(std::size_t n, std::size_t dims,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(dims));
  // Box-Muller keeps the stream identical across standard libraries.
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index a = 0; a < x.cols(); ++a) {
      const double u = 1.0 - uniform01(rng);
      const double v = uniform01(rng);
      x(i, a) = std::sqrt(-2.0 * std::log(u)) *
                std::cos(2.0 * std::numbers::pi * v);
    }
  }
  return x;
}

FingerprintResult fingerprint(const Analysis& analysis,
                              const PipelineConfig& config) {
  const bool global = config.scan_mode != "linear";
  const bool linear = config.scan_mode != "global";
  ScanOptions scan;
  scan.budget = config.budget;
  scan.seed = config.seed;
  scan.threads = config.threads;

  FingerprintResult result;
  const auto all = make_classifier(config, analysis.term_coords,
                                   analysis.term_ids);
  const SupportSet placed(analysis.term_ids);
  const ReducedDocument reduced = reduce_document(analysis.corpus, placed);
  if (global) result.global = scan_global(*all.classifier, scan);
  if (linear && reduced.length() >= 3) {
    result.linear = scan_linear(reduced, analysis.term_ids, *all.classifier);
  }

  for (std::size_t d = 0; d < analysis.corpus.documents.size(); ++d) {
    FingerprintResult::PerText text;
    text.text = analysis.corpus.documents[d].id;
    ReducedDocument own;
    for (const auto& t : reduced.terms) {
      if (t.document != d) continue;
      ReducedTerm copy = t;
      copy.position = own.terms.size();
      own.terms.push_back(std::move(copy));
    }
    if (global) {
      // Terms of this text in support order.
      SupportSet present;
      for (const auto& t : own.terms) present.add(t.term);
      std::vector<std::string> terms;
      for (const auto& t : analysis.term_ids) {
        if (present.contains(t)) terms.push_back(t);
      }
      if (terms.size() >= 3) {
        const auto sub = make_classifier(config, coords_of(analysis, terms),
                                         terms);
        text.global = scan_global(*sub.classifier, scan);
      }
    }
    if (linear && own.length() >= 3) {
      text.linear = scan_linear(own, analysis.term_ids, *all.classifier);
    }
    result.texts.push_back(std::move(text));
  }
  return result;
}

UltrametricityReport fingerprint_synthetic(const PipelineConfig& config) {
  const Eigen::MatrixXd x =
      synthetic_points(config.synthetic_n, config.synthetic_dims, config.seed);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < config.synthetic_n; ++i) {
    ids.push_back("p" + std::to_string(i));
  }
  ScanOptions scan;
  scan.budget = config.budget;
  scan.seed = config.seed;
  scan.threads = config.threads;
  const auto c = make_classifier(config, x, std::move(ids));
  return scan_global(*c.classifier, scan);
}

Eigen::MatrixXd term_dissimilarity(const Analysis& analysis,
                                   const PipelineConfig& config) {
  if (uses_sqeuclid(config)) {
    return squared_distances(analysis.term_coords, config.threads);
  }
  if (parse_threshold_mode(config.threshold_mode) != ThresholdMode::kGlobalMean) {
    throw DomainError("clustering on codes needs the global-mean threshold");
  }
  const CodedDistanceMatrix coded = recode_coordinates(
      analysis.term_coords, analysis.term_ids, recode_options(config));
  return coded.to_matrix().cast<double>();
}

Dendrogram cluster_terms(const Analysis& analysis,
                         const PipelineConfig& config) {
  return agglomerate(term_dissimilarity(analysis, config), linkage_of(config),
                     analysis.term_ids);
}

std::vector<SubsumptionTriple> corpus_triples(const Analysis& analysis,
                                              const PipelineConfig& config) {
  if (parse_threshold_mode(config.threshold_mode) != ThresholdMode::kGlobalMean) {
    throw DomainError("triples need the global-mean threshold");
  }
  const CodedDistanceMatrix coded = recode_coordinates(
      analysis.term_coords, analysis.term_ids, recode_options(config));
  const SupportSet placed(analysis.term_ids);
  return extract_subsumption_triples(reduce_document(analysis.corpus, placed),
                                     coded);
}

void write_bundle(const Analysis& analysis, const ConceptHierarchy& hierarchy,
                  const PipelineConfig& config,
                  const std::filesystem::path& dir) {
  const std::string hash = config.hash();
  std::filesystem::create_directories(dir);
  write_file(dir / "embedding.json",
             dump(with_hash(to_json(analysis.embedding), hash)));
  write_file(dir / "hierarchy.json", dump(with_hash(to_json(hierarchy), hash)));
  std::ostringstream tsv;
  write_tsv(analysis.counts, tsv);
  write_file(dir / "matrix.tsv", tsv.str());

  Json segs = Json::array();
  for (std::size_t i = 0; i < analysis.segments.segments.size(); ++i) {
    const Segment& s = analysis.segments.segments[i];
    segs.push_back({{"id", s.id},
                    {"document", analysis.corpus.documents[s.document].id},
                    {"ordinal", s.ordinal},
                    {"text", std::string(analysis.segments.text(analysis.corpus, i))}});
  }
  Json segments;
  segments["segments"] = std::move(segs);
  write_file(dir / "segments.json", dump(with_hash(segments, hash)));
  write_file(dir / "config.json", dump(with_hash(config.to_json(), hash)));
}

Json stamped(const Json& body, const PipelineConfig& config) {
  return with_hash(body, config.hash());
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error writing file: " + path.string());
}

}  // namespace ultratext
