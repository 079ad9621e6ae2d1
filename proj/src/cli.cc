#include "ultratext/cli.h"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ultratext/error.h"
#include "ultratext/parallel.h"
#include "ultratext/pipeline.h"
#include "ultratext/service.h"

namespace ultratext {
namespace {

namespace fs = std::filesystem;

// Missing files are configuration errors, reported before any work.
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  PipelineConfig config;
  std::vector<std::string> texts;
  unsigned threads = 0;
  bool synthetic = false;
  std::string row;
  fs::path bundle;
  std::string host = "127.0.0.1";
  int port = 8080;
};

void add_corpus_options(CLI::App& sub, Options& o) {
  sub.add_option("--corpus,--text", o.texts,
                 "Text files or directories of *.txt files");
  sub.add_option("--segment", o.config.segmentation,
                 "by-document, by-line or fixed-word-count")
      ->capture_default_str();
  sub.add_option("--words", o.config.words_per_segment,
                 "Words per segment for fixed-word-count");
  sub.add_option("--support", o.config.support,
                 "Noun list file, or 'heuristic'")
      ->capture_default_str();
  sub.add_option("--min-frequency", o.config.min_frequency,
                 "Heuristic support: minimum occurrences")
      ->capture_default_str();
  sub.add_option("--matrix", o.config.matrix_mode, "counts or presence")
      ->capture_default_str();
  sub.add_flag("--doubling", o.config.doubling,
               "Double term profiles before the analysis");
  sub.add_option("--vocabulary", o.config.ca_vocabulary,
                 "Analysed columns: support or all")
      ->capture_default_str();
  sub.add_option("--threads", o.threads,
                 "Worker threads (default: ULTRATEXT_THREADS or 1)");
  sub.add_option("--out", o.config.output, "Output directory")
      ->capture_default_str();
}

void add_coding_options(CLI::App& sub, Options& o) {
  sub.add_option("--threshold", o.config.threshold_mode,
                 "global-mean or per-triplet")
      ->capture_default_str();
  sub.add_option("--levels", o.config.levels, "Number of nonzero code levels")
      ->capture_default_str();
}

void add_cluster_options(CLI::App& sub, Options& o) {
  sub.add_option("--criterion", o.config.criterion, "single, complete or ward")
      ->capture_default_str();
  sub.add_option("--metric", o.config.metric,
                 "cvnc, sqeuclid or auto (sqeuclid for ward)")
      ->capture_default_str();
}

void check_inputs(const Options& o) {
  for (const auto& p : o.config.corpus) {
    if (!fs::exists(p)) throw MissingInput("input not found: " + p.string());
  }
  if (o.config.support != "heuristic" && !fs::exists(o.config.support)) {
    throw MissingInput("support file not found: " + o.config.support);
  }
}

void write_json(const fs::path& path, const Json& j) {
  write_file(path, dump(j));
}

Json report_json(const std::optional<UltrametricityReport>& r) {
  return r ? to_json(*r) : Json(nullptr);
}

int run_fingerprint(const Options& o, std::ostream& out) {
  const PipelineConfig& c = o.config;
  std::ostringstream table;
  table << table_header() << "\n";
  if (c.synthetic_n > 0) {
    const UltrametricityReport r = fingerprint_synthetic(c);
    write_json(c.output / "report.json", stamped(to_json(r), c));
    table << table_row("synthetic", r) << "\n";
  } else {
    const Analysis a = analyse_corpus(c);
    const FingerprintResult f = fingerprint(a, c);
    const auto& primary = f.global ? f.global : f.linear;
    if (!primary) throw DomainError("corpus too short for a linear scan");
    write_json(c.output / "report.json", stamped(to_json(*primary), c));

    Json texts = Json::array();
    for (const auto& t : f.texts) {
      texts.push_back({{"text", t.text},
                       {"global", report_json(t.global)},
                       {"linear", report_json(t.linear)}});
      const auto& row = t.global ? t.global : t.linear;
      if (row) table << table_row(t.text, *row) << "\n";
    }
    Json all;
    all["global"] = report_json(f.global);
    all["linear"] = report_json(f.linear);
    all["texts"] = std::move(texts);
    write_json(c.output / "fingerprint.json", stamped(all, c));
    table << table_row("all", *primary) << "\n";
  }
  write_file(c.output / "table.txt", table.str());
  out << table.str();
  return 0;
}

int run_embed(const Options& o, std::ostream& out) {
  const PipelineConfig& c = o.config;
  const Analysis a = analyse_corpus(c);
  write_json(c.output / "embedding.json", stamped(to_json(a.embedding), c));
  std::ostringstream tsv;
  write_tsv(a.counts, tsv);
  write_file(c.output / "matrix.tsv", tsv.str());
  out << "rank " << a.embedding.rank() << ", " << a.embedding.row_ids.size()
      << " segments, " << a.embedding.col_ids.size() << " terms\n";
  return 0;
}

int run_cluster(const Options& o, std::ostream& out) {
  const PipelineConfig& c = o.config;
  const Analysis a = analyse_corpus(c);
  const Eigen::MatrixXd d = term_dissimilarity(a, c);
  const Dendrogram tree =
      agglomerate(d, parse_linkage(c.criterion), a.term_ids);
  Json j = to_json(tree);
  j["criterion"] = c.criterion;
  j["stress"] = tree_fit_stress(d, tree);
  write_json(c.output / "dendrogram.json", stamped(j, c));
  std::ostringstream tsv;
  write_merge_tsv(tree, tsv);
  write_file(c.output / "dendrogram.tsv", tsv.str());
  out << tree.merges.size() << " merges over " << tree.leaf_count()
      << " terms\n";
  return 0;
}

int run_ontology(const Options& o, std::ostream& out) {
  const PipelineConfig& c = o.config;
  const Analysis a = analyse_corpus(c);
  const Dendrogram tree = canonicalize(cluster_terms(a, c));
  HierarchyOptions ho;
  ho.direction = parse_direction(c.direction);
  ho.level_tolerance = c.level_tolerance;
  const ConceptHierarchy h = derive_concept_hierarchy(tree, ho);

  write_bundle(a, h, c, c.output);
  std::ostringstream dot;
  dot << "// config " << c.hash() << "\n";
  write_dot(h, dot);
  write_file(c.output / "hierarchy.dot", dot.str());

  Json d = to_json(tree);
  d["criterion"] = c.criterion;
  d["packed_permutation"] = packed_permutation(tree);
  write_json(c.output / "canonical.json", stamped(d, c));
  write_json(c.output / "promoted.json",
             stamped(to_json(promote_labels(tree)), c));
  out << h.nodes.size() << " concepts, " << h.arcs.size() << " arcs\n";
  return 0;
}

int run_triples(const Options& o, std::ostream& out) {
  const PipelineConfig& c = o.config;
  const Analysis a = analyse_corpus(c);
  const auto triples = corpus_triples(a, c);
  std::ostringstream lines;
  write_jsonl(triples, lines);
  write_file(c.output / "triples.jsonl", lines.str());
  out << triples.size() << " subsumption triples\n";
  return 0;
}

int run_nearest(const Options& o, std::ostream& out) {
  const PipelineConfig& c = o.config;
  const Analysis a = analyse_corpus(c);
  const ColumnCoords coords = parse_column_coords(c.column_coords);
  std::vector<std::string> rows;
  if (o.row.empty()) {
    rows = a.embedding.row_ids;
  } else {
    rows.push_back(o.row);
  }
  Json queries = Json::array();
  for (const auto& r : rows) {
    queries.push_back(to_json(nearest_terms(a.embedding, r, c.k, coords)));
  }
  Json j;
  j["k"] = c.k;
  j["coords"] = c.column_coords;
  j["queries"] = std::move(queries);
  write_json(c.output / "nearest.json", stamped(j, c));
  out << rows.size() << " queries\n";
  return 0;
}

std::atomic<HttpServer*> g_server{nullptr};

void on_signal(int) {
  if (HttpServer* s = g_server.load()) s->stop();
}

int run_serve(const Options& o, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(o.bundle)) {
    throw MissingInput("bundle directory not found: " + o.bundle.string());
  }
  AnalysisBundle bundle;
  try {
    bundle = AnalysisBundle::load(o.bundle);
  } catch (const std::exception& e) {
    err << "error: invalid bundle: " << e.what() << "\n";
    return 1;
  }
  const BundleService service(std::move(bundle));
  HttpServer server(service);
  const int port = server.bind(o.host, o.port);
  if (port < 0) {
    err << "error: cannot listen on " << o.host << ":" << o.port << "\n";
    return 1;
  }
  out << "serving " << o.bundle.string() << " on http://" << o.host << ":"
      << port << std::endl;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const bool ok = server.run();
  g_server = nullptr;
  return ok ? 0 : 1;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Ultrametricity fingerprints and concept hierarchies for text",
               "ultratext"};
  app.require_subcommand(1);
  Options o;

  auto* fp = app.add_subcommand("fingerprint", "Triplet ultrametricity report");
  add_corpus_options(*fp, o);
  add_coding_options(*fp, o);
  fp->add_option("--mode", o.config.scan_mode, "global, linear or both")
      ->capture_default_str();
  fp->add_option("--classifier", o.config.classifier, "coded or angle")
      ->capture_default_str();
  fp->add_option("--tolerance", o.config.angle_tolerance,
                 "Angle tolerance in radians")
      ->capture_default_str();
  fp->add_option("--budget", o.config.budget,
                 "Largest number of triplets examined")
      ->capture_default_str();
  fp->add_option("--seed", o.config.seed, "Sampling and synthetic seed")
      ->capture_default_str();
  fp->add_flag("--synthetic", o.synthetic, "Use random Gaussian points");
  fp->add_option("--n", o.config.synthetic_n, "Synthetic point count");
  fp->add_option("--dims", o.config.synthetic_dims, "Synthetic dimensions")
      ->capture_default_str();

  auto* em = app.add_subcommand("embed", "Correspondence analysis");
  add_corpus_options(*em, o);

  auto* cl = app.add_subcommand("cluster", "Agglomerative clustering of terms");
  add_corpus_options(*cl, o);
  add_coding_options(*cl, o);
  add_cluster_options(*cl, o);

  auto* on = app.add_subcommand("ontology",
                                "Concept hierarchy and map service bundle");
  add_corpus_options(*on, o);
  add_coding_options(*on, o);
  add_cluster_options(*on, o);
  on->add_option("--direction", o.config.direction,
                 "Dominating side: later or earlier")
      ->capture_default_str();
  on->add_option("--level-tolerance", o.config.level_tolerance,
                 "Merge levels this close form one multiway node")
      ->capture_default_str();

  auto* tr = app.add_subcommand("triples", "Subsumption triples");
  add_corpus_options(*tr, o);
  add_coding_options(*tr, o);

  auto* nn = app.add_subcommand("nearest", "Nearest terms of each segment");
  add_corpus_options(*nn, o);
  nn->add_option("--k", o.config.k, "Terms per segment")->capture_default_str();
  nn->add_option("--row", o.row, "Only this segment id");
  nn->add_option("--coords", o.config.column_coords, "principal or standard")
      ->capture_default_str();

  auto* sv = app.add_subcommand("serve", "Serve an ontology bundle over HTTP");
  sv->add_option("--bundle", o.bundle, "Bundle directory")->required();
  sv->add_option("--port", o.port, "TCP port")->capture_default_str();
  sv->add_option("--host", o.host, "Listen address")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (sv->parsed()) return run_serve(o, out, err);

    for (const auto& t : o.texts) o.config.corpus.emplace_back(t);
    if (o.synthetic && o.config.synthetic_n == 0) {
      throw DomainError("--synthetic needs --n");
    }
    if (o.config.synthetic_n > 0 && !o.synthetic) {
      throw DomainError("--n applies to --synthetic runs");
    }
    if (o.synthetic && !o.config.corpus.empty()) {
      throw DomainError("--synthetic does not read a corpus");
    }
    o.config.threads = o.threads > 0 ? o.threads : default_thread_count();
    o.config.validate();
    check_inputs(o);
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (fp->parsed()) return run_fingerprint(o, out);
    if (em->parsed()) return run_embed(o, out);
    if (cl->parsed()) return run_cluster(o, out);
    if (on->parsed()) return run_ontology(o, out);
    if (tr->parsed()) return run_triples(o, out);
    if (nn->parsed()) return run_nearest(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ultratext
