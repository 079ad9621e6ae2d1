#pragma once

// End-to-end analysis stages shared by the command-line tool and tests.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ultratext/corpus.h"
#include "ultratext/cvnc.h"
#include "ultratext/embed.h"
#include "ultratext/hclust.h"
#include "ultratext/ontology.h"
#include "ultratext/select.h"
#include "ultratext/serialize.h"
#include "ultratext/umetry.h"

namespace ultratext {

struct PipelineConfig {
  std::vector<std::filesystem::path> corpus;
  std::string segmentation = "by-document";
  std::size_t words_per_segment = 0;
  std::string support = "heuristic";  // noun-list path or "heuristic"
  std::size_t min_frequency = 3;      // heuristic support only
  std::string matrix_mode = "counts";
  bool doubling = false;
  std::string ca_vocabulary = "support";  // or "all"
  std::string classifier = "coded";       // or "angle"
  std::string threshold_mode = "global-mean";
  int levels = 2;
  double angle_tolerance = kAngleTolerance;
  std::string scan_mode = "global";  // global | linear | both
  std::uint64_t budget = 4'000'000;
  std::uint64_t seed = 0;
  std::string criterion = "single";
  std::string metric = "auto";  // cvnc | sqeuclid | auto
  std::string direction = "later";
  double level_tolerance = 0.0;
  std::size_t k = 5;
  std::string column_coords = "principal";
  std::size_t synthetic_n = 0;  // > 0 selects synthetic points
  std::size_t synthetic_dims = 13;
  unsigned threads = 1;
  std::filesystem::path output = ".";

  // Throws DomainError on an invalid combination.
  void validate() const;
  // Everything that influences results; excludes output and threads.
  Json to_json() const;
  // FNV-1a 64 of the compact JSON form, as 16 hex digits.
  std::string hash() const;
};

std::string fnv1a_hex(std::string_view bytes);

// Corpus-derived state: the embedding is always exposed with segments as
// rows and terms as columns, whether or not profiles were doubled.
struct Analysis {
  Corpus corpus;
  SegmentSet segments;
  SupportSet support;
  SupportSet vocabulary;       // columns of the analysed matrix
  FrequencyMatrix counts;      // segments x vocabulary, raw counts
  FactorEmbedding embedding;   // rows = segments, cols = vocabulary terms
  std::vector<std::string> term_ids;  // support terms with coordinates
  Eigen::MatrixXd term_coords;
};

Analysis analyse_corpus(const PipelineConfig& config);

// Coordinates of a subset of terms, rows in the given order.
Eigen::MatrixXd coords_of(const Analysis& analysis,
                          std::span<const std::string> terms);

// Triplet classifier over point coordinates per the configuration.
struct ConfiguredClassifier {
  std::unique_ptr<CodedDistanceMatrix> coded;  // coded classifiers only
  std::unique_ptr<TripletClassifier> classifier;
};

ConfiguredClassifier make_classifier(const PipelineConfig& config,
                                     const Eigen::MatrixXd& coords,
                                     std::vector<std::string> ids);

RecodeOptions recode_options(const PipelineConfig& config);

// Gaussian points, reproducible across platforms for a given seed.
Eigen::MatrixXd synthetic_points(std::size_t n, std::size_t dims,
                                 std::uint64_t seed);

struct FingerprintResult {
  std::optional<UltrametricityReport> global;
  std::optional<UltrametricityReport> linear;
  struct PerText {
    std::string text;
    std::optional<UltrametricityReport> global;
    std::optional<UltrametricityReport> linear;
  };
  std::vector<PerText> texts;
};

FingerprintResult fingerprint(const Analysis& analysis,
                              const PipelineConfig& config);
UltrametricityReport fingerprint_synthetic(const PipelineConfig& config);

// Term dissimilarities used for clustering: CvNC codes or squared
// Euclidean distances depending on the metric and criterion.
Eigen::MatrixXd term_dissimilarity(const Analysis& analysis,
                                   const PipelineConfig& config);

Dendrogram cluster_terms(const Analysis& analysis,
                         const PipelineConfig& config);

std::vector<SubsumptionTriple> corpus_triples(const Analysis& analysis,
                                              const PipelineConfig& config);

// Writes embedding.json, hierarchy.json, matrix.tsv, segments.json and
// config.json for the map service.
void write_bundle(const Analysis& analysis, const ConceptHierarchy& hierarchy,
                  const PipelineConfig& config,
                  const std::filesystem::path& dir);

// Prepends the configuration hash to a JSON object.
Json stamped(const Json& body, const PipelineConfig& config);

// Writes text to path, replacing any existing file.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace ultratext
