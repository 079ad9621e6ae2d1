#pragma once

// Text ingestion: tokenization, segmentation, support (noun) sets, the
// reduced document and segment x term frequency matrices.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ultratext {

struct Token {
  std::string text;          // lowercased
  std::size_t position = 0;  // ordinal within the document
  std::size_t offset = 0;    // byte offset into the raw text
  std::size_t length = 0;    // byte length in the raw text
  std::size_t line = 0;      // 0-based line number
};

struct Document {
  std::string id;
  std::string name;
  std::string raw_text;
  std::vector<Token> tokens;
};

struct Corpus {
  std::vector<Document> documents;

  std::size_t token_count() const;
};

// Maximal runs of letters, allowing a hyphen or apostrophe between two
// letters. ASCII and Latin-1 letters are folded to lower case; digits and
// everything else separate tokens.
std::vector<Token> tokenize(std::string_view text);

// Builds a corpus from in-memory (id, text) pairs. Ids must be unique.
Corpus corpus_from_texts(
    std::span<const std::pair<std::string, std::string>> texts);

// Reads files (directories expand to their *.txt files in name order).
// Document ids are file stems.
Corpus load_corpus(std::span<const std::filesystem::path> paths);

enum class SegmentStrategy { kByDocument, kFixedWordCount, kByLine };

struct SegmentationOptions {
  SegmentStrategy strategy = SegmentStrategy::kByDocument;
  std::size_t words_per_segment = 0;  // kFixedWordCount only
};

struct Segment {
  std::string id;
  std::size_t document = 0;  // index into Corpus::documents
  std::size_t ordinal = 0;   // 0-based within its document
  std::vector<std::string> tokens;
  std::size_t text_begin = 0;  // byte span of the segment in the raw text
  std::size_t text_end = 0;
};

struct SegmentSet {
  SegmentationOptions options;
  std::vector<Segment> segments;

  std::string_view text(const Corpus& corpus, std::size_t index) const;
};

SegmentSet segment_corpus(const Corpus& corpus,
                          const SegmentationOptions& options);

std::pair<Corpus, SegmentSet> load_and_segment(
    std::span<const std::filesystem::path> paths,
    const SegmentationOptions& options);

SegmentationOptions parse_segmentation(std::string_view name,
                                       std::size_t words_per_segment = 0);
std::string to_string(SegmentStrategy strategy);

class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::span<const std::string> terms);

  // Returns false if the term was already present.
  bool add(std::string term);
  bool contains(std::string_view term) const;
  std::optional<std::size_t> index_of(std::string_view term) const;

  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One term per line; blank lines and '#' comments ignored; lowercased and
// deduplicated in first-seen order.
SupportSet read_support(std::istream& in);
SupportSet load_support(const std::filesystem::path& path);

struct HeuristicSupportOptions {
  std::size_t min_frequency = 3;
  std::size_t min_length = 3;
};

// Crude stand-in for a part-of-speech tagger: keeps non-stopword tokens
// carrying a common noun suffix or occurring at least min_frequency times.
SupportSet heuristic_support(const Corpus& corpus,
                             const HeuristicSupportOptions& options = {});

// Every distinct token in first-occurrence order.
SupportSet vocabulary(const Corpus& corpus);

struct ReducedTerm {
  std::size_t position = 0;  // index in the reduced sequence
  std::string term;
  std::size_t document = 0;
  std::size_t token_position = 0;  // position of the source token
};

// The in-order subsequence of support-term occurrences ("textual time
// series"). Windows never span two documents.
struct ReducedDocument {
  std::vector<ReducedTerm> terms;

  std::size_t length() const { return terms.size(); }
};

ReducedDocument reduce_document(const Corpus& corpus,
                                const SupportSet& support);

enum class MatrixMode { kCounts, kPresence };

MatrixMode parse_matrix_mode(std::string_view name);
std::string to_string(MatrixMode mode);

// Rows are segments (or any row entities), columns are terms.
struct FrequencyMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  Eigen::MatrixXd values;
  MatrixMode mode = MatrixMode::kCounts;

  Eigen::VectorXd row_totals() const { return values.rowwise().sum(); }
  Eigen::VectorXd col_totals() const { return values.colwise().sum(); }
  double grand_total() const { return values.sum(); }
  std::vector<bool> zero_rows() const;
  std::vector<bool> zero_cols() const;

  FrequencyMatrix transposed() const;
};

FrequencyMatrix build_frequency_matrix(const SegmentSet& segments,
                                       const SupportSet& support,
                                       MatrixMode mode);

// Header row: "segment" then the terms; one row per segment.
void write_tsv(const FrequencyMatrix& matrix, std::ostream& out);
FrequencyMatrix read_tsv(std::istream& in);

}  // namespace ultratext
