#include "ultratext/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "ultratext/error.h"

namespace ultratext {
namespace {

enum class CharKind { kLetter, kJoiner, kOther };

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;
  bool valid = false;
};

CodePoint decode_utf8(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1, true};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0, 1, false};
  }
  if (i + len > s.size()) return {0, 1, false};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len, true};
}

CharKind classify(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) {
    return CharKind::kLetter;
  }
  if (cp == '\'' || cp == '-' || cp == 0x2019 || cp == 0x2010 ||
      cp == 0x2011) {
    return CharKind::kJoiner;
  }
  if (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7) {
    return CharKind::kLetter;
  }
  if (cp >= 0x370 && cp < 0x2000) return CharKind::kLetter;
  return CharKind::kOther;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c);
  });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading file: " + path.string());
  return buf.str();
}

bool is_stopword(std::string_view w) {
  static const std::unordered_set<std::string_view> kStop = {
      "the",   "and",   "for",   "are",   "but",   "not",    "you",
      "all",   "any",   "can",   "had",   "her",   "was",    "one",
      "our",   "out",   "has",   "him",   "his",   "how",    "its",
      "may",   "new",   "now",   "old",   "see",   "two",    "who",
      "did",   "yet",   "she",   "too",   "use",   "that",   "with",
      "have",  "this",  "will",  "your",  "from",  "they",   "been",
      "were",  "said",  "each",  "which", "their", "there",  "what",
      "about", "would", "these", "other", "into",  "more",   "some",
      "such",  "than",  "them",  "then",  "when",  "where",  "while",
      "also",  "very",  "only",  "over",  "most",  "many",   "much",
      "both",  "being", "because", "between", "under", "after", "before",
      "could", "should", "might", "must",  "does",  "done",   "upon",
      "those", "whether", "either", "neither", "however", "though",
      "thus",  "hence", "here",  "just",  "like",  "well",   "even",
      "often", "under", "same",  "whose", "within", "without", "among"};
  return kStop.contains(w);
}

bool has_noun_suffix(std::string_view w) {
  static constexpr std::string_view kSuffixes[] = {
      "tion", "sion", "ment", "ness", "ity",  "ism",  "ist",
      "ance", "ence", "ship", "hood", "ogy",  "ics",  "ure",
      "age",  "ers",  "ors",  "er",   "or",   "ries", "ities"};
  for (auto suffix : kSuffixes) {
    if (w.size() > suffix.size() + 1 && w.ends_with(suffix)) return true;
  }
  return false;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::size_t Corpus::token_count() const {
  std::size_t total = 0;
  for (const auto& d : documents) total += d.tokens.size();
  return total;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 0;
  std::size_t i = 0;
  Token current;
  bool in_token = false;
  std::string pending_joiner;

  auto finish = [&] {
    if (in_token) {
      current.position = tokens.size();
      tokens.push_back(std::move(current));
      current = Token{};
    }
    in_token = false;
    pending_joiner.clear();
  };

  while (i < text.size()) {
    const CodePoint cp = decode_utf8(text, i);
    const CharKind kind = cp.valid ? classify(cp.value) : CharKind::kOther;
    if (kind == CharKind::kLetter) {
      if (!in_token) {
        in_token = true;
        current.offset = i;
        current.line = line;
      } else if (!pending_joiner.empty()) {
        current.text += pending_joiner;
        pending_joiner.clear();
      }
      append_utf8(current.text, to_lower(cp.value));
      current.length = i + cp.length - current.offset;
    } else if (kind == CharKind::kJoiner && in_token &&
               pending_joiner.empty()) {
      pending_joiner =
          (cp.value == '\'' || cp.value == 0x2019) ? "'" : "-";
    } else {
      finish();
    }
    if (cp.valid && cp.value == '\n') ++line;
    i += cp.length;
  }
  finish();
  return tokens;
}

Corpus corpus_from_texts(
    std::span<const std::pair<std::string, std::string>> texts) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  for (const auto& [id, text] : texts) {
    if (!seen.insert(id).second) {
      throw DomainError("duplicate document id: " + id);
    }
    Document doc;
    doc.id = id;
    doc.name = id;
    doc.raw_text = text;
    doc.tokens = tokenize(doc.raw_text);
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.token_count() == 0) throw DomainError("empty corpus");
  return corpus;
}

Corpus load_corpus(std::span<const std::filesystem::path> paths) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> in_dir;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
          in_dir.push_back(entry.path());
        }
      }
      std::sort(in_dir.begin(), in_dir.end());
      files.insert(files.end(), in_dir.begin(), in_dir.end());
    } else if (fs::is_regular_file(p, ec)) {
      files.push_back(p);
    } else {
      throw IoError("cannot read file: " + p.string());
    }
  }
  std::vector<std::pair<std::string, std::string>> texts;
  texts.reserve(files.size());
  for (const auto& f : files) {
    texts.emplace_back(f.stem().string(), read_file(f));
  }
  if (texts.empty()) throw DomainError("empty corpus: no input files");
  Corpus corpus = corpus_from_texts(texts);
  for (std::size_t i = 0; i < files.size(); ++i) {
    corpus.documents[i].name = files[i].filename().string();
  }
  return corpus;
}

std::string_view SegmentSet::text(const Corpus& corpus,
                                  std::size_t index) const {
  const Segment& s = segments.at(index);
  std::string_view raw = corpus.documents.at(s.document).raw_text;
  return raw.substr(s.text_begin, s.text_end - s.text_begin);
}

SegmentSet segment_corpus(const Corpus& corpus,
                          const SegmentationOptions& options) {
  if (options.strategy == SegmentStrategy::kFixedWordCount &&
      options.words_per_segment < 1) {
    throw DomainError("fixed-word-count segmentation needs k >= 1");
  }
  SegmentSet set;
  set.options = options;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const Document& doc = corpus.documents[d];
    switch (options.strategy) {
      case SegmentStrategy::kByDocument: {
        Segment s;
        s.id = doc.id;
        s.document = d;
        s.ordinal = 0;
        s.text_begin = 0;
        s.text_end = doc.raw_text.size();
        for (const auto& t : doc.tokens) s.tokens.push_back(t.text);
        set.segments.push_back(std::move(s));
        break;
      }
      case SegmentStrategy::kFixedWordCount: {
        const std::size_t k = options.words_per_segment;
        for (std::size_t start = 0; start < doc.tokens.size(); start += k) {
          const std::size_t end = std::min(doc.tokens.size(), start + k);
          Segment s;
          s.document = d;
          s.ordinal = start / k;
          s.id = doc.id + ":" + std::to_string(s.ordinal);
          s.text_begin = doc.tokens[start].offset;
          s.text_end = doc.tokens[end - 1].offset + doc.tokens[end - 1].length;
          for (std::size_t t = start; t < end; ++t) {
            s.tokens.push_back(doc.tokens[t].text);
          }
          set.segments.push_back(std::move(s));
        }
        break;
      }
      case SegmentStrategy::kByLine: {
        // Lines without tokens do not form segments.
        std::vector<std::size_t> line_starts{0};
        for (std::size_t i = 0; i < doc.raw_text.size(); ++i) {
          if (doc.raw_text[i] == '\n') line_starts.push_back(i + 1);
        }
        std::size_t ordinal = 0;
        std::size_t t = 0;
        while (t < doc.tokens.size()) {
          const std::size_t line = doc.tokens[t].line;
          Segment s;
          s.document = d;
          s.ordinal = ordinal++;
          s.id = doc.id + ":" + std::to_string(line + 1);
          s.text_begin = line_starts[line];
          s.text_end = line + 1 < line_starts.size() ? line_starts[line + 1] - 1
                                                     : doc.raw_text.size();
          if (s.text_end > s.text_begin &&
              doc.raw_text[s.text_end - 1] == '\r') {
            --s.text_end;
          }
          while (t < doc.tokens.size() && doc.tokens[t].line == line) {
            s.tokens.push_back(doc.tokens[t].text);
            ++t;
          }
          set.segments.push_back(std::move(s));
        }
        break;
      }
    }
  }
  return set;
}

std::pair<Corpus, SegmentSet> load_and_segment(
    std::span<const std::filesystem::path> paths,
    const SegmentationOptions& options) {
  Corpus corpus = load_corpus(paths);
  SegmentSet segments = segment_corpus(corpus, options);
  return {std::move(corpus), std::move(segments)};
}

SegmentationOptions parse_segmentation(std::string_view name,
                                       std::size_t words_per_segment) {
  SegmentationOptions o;
  o.words_per_segment = words_per_segment;
  if (name == "by-document") {
    o.strategy = SegmentStrategy::kByDocument;
  } else if (name == "by-line") {
    o.strategy = SegmentStrategy::kByLine;
  } else if (name == "fixed-word-count") {
    o.strategy = SegmentStrategy::kFixedWordCount;
    if (words_per_segment < 1) {
      throw DomainError("fixed-word-count segmentation needs k >= 1");
    }
  } else {
    throw DomainError("unknown segmentation strategy: " + std::string(name));
  }
  return o;
}

std::string to_string(SegmentStrategy strategy) {
  switch (strategy) {
    case SegmentStrategy::kByDocument:
      return "by-document";
    case SegmentStrategy::kFixedWordCount:
      return "fixed-word-count";
    case SegmentStrategy::kByLine:
      return "by-line";
  }
  return "?";
}

SupportSet::SupportSet(std::span<const std::string> terms) {
  for (const auto& t : terms) add(t);
}

bool SupportSet::add(std::string term) {
  if (index_.contains(term)) return false;
  index_.emplace(term, terms_.size());
  terms_.push_back(std::move(term));
  return true;
}

bool SupportSet::contains(std::string_view term) const {
  return index_.contains(std::string(term));
}

std::optional<std::size_t> SupportSet::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SupportSet read_support(std::istream& in) {
  SupportSet support;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view v = line;
    if (auto hash = v.find('#'); hash != std::string_view::npos) {
      v = v.substr(0, hash);
    }
    v = trim(v);
    if (v.empty()) continue;
    support.add(lowercase_ascii(v));
  }
  if (support.empty()) throw DomainError("support set is empty");
  return support;
}

SupportSet load_support(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read file: " + path.string());
  return read_support(in);
}

SupportSet heuristic_support(const Corpus& corpus,
                             const HeuristicSupportOptions& options) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& doc : corpus.documents) {
    for (const auto& t : doc.tokens) ++freq[t.text];
  }
  SupportSet support;
  for (const auto& doc : corpus.documents) {
    for (const auto& t : doc.tokens) {
      const std::string& w = t.text;
      if (w.size() < options.min_length || is_stopword(w)) continue;
      if (w.find('\'') != std::string::npos) continue;
      if (has_noun_suffix(w) || freq[w] >= options.min_frequency) {
        support.add(w);
      }
    }
  }
  if (support.empty()) throw DomainError("support set is empty");
  return support;
}

SupportSet vocabulary(const Corpus& corpus) {
  SupportSet support;
  for (const auto& doc : corpus.documents) {
    for (const auto& t : doc.tokens) support.add(t.text);
  }
  if (support.empty()) throw DomainError("support set is empty");
  return support;
}

ReducedDocument reduce_document(const Corpus& corpus,
                                const SupportSet& support) {
  if (support.empty()) throw DomainError("support set is empty");
  ReducedDocument reduced;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    for (const auto& t : corpus.documents[d].tokens) {
      if (!support.contains(t.text)) continue;
      reduced.terms.push_back(
          {reduced.terms.size(), t.text, d, t.position});
    }
  }
  return reduced;
}

MatrixMode parse_matrix_mode(std::string_view name) {
  if (name == "counts") return MatrixMode::kCounts;
  if (name == "presence") return MatrixMode::kPresence;
  throw DomainError("unknown matrix mode: " + std::string(name));
}

std::string to_string(MatrixMode mode) {
  return mode == MatrixMode::kCounts ? "counts" : "presence";
}

std::vector<bool> FrequencyMatrix::zero_rows() const {
  std::vector<bool> flags(values.rows());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    flags[i] = (values.row(i).array() == 0.0).all();
  }
  return flags;
}

std::vector<bool> FrequencyMatrix::zero_cols() const {
  std::vector<bool> flags(values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    flags[j] = (values.col(j).array() == 0.0).all();
  }
  return flags;
}

FrequencyMatrix FrequencyMatrix::transposed() const {
  FrequencyMatrix t;
  t.row_ids = col_ids;
  t.col_ids = row_ids;
  t.values = values.transpose();
  t.mode = mode;
  return t;
}

FrequencyMatrix build_frequency_matrix(const SegmentSet& segments,
                                       const SupportSet& support,
                                       MatrixMode mode) {
  FrequencyMatrix m;
  m.mode = mode;
  m.col_ids = support.terms();
  m.values = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(segments.segments.size()),
      static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < segments.segments.size(); ++i) {
    const Segment& s = segments.segments[i];
    m.row_ids.push_back(s.id);
    for (const auto& tok : s.tokens) {
      if (auto j = support.index_of(tok)) {
        double& cell = m.values(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(*j));
        cell = mode == MatrixMode::kPresence ? 1.0 : cell + 1.0;
      }
    }
  }
  return m;
}

void write_tsv(const FrequencyMatrix& matrix, std::ostream& out) {
  out << "segment";
  for (const auto& c : matrix.col_ids) out << '\t' << c;
  out << '\n';
  for (Eigen::Index i = 0; i < matrix.values.rows(); ++i) {
    out << matrix.row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < matrix.values.cols(); ++j) {
      out << '\t' << format_number(matrix.values(i, j));
    }
    out << '\n';
  }
}

FrequencyMatrix read_tsv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return fields;
  };
  std::string line;
  if (!std::getline(in, line)) throw DomainError("matrix TSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line);
  FrequencyMatrix m;
  m.col_ids.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != header.size()) {
      throw DomainError("matrix TSV row has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(header.size()));
    }
    m.row_ids.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0;
      const auto& f = fields[k];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || v < 0) {
        throw DomainError("bad matrix TSV value: " + f);
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  m.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(m.col_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

}  // namespace ultratext
