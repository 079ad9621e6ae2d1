#pragma once

// Read-only HTTP service over an analysis bundle produced by the ontology
// stage: the term map, the concept hierarchy and the segments behind a term.

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ultratext/corpus.h"
#include "ultratext/embed.h"
#include "ultratext/ontology.h"
#include "ultratext/serialize.h"

namespace ultratext {

struct BundleSegment {
  std::string id;
  std::string document;
  std::size_t ordinal = 0;
  std::string text;
};

struct AnalysisBundle {
  std::string config_hash;
  FactorEmbedding embedding;
  ConceptHierarchy hierarchy;
  FrequencyMatrix matrix;
  std::vector<BundleSegment> segments;

  // Throws DomainError for inconsistent or malformed content and IoError for
  // missing files.
  static AnalysisBundle load(const std::filesystem::path& dir);
  void check() const;
};

struct Response {
  int status = 200;
  std::string body;  // JSON
};

class BundleService {
 public:
  explicit BundleService(AnalysisBundle bundle);

  // GET handler keyed on the decoded request path.
  Response handle(std::string_view path) const;

  Json map() const;
  Json term_segments(std::string_view term) const;  // null json if unknown

 private:
  AnalysisBundle bundle_;
  std::string map_body_;
  std::string hierarchy_body_;
};

// HTTP front end; request handling runs on a worker pool over the shared,
// immutable service.
class HttpServer {
 public:
  explicit HttpServer(const BundleService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ultratext
