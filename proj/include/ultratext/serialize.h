#pragma once

// JSON, TSV and JSON-lines encodings of the analysis artifacts. Objects keep
// a fixed key order so identical inputs give identical bytes.

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "ultratext/embed.h"
#include "ultratext/hclust.h"
#include "ultratext/ontology.h"
#include "ultratext/select.h"
#include "ultratext/umetry.h"

namespace ultratext {

using Json = nlohmann::ordered_json;

Json to_json(const UltrametricityReport& report);
Json to_json(const FactorEmbedding& embedding);
Json to_json(const Dendrogram& dendrogram);
Json to_json(const ConceptHierarchy& hierarchy);
Json to_json(const SubsumptionTriple& triple);
Json to_json(const NearestTermsResult& result);
Json to_json(const PromotedTree& tree);

FactorEmbedding embedding_from_json(const Json& j);
Dendrogram dendrogram_from_json(const Json& j);
ConceptHierarchy hierarchy_from_json(const Json& j);

// left, right, level, size per merge with a header line.
void write_merge_tsv(const Dendrogram& dendrogram, std::ostream& out);

void write_jsonl(std::span<const SubsumptionTriple> triples, std::ostream& out);

// Two-space indented JSON followed by a newline.
std::string dump(const Json& j);

}  // namespace ultratext
