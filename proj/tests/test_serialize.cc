#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "ultratext/error.h"
#include "ultratext/schema.h"
#include "ultratext/serialize.h"

namespace ultratext {
namespace {

const std::filesystem::path kSchemas =
    std::filesystem::path(ULTRATEXT_SOURCE_DIR) / "schemas";

Json schema(const std::string& name) {
  return load_json(kSchemas / (name + ".schema.json"));
}

FactorEmbedding sample_embedding() {
  oracle::Rng rng(71);
  Eigen::MatrixXd v(6, 5);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 5; ++j)
      v(i, j) = static_cast<double>(oracle::uniform_int(rng, 1, 9));
  FrequencyMatrix m;
  m.values = v;
  m.row_ids = oracle::labels(6, "s");
  m.col_ids = oracle::labels(5, "t");
  return correspondence_analysis(m);
}

TEST(Json, EmbeddingRoundTripIsExact) {
  const FactorEmbedding e = sample_embedding();
  const FactorEmbedding back = embedding_from_json(Json::parse(dump(to_json(e))));
  EXPECT_EQ(back.row_ids, e.row_ids);
  EXPECT_EQ(back.col_ids, e.col_ids);
  EXPECT_EQ(back.row_coords, e.row_coords);
  EXPECT_EQ(back.col_coords, e.col_coords);
  EXPECT_EQ(back.eigenvalues, e.eigenvalues);
  EXPECT_EQ(back.row_masses, e.row_masses);
  EXPECT_EQ(dump(to_json(back)), dump(to_json(e)));
}

TEST(Json, EmbeddingRejectsWrongDimension) {
  Json j = to_json(sample_embedding());
  j["rows"][0]["coords"].push_back(1.0);
  EXPECT_THROW(embedding_from_json(j), DomainError);
}

TEST(Json, DendrogramRoundTrip) {
  oracle::Rng rng(72);
  const Dendrogram d = oracle::random_dendrogram(rng, 20, true);
  const Dendrogram back = dendrogram_from_json(Json::parse(dump(to_json(d))));
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.merges, d.merges);
  EXPECT_TRUE(validate_schema(to_json(d), schema("dendrogram")).empty());
}

TEST(Json, DendrogramRejectsBadMerges) {
  oracle::Rng rng(1);
  Json j = to_json(oracle::random_dendrogram(rng, 4));
  j["merges"][0]["left"] = 99;
  EXPECT_THROW(dendrogram_from_json(j), DomainError);
}

TEST(Json, HierarchyRoundTrip) {
  ConceptHierarchy h;
  h.direction = DominanceDirection::kEarlierDominates;
  h.nodes.push_back({"c0", "a", {"a", "b"}, 1, {"c1"}});
  h.nodes.push_back({"c1", "c", {"c"}, 1, {"c0"}});
  h.nodes.push_back({"c2", "d", {"d"}, 2, {}});
  h.arcs.push_back({"c2", "c0"});
  const Json j = to_json(h);
  EXPECT_TRUE(validate_schema(j, schema("hierarchy")).empty());
  EXPECT_EQ(dump(to_json(hierarchy_from_json(j))), dump(j));
}

TEST(Json, ReportMatchesSchema) {
  UltrametricityReport r;
  r.classifier = "coded";
  r.n = 5;
  r.counts = {1, 2, 3, 4};
  r.seed = 3;
  r.budget = 10;
  const Json j = to_json(r);
  EXPECT_EQ(j["total"], 10);
  EXPECT_EQ(j["counts"]["nonUM"], 4);
  EXPECT_TRUE(validate_schema(j, schema("report")).empty());
  r.mode = ScanMode::kLinear;
  r.unique_triplets = 0;
  EXPECT_TRUE(to_json(r)["unique_index"].is_null());
  EXPECT_TRUE(validate_schema(to_json(r), schema("report")).empty());
}

TEST(Json, PromotedAndNearest) {
  Dendrogram d;
  d.labels = {"x", "y", "z"};
  d.merges = {{0, 1, 1, 2}, {3, 2, 2, 3}};
  const Json p = to_json(promote_labels(d));
  EXPECT_EQ(p["nodes"][0]["parent"], 2);
  EXPECT_EQ(p["nodes"][1]["parent"], "root");
  EXPECT_EQ(p["root_label"], "z");
  EXPECT_TRUE(validate_schema(p, schema("promoted")).empty());
  NearestTermsResult n{"s0", 2, {{"a", 0.5}, {"b", 1.5}}};
  EXPECT_EQ(to_json(n).dump(),
            R"({"query":"s0","k":2,"results":[{"term":"a","d2":0.5},{"term":"b","d2":1.5}]})");
}

TEST(Tsv, MergesUseShortestNumbers) {
  Dendrogram d;
  d.labels = {"a", "b", "c"};
  d.merges = {{0, 1, 0.1, 2}, {3, 2, 2, 3}};
  std::ostringstream out;
  write_merge_tsv(d, out);
  EXPECT_EQ(out.str(), "left\tright\tlevel\tsize\n0\t1\t0.1\t2\n3\t2\t2\t3\n");
}

TEST(Jsonl, OneTriplePerLine) {
  const std::vector<SubsumptionTriple> t{{"x", "y", "z", {0, 4}},
                                         {"p", "q", "r", {2}}};
  std::ostringstream out;
  write_jsonl(t, out);
  EXPECT_EQ(out.str(),
            "{\"pair\":[\"x\",\"y\"],\"apex\":\"z\",\"positions\":[0,4]}\n"
            "{\"pair\":[\"p\",\"q\"],\"apex\":\"r\",\"positions\":[2]}\n");
  std::istringstream in(out.str());
  std::string line;
  while (std::getline(in, line)) {
    EXPECT_TRUE(validate_schema(Json::parse(line), schema("triple")).empty());
  }
}

TEST(Dump, IndentedWithTrailingNewlineAndSafeBytes) {
  Json j;
  j["b"] = 1;
  j["a"] = "\xff";
  EXPECT_EQ(dump(j), "{\n  \"b\": 1,\n  \"a\": \"\xEF\xBF\xBD\"\n}\n");
}

TEST(Schema, ReportsViolationsWithPointers) {
  const Json s = Json::parse(R"({
    "type": "object",
    "required": ["n", "tags"],
    "additionalProperties": false,
    "properties": {
      "n": {"type": "integer", "minimum": 0, "maximum": 3},
      "tags": {"type": "array", "minItems": 1, "items": {"enum": ["a", "b"]}},
      "x": {"anyOf": [{"type": "null"}, {"$ref": "#/definitions/pos"}]}
    },
    "definitions": {"pos": {"type": "number", "minimum": 0}}
  })");
  EXPECT_TRUE(validate_schema(Json::parse(R"({"n": 2, "tags": ["a"]})"), s).empty());
  EXPECT_TRUE(
      validate_schema(Json::parse(R"({"n": 2, "tags": ["a"], "x": null})"), s).empty());
  EXPECT_TRUE(
      validate_schema(Json::parse(R"({"n": 2, "tags": ["a"], "x": 1.5})"), s).empty());

  auto errors = validate_schema(Json::parse(R"({"n": 5, "tags": ["c"], "y": 1})"), s);
  ASSERT_EQ(errors.size(), 3u);
  std::string all;
  for (const auto& e : errors) all += e + "\n";
  EXPECT_NE(all.find("/n"), std::string::npos);
  EXPECT_NE(all.find("/tags/0"), std::string::npos);
  EXPECT_NE(all.find("y"), std::string::npos);

  EXPECT_FALSE(validate_schema(Json::parse(R"({"n": 1.5, "tags": ["a"]})"), s).empty());
  EXPECT_FALSE(validate_schema(Json::parse(R"({"n": 1, "tags": []})"), s).empty());
  EXPECT_FALSE(validate_schema(Json::parse(R"({"tags": ["a"]})"), s).empty());
  EXPECT_FALSE(
      validate_schema(Json::parse(R"({"n": 1, "tags": ["a"], "x": -1})"), s).empty());
}

TEST(Schema, LoadJsonErrors) {
  EXPECT_THROW(load_json(kSchemas / "missing.json"), IoError);
}

}  // namespace
}  // namespace ultratext
