#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ultratext/cli.h"
#include "ultratext/pipeline.h"
#include "ultratext/schema.h"

namespace ultratext {
namespace {

namespace fs = std::filesystem;

const fs::path kSource(ULTRATEXT_SOURCE_DIR);
const std::string kSample = (kSource / "data" / "sample").string();
const std::string kNouns = (kSource / "data" / "sample_nouns.txt").string();

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "ultratext");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      run_command(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ultratext_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"fingerprint", "--no-such-flag"}).code, 2);
  EXPECT_EQ(run({"serve"}).code, 2);  // --bundle is required
}

TEST_F(Cli, InvalidConfigurationIsExitTwo) {
  const Outcome r = run({"cluster", "--corpus", kSample, "--support", kNouns,
                     "--criterion", "average", "--out", out("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("average"), std::string::npos);
  EXPECT_EQ(run({"fingerprint", "--synthetic"}).code, 2);
  EXPECT_EQ(run({"fingerprint", "--corpus", kSample, "--mode", "sideways"}).code, 2);
}

TEST_F(Cli, MissingInputIsExitTwo) {
  EXPECT_EQ(run({"embed", "--corpus", out("nothing.txt")}).code, 2);
  EXPECT_EQ(run({"embed", "--corpus", kSample, "--support", out("nouns.txt")}).code, 2);
  EXPECT_EQ(run({"serve", "--bundle", out("none")}).code, 2);
}

TEST_F(Cli, RuntimeFailureIsExitOne) {
  std::ofstream(dir_ / "tiny.txt") << "alpha beta gamma";
  std::ofstream(dir_ / "nouns.txt") << "alpha\n";
  const Outcome r = run({"embed", "--corpus", out("tiny.txt"), "--support",
                     out("nouns.txt"), "--out", out("o")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(Cli, InvalidBundleIsExitOne) {
  fs::create_directories(dir_ / "bundle");
  EXPECT_EQ(run({"serve", "--bundle", out("bundle")}).code, 1);
}

TEST_F(Cli, SyntheticTripletCount) {
  const Outcome r = run({"fingerprint", "--synthetic", "--n", "231", "--seed", "7",
                     "--out", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json report = load_json(dir_ / "o" / "report.json");
  EXPECT_EQ(report["total"], 2027795);
  EXPECT_EQ(report["n"], 231);
  EXPECT_NE(r.out.find("2027795"), std::string::npos);
}

TEST_F(Cli, LinearModeOnSample) {
  const Outcome r = run({"fingerprint", "--corpus", kSample, "--support", kNouns,
                     "--mode", "linear", "--out", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json report = load_json(dir_ / "o" / "report.json");
  EXPECT_EQ(report["mode"], "linear");
  EXPECT_TRUE(report.contains("unique_triplets"));
  const Json all = load_json(dir_ / "o" / "fingerprint.json");
  EXPECT_TRUE(all["global"].is_null());
  EXPECT_EQ(all["texts"].size(), 12u);
}

TEST_F(Cli, BothModesTableListsEveryText) {
  const Outcome r = run({"fingerprint", "--corpus", kSample, "--support", kNouns,
                     "--mode", "both", "--out", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "o" / "table.txt"), r.out);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 12u + 1u);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const std::vector<std::string> files{"embedding.json", "hierarchy.json",
                                       "matrix.tsv", "segments.json",
                                       "config.json", "canonical.json",
                                       "promoted.json", "hierarchy.dot"};
  for (const char* dest : {"a", "b"}) {
    ASSERT_EQ(run({"ontology", "--corpus", kSample, "--support", kNouns,
                   "--out", out(dest)})
                  .code,
              0);
  }
  ASSERT_EQ(run({"ontology", "--corpus", kSample, "--support", kNouns,
                 "--threads", "4", "--out", out("c")})
                .code,
            0);
  for (const auto& f : files) {
    const std::string a = slurp(dir_ / "a" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(dir_ / "b" / f)) << f;
    EXPECT_EQ(a, slurp(dir_ / "c" / f)) << f;
  }
}

TEST_F(Cli, ConfigHashStampsEveryOutput) {
  ASSERT_EQ(run({"ontology", "--corpus", kSample, "--support", kNouns,
                 "--out", out("o")})
                .code,
            0);
  const Json config = load_json(dir_ / "o" / "config.json");
  const std::string hash = config["config_hash"];
  EXPECT_EQ(hash.size(), 16u);
  for (const char* f : {"embedding.json", "hierarchy.json", "segments.json",
                        "canonical.json", "promoted.json"}) {
    const Json j = load_json(dir_ / "o" / f);
    EXPECT_EQ(j.begin().key(), "config_hash") << f;
    EXPECT_EQ(j["config_hash"], hash) << f;
  }
  EXPECT_EQ(slurp(dir_ / "o" / "hierarchy.dot").rfind("// config " + hash, 0), 0u);
  const Json schema = load_json(kSource / "schemas" / "config.schema.json");
  EXPECT_TRUE(validate_schema(config, schema).empty());

  ASSERT_EQ(run({"ontology", "--corpus", kSample, "--support", kNouns,
                 "--criterion", "complete", "--out", out("p")})
                .code,
            0);
  EXPECT_NE(load_json(dir_ / "p" / "config.json")["config_hash"], hash);
}

TEST_F(Cli, ThreadsEnvironmentFallback) {
  ::setenv("ULTRATEXT_THREADS", "3", 1);
  const Outcome r = run({"fingerprint", "--synthetic", "--n", "40", "--out", out("o")});
  ::unsetenv("ULTRATEXT_THREADS");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_json(dir_ / "o" / "report.json")["total"], 9880);
}

TEST_F(Cli, OntologyOnSingleTextByLine) {
  std::ofstream(dir_ / "notes.txt")
      << "the agent plans a route through the world\n"
         "a model of the world guides the agent\n"
         "\n"
         "the planner searches the space of plans\n"
         "the search space grows with the world model\n"
         "agents learn a model from data\n"
         "data about the world trains the model\n";
  std::ofstream(dir_ / "nouns.txt")
      << "agent\nworld\nmodel\nplanner\nspace\nsearch\ndata\nroute\nplans\n";
  const Outcome r = run({"ontology", "--text", out("notes.txt"), "--segment",
                     "by-line", "--support", out("nouns.txt"), "--out", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json segments = load_json(dir_ / "o" / "segments.json");
  ASSERT_EQ(segments["segments"].size(), 6u);
  EXPECT_EQ(segments["segments"][2]["text"], "the planner searches the space of plans");
  const Json h = load_json(dir_ / "o" / "hierarchy.json");
  std::size_t members = 0;
  for (const auto& n : h["nodes"]) members += n["members"].size();
  EXPECT_EQ(members, load_json(dir_ / "o" / "embedding.json")["cols"].size());
}

TEST_F(Cli, FixedWordSegmentsAndNearest) {
  const Outcome r = run({"nearest", "--corpus", kSample, "--support", kNouns,
                     "--segment", "fixed-word-count", "--words", "40", "--k",
                     "3", "--out", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json n = load_json(dir_ / "o" / "nearest.json");
  EXPECT_GT(n["queries"].size(), 12u);
  for (const auto& q : n["queries"]) EXPECT_EQ(q["results"].size(), 3u);
  EXPECT_TRUE(validate_schema(n, load_json(kSource / "schemas" / "nearest.schema.json"))
                  .empty());
}

TEST_F(Cli, ClusterAndTriplesOutputs) {
  ASSERT_EQ(run({"cluster", "--corpus", kSample, "--support", kNouns,
                 "--criterion", "ward", "--out", out("o")})
                .code,
            0);
  const Json d = load_json(dir_ / "o" / "dendrogram.json");
  EXPECT_EQ(d["criterion"], "ward");
  EXPECT_GE(d["stress"].get<double>(), 0.0);
  ASSERT_EQ(run({"triples", "--corpus", kSample, "--support", kNouns, "--out",
                 out("o")})
                .code,
            0);
  std::istringstream lines(slurp(dir_ / "o" / "triples.jsonl"));
  const Json schema = load_json(kSource / "schemas" / "triple.schema.json");
  std::string line;
  while (std::getline(lines, line)) {
    EXPECT_TRUE(validate_schema(Json::parse(line), schema).empty());
  }
}

TEST(Config, HashIgnoresOutputAndThreads) {
  PipelineConfig a, b;
  b.output = "/elsewhere";
  b.threads = 8;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 1;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, SyntheticPointsAreSeeded) {
  EXPECT_EQ(synthetic_points(10, 3, 5), synthetic_points(10, 3, 5));
  EXPECT_NE(synthetic_points(10, 3, 5), synthetic_points(10, 3, 6));
}

}  // namespace
}  // namespace ultratext
