#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "oracles.h"
#include "ultratext/cvnc.h"
#include "ultratext/error.h"
#include "ultratext/umetry.h"

namespace ultratext {
namespace {

AngleClassification angles(std::vector<double> a, std::vector<double> b,
                           std::vector<double> c) {
  return classify_angle_triplet(a, b, c);
}

TEST(Codes, FourClassPatterns) {
  EXPECT_EQ(classify_coded_triplet(1, 2, 2), TripletClass::kIsoscelesSmallBase);
  EXPECT_EQ(classify_coded_triplet(2, 2, 2), TripletClass::kEquilateral);
  EXPECT_EQ(classify_coded_triplet(1, 1, 1), TripletClass::kEquilateral);
  EXPECT_EQ(classify_coded_triplet(0, 1, 2), TripletClass::kTrivial);
  EXPECT_EQ(classify_coded_triplet(1, 1, 2), TripletClass::kNonUltrametric);
  EXPECT_THROW(classify_coded_triplet(3, 1, 1), DomainError);
}

TEST(Codes, GeneralLevels) {
  EXPECT_EQ(classify_codes(3, 4, 4), TripletClass::kIsoscelesSmallBase);
  EXPECT_EQ(classify_codes(4, 3, 4), TripletClass::kIsoscelesSmallBase);
  EXPECT_EQ(classify_codes(1, 2, 3), TripletClass::kNonUltrametric);
  EXPECT_EQ(classify_codes(3, 3, 4), TripletClass::kNonUltrametric);
}

TEST(Angles, Equilateral) {
  const auto r = angles({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2});
  EXPECT_TRUE(r.ultrametric);
  EXPECT_EQ(r.triplet_class, TripletClass::kEquilateral);
}

TEST(Angles, TallIsosceles) {
  const auto r = angles({0, 0}, {1, 0}, {0.5, 10});
  EXPECT_TRUE(r.ultrametric);
  EXPECT_EQ(r.triplet_class, TripletClass::kIsoscelesSmallBase);
  EXPECT_NEAR(std::atan2(10.0, 0.5), 1.5208, 1e-4);
}

TEST(Angles, CollinearIsNotUltrametric) {
  const auto r = angles({0, 0}, {1, 0}, {2, 0});
  EXPECT_FALSE(r.ultrametric);
  EXPECT_EQ(r.triplet_class, TripletClass::kNonUltrametric);
}

TEST(Angles, FlatIsoscelesHasLargeBase) {
  // Base angles equal but the apex angle is the largest: not ultrametric.
  const auto r = angles({0, 0}, {10, 0}, {5, 0.5});
  EXPECT_FALSE(r.ultrametric);
}

TEST(Angles, ToleranceIsTwoDegrees) {
  // Apex along the perpendicular bisector, then shifted to open a gap of
  // slightly under and slightly over the tolerance between base angles.
  auto gap = [](double shift) {
    const double left = std::atan2(10.0, 0.5 + shift);
    const double right = std::atan2(10.0, 0.5 - shift);
    return std::abs(left - right);
  };
  EXPECT_LT(gap(0.17), kAngleTolerance);
  EXPECT_GT(gap(0.18), kAngleTolerance);
  EXPECT_TRUE(angles({0, 0}, {1, 0}, {0.67, 10}).ultrametric);
  EXPECT_FALSE(angles({0, 0}, {1, 0}, {0.68, 10}).ultrametric);
}

TEST(Angles, CoincidentPointsAreTrivial) {
  EXPECT_EQ(angles({1, 1}, {1, 1}, {2, 0}).triplet_class, TripletClass::kTrivial);
}

TEST(StrongInequality, ExactCheck) {
  EXPECT_TRUE(ultrametric_triplet_check(3, 5, 5));
  EXPECT_FALSE(ultrametric_triplet_check(3, 3, 5));
  EXPECT_TRUE(ultrametric_triplet_check(4, 4, 4));
  EXPECT_TRUE(ultrametric_triplet_check(5, 3, 5.0 + 1e-9, 1e-6));
  EXPECT_THROW(ultrametric_triplet_check(-1, 1, 1), DomainError);
  EXPECT_THROW(ultrametric_triplet_check(NAN, 1, 1), DomainError);
}

TEST(Scan, TripletCount) {
  EXPECT_EQ(triplet_count(3), 1u);
  EXPECT_EQ(triplet_count(231), 2'027'795u);
  EXPECT_EQ(triplet_count(2), 0u);
}

TEST(Scan, ThreeIdenticalPointsAreTrivial) {
  const auto coded = recode_coordinates(Eigen::MatrixXd::Zero(3, 2),
                                        {"a", "b", "c"});
  const CodedClassifier classifier(coded);
  const auto report = scan_global(classifier);
  EXPECT_EQ(report.total_considered(), 1u);
  EXPECT_EQ(report.counts.trivial, 1u);
  EXPECT_FALSE(report.index_defined());
  EXPECT_EQ(report.index(), 0.0);
}

TEST(Scan, CopheneticMatricesAreFullyUltrametric) {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = oracle::random_dendrogram(rng, 20, trial % 2 == 1);
    const Eigen::MatrixXd delta = oracle::naive_cophenetic(d);
    const DistanceClassifier classifier(delta);
    const auto report = scan_global(classifier);
    EXPECT_EQ(report.index(), 1.0);
    EXPECT_EQ(report.counts.non_ultrametric, 0u);
  }
}

// Counts recomputed with a plain triple loop.
TEST(Scan, ExhaustiveMatchesTripleLoop) {
  oracle::Rng rng(32);
  const Eigen::MatrixXd x = oracle::random_points(rng, 30, 4);
  const auto coded = recode_coordinates(x, oracle::labels(30));
  const Eigen::MatrixXi c = coded.to_matrix();
  ClassCounts expected;
  for (int i = 0; i < 30; ++i)
    for (int j = i + 1; j < 30; ++j)
      for (int k = j + 1; k < 30; ++k)
        expected.add(classify_coded_triplet(c(i, j), c(i, k), c(j, k)));
  const CodedClassifier classifier(coded);
  const auto report = scan_global(classifier);
  EXPECT_EQ(report.mode, ScanMode::kGlobalExhaustive);
  EXPECT_EQ(report.counts, expected);
  const auto p = report.proportions();
  EXPECT_NEAR(p.trivial + p.equilateral + p.isosceles + p.non_ultrametric, 1.0,
              1e-12);
  const auto q = report.nontrivial_proportions();
  EXPECT_NEAR(q.equilateral + q.isosceles + q.non_ultrametric, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(report.index(), q.equilateral + q.isosceles);
}

TEST(Scan, SampledIsDeterministicAcrossThreads) {
  oracle::Rng rng(33);
  const Eigen::MatrixXd x = oracle::random_points(rng, 60, 5);
  const auto coded = recode_coordinates(x, oracle::labels(60));
  const CodedClassifier classifier(coded);
  ScanOptions o;
  o.budget = 5000;
  o.seed = 9;
  const auto a = scan_global(classifier, o);
  o.threads = 4;
  const auto b = scan_global(classifier, o);
  EXPECT_EQ(a.mode, ScanMode::kGlobalSampled);
  EXPECT_EQ(a.total_considered(), 5000u);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.seed, std::optional<std::uint64_t>(9));
  o.seed = 10;
  EXPECT_FALSE(scan_global(classifier, o).counts == a.counts);
}

TEST(Scan, ExhaustiveIsDeterministicAcrossThreads) {
  oracle::Rng rng(34);
  const Eigen::MatrixXd x = oracle::random_points(rng, 45, 3);
  const AngleClassifier classifier(x);
  ScanOptions o;
  const auto a = scan_global(classifier, o);
  o.threads = 7;
  EXPECT_EQ(a.counts, scan_global(classifier, o).counts);
}

TEST(Sample, UniqueSortedAndInRange) {
  for (std::uint64_t count : {0u, 1u, 10u, 600u, 999u, 1000u}) {
    const auto s = sample_indices(1000, count, 4);
    EXPECT_EQ(s.size(), count);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::uint64_t>(s.begin(), s.end()).size(), count);
    if (!s.empty()) EXPECT_LT(s.back(), 1000u);
  }
  EXPECT_EQ(sample_indices(1000, 50, 4), sample_indices(1000, 50, 4));
}

TEST(Sample, RoughlyUniform) {
  // Every decile of the population receives close to a tenth of the draws.
  std::array<int, 10> bins{};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto v : sample_indices(100000, 1000, seed)) ++bins[v / 10000];
  }
  for (int b : bins) EXPECT_NEAR(b, 2000, 250);
}

class LinearScan : public ::testing::Test {
 protected:
  // x, y close; z far from both.
  void SetUp() override {
    Eigen::MatrixXd d(3, 3);
    d << 0, 1, 4, 1, 0, 4, 4, 4, 0;
    coded_ = recode_distances(d, ids_);
  }
  ReducedDocument seq(std::vector<std::string> terms) {
    ReducedDocument r;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      r.terms.push_back({t, terms[t], 0, t});
    }
    return r;
  }
  std::vector<std::string> ids_{"x", "y", "z"};
  CodedDistanceMatrix coded_;
};

TEST_F(LinearScan, SingleWindow) {
  const CodedClassifier c(coded_);
  const auto r = scan_linear(seq({"x", "y", "z"}), ids_, c);
  EXPECT_EQ(r.total_considered(), 1u);
  EXPECT_EQ(r.counts.isosceles, 1u);
  EXPECT_EQ(r.unique_triplets, std::optional<std::uint64_t>(1));
}

TEST_F(LinearScan, RepeatedTermIsTrivial) {
  const CodedClassifier c(coded_);
  const auto r = scan_linear(seq({"x", "x", "y"}), ids_, c);
  EXPECT_EQ(r.counts.trivial, 1u);
  EXPECT_FALSE(r.index_defined());
}

TEST_F(LinearScan, ErrorsOnShortOrUnknown) {
  const CodedClassifier c(coded_);
  EXPECT_THROW(scan_linear(seq({"x", "y"}), ids_, c), DomainError);
  EXPECT_THROW(scan_linear(seq({"x", "y", "w"}), ids_, c), DomainError);
}

TEST_F(LinearScan, WindowsStopAtDocumentBoundaries) {
  const CodedClassifier c(coded_);
  ReducedDocument r = seq({"x", "y", "z", "x", "y", "z"});
  for (std::size_t t = 3; t < 6; ++t) r.terms[t].document = 1;
  EXPECT_EQ(scan_linear(r, ids_, c).total_considered(), 2u);
}

// Re-scans random sequences window by window.
TEST(LinearScanOracle, MatchesBruteForce) {
  oracle::Rng rng(35);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = oracle::uniform_int(rng, 3, 15);
    const auto ids = oracle::labels(m);
    const auto coded = recode_coordinates(oracle::random_points(rng, m, 3), ids);
    const auto c = coded.to_matrix();
    const std::size_t length = oracle::uniform_int(rng, 3, 120);
    const auto reduced = oracle::random_reduced(rng, ids, length);
    ClassCounts expected;
    std::set<std::vector<std::size_t>> unique, unique_um;
    for (std::size_t t = 0; t + 2 < length; ++t) {
      const auto& w = reduced.terms;
      if (w[t].document != w[t + 2].document) continue;
      std::vector<std::size_t> p;
      for (std::size_t o = 0; o < 3; ++o) {
        p.push_back(static_cast<std::size_t>(
            std::find(ids.begin(), ids.end(), w[t + o].term) - ids.begin()));
      }
      if (p[0] == p[1] || p[0] == p[2] || p[1] == p[2]) {
        expected.add(TripletClass::kTrivial);
        continue;
      }
      const auto cls = classify_coded_triplet(
          c(static_cast<Eigen::Index>(p[0]), static_cast<Eigen::Index>(p[1])),
          c(static_cast<Eigen::Index>(p[0]), static_cast<Eigen::Index>(p[2])),
          c(static_cast<Eigen::Index>(p[1]), static_cast<Eigen::Index>(p[2])));
      expected.add(cls);
      if (cls == TripletClass::kTrivial) continue;
      std::sort(p.begin(), p.end());
      unique.insert(p);
      if (is_ultrametric(cls)) unique_um.insert(p);
    }
    const CodedClassifier classifier(coded);
    const auto r = scan_linear(reduced, ids, classifier);
    EXPECT_EQ(r.counts, expected);
    EXPECT_EQ(r.unique_triplets.value(), unique.size());
    EXPECT_EQ(r.unique_ultrametric.value(), unique_um.size());
  }
}

TEST(Table, RowShowsRoundedPercentages) {
  UltrametricityReport r;
  r.counts = {0, 36, 50, 14};
  const std::string row = table_row("AI", r);
  EXPECT_NE(row.find("100"), std::string::npos);
  EXPECT_NE(row.find("50"), std::string::npos);
  EXPECT_NE(row.find("36"), std::string::npos);
  EXPECT_NE(row.find("14"), std::string::npos);
  EXPECT_EQ(row.rfind("AI", 0), 0u);
}

}  // namespace
}  // namespace ultratext
