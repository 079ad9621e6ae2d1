#pragma once

// Triplet classification and ultrametricity scans.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ultratext/corpus.h"
#include "ultratext/cvnc.h"

namespace ultratext {

enum class TripletClass {
  kTrivial,
  kEquilateral,
  kIsoscelesSmallBase,
  kNonUltrametric,
};

std::string to_string(TripletClass c);

inline bool is_ultrametric(TripletClass c) {
  return c == TripletClass::kEquilateral ||
         c == TripletClass::kIsoscelesSmallBase;
}

// Codes must lie in {0, 1, 2}.
TripletClass classify_coded_triplet(int d12, int d13, int d23);

// Same rule for arbitrary code levels: any 0 is trivial, all equal is
// equilateral, two equal largest values is isosceles with small base.
TripletClass classify_codes(int d12, int d13, int d23);

// 2 degrees.
inline constexpr double kAngleTolerance = 0.0349;

struct AngleClassification {
  bool ultrametric = false;
  TripletClass triplet_class = TripletClass::kTrivial;
};

// Interior angles via scalar products; ultrametric when the two angles other
// than the smallest agree within tol_rad. Coincident points are trivial.
AngleClassification classify_angle_triplet(std::span<const double> a,
                                           std::span<const double> b,
                                           std::span<const double> c,
                                           double tol_rad = kAngleTolerance);

// Strong triangle inequality: the two largest values agree within
// rel_tol * largest. rel_tol = 0 is the exact check.
bool ultrametric_triplet_check(double d12, double d13, double d23,
                               double rel_tol = 0.0);

// Classifies real-valued distances with the same tolerance rule; any zero
// distance makes the triplet trivial.
TripletClass classify_distance_triplet(double d12, double d13, double d23,
                                       double rel_tol = 0.0);

// Classifies triplets of point indices (i < j < k not required).
class TripletClassifier {
 public:
  virtual ~TripletClassifier() = default;
  virtual std::size_t size() const = 0;
  virtual TripletClass classify(std::size_t i, std::size_t j,
                                std::size_t k) const = 0;
  virtual std::string name() const = 0;
};

class CodedClassifier final : public TripletClassifier {
 public:
  explicit CodedClassifier(const CodedDistanceMatrix& coded)
      : coded_(coded) {}
  std::size_t size() const override { return coded_.size(); }
  TripletClass classify(std::size_t i, std::size_t j,
                        std::size_t k) const override;
  std::string name() const override;

 private:
  const CodedDistanceMatrix& coded_;
};

class AngleClassifier final : public TripletClassifier {
 public:
  AngleClassifier(const Eigen::MatrixXd& coords,
                  double tol_rad = kAngleTolerance);
  std::size_t size() const override {
    return static_cast<std::size_t>(coords_.rows());
  }
  TripletClass classify(std::size_t i, std::size_t j,
                        std::size_t k) const override;
  std::string name() const override { return "angle"; }

 private:
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      coords_;
  double tol_;
};

class DistanceClassifier final : public TripletClassifier {
 public:
  DistanceClassifier(const Eigen::MatrixXd& distances, double rel_tol = 0.0)
      : d_(distances), rel_tol_(rel_tol) {}
  std::size_t size() const override {
    return static_cast<std::size_t>(d_.rows());
  }
  TripletClass classify(std::size_t i, std::size_t j,
                        std::size_t k) const override;
  std::string name() const override { return "distance"; }

 private:
  const Eigen::MatrixXd& d_;
  double rel_tol_;
};

struct ClassCounts {
  std::uint64_t trivial = 0;
  std::uint64_t equilateral = 0;
  std::uint64_t isosceles = 0;
  std::uint64_t non_ultrametric = 0;

  void add(TripletClass c);
  std::uint64_t total() const {
    return trivial + equilateral + isosceles + non_ultrametric;
  }
  std::uint64_t nontrivial() const { return total() - trivial; }
  std::uint64_t ultrametric() const { return equilateral + isosceles; }
  ClassCounts& operator+=(const ClassCounts& o);
  bool operator==(const ClassCounts&) const = default;
};

enum class ScanMode { kGlobalExhaustive, kGlobalSampled, kLinear };

std::string to_string(ScanMode mode);

struct ClassProportions {
  double trivial = 0;
  double equilateral = 0;
  double isosceles = 0;
  double non_ultrametric = 0;
};

struct UltrametricityReport {
  ScanMode mode = ScanMode::kGlobalExhaustive;
  std::string classifier;
  std::size_t n = 0;  // points (global) or sequence length (linear)
  ClassCounts counts;
  std::optional<std::uint64_t> seed;    // sampled scans only
  std::optional<std::uint64_t> budget;  // sampled scans only
  // Linear scans: distinct term sets among non-trivial windows.
  std::optional<std::uint64_t> unique_triplets;
  std::optional<std::uint64_t> unique_ultrametric;

  std::uint64_t total_considered() const { return counts.total(); }
  // Over all considered triplets; sums to 1.
  ClassProportions proportions() const;
  // Over non-trivial triplets (trivial = 0); sums to 1 when defined.
  ClassProportions nontrivial_proportions() const;
  // (equilateral + isosceles) / (total - trivial); 0 when undefined.
  double index() const;
  bool index_defined() const { return counts.nontrivial() > 0; }
  std::optional<double> unique_index() const;
};

struct ScanOptions {
  std::uint64_t budget = 4'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// C(n, 3) without overflow for n < 2^21.
std::uint64_t triplet_count(std::uint64_t n);

// Triplets in lexicographic (i < j < k) order: the loops i = 0..n-3,
// j = i+1..n-2, k = j+1..n-1. Exhaustive when C(n,3) <= budget, otherwise a
// uniform sample without replacement of `budget` triplets.
UltrametricityReport scan_global(const TripletClassifier& classifier,
                                 const ScanOptions& options = {});

// Sorted uniform sample without replacement of `count` indices from
// [0, population), seeded.
std::vector<std::uint64_t> sample_indices(std::uint64_t population,
                                          std::uint64_t count,
                                          std::uint64_t seed);

// Successive windows (t, t+1, t+2) of the reduced document, never crossing
// a document boundary. point_ids maps terms to classifier indices.
UltrametricityReport scan_linear(const ReducedDocument& reduced,
                                 std::span<const std::string> point_ids,
                                 const TripletClassifier& classifier);

// "label  total  isosceles%  equilateral%  non-UM%" with percentages of
// non-trivial triplets rounded to integers.
std::string table_row(std::string_view label,
                      const UltrametricityReport& report);
std::string table_header();

}  // namespace ultratext
