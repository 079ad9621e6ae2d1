#pragma once

// "Change versus no change" recoding of squared distances onto {0, 1, 2}.
//
// With the default global-mean threshold and two levels the coded values
// form a metric: identical points get 0, pairs at or below the mean squared
// distance get 1 ("no change") and the rest get 2 ("change").

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ultratext {

enum class ThresholdMode {
  kGlobalMean,  // one threshold over all unique pairs
  kPerTriplet,  // threshold recomputed as the mean of each triplet's values
};

ThresholdMode parse_threshold_mode(std::string_view name);
std::string to_string(ThresholdMode mode);

struct RecodeOptions {
  ThresholdMode mode = ThresholdMode::kGlobalMean;
  int levels = 2;  // p; values above 2 use equal-width bins over [min, max]
  unsigned threads = 1;
};

class CodedDistanceMatrix {
 public:
  CodedDistanceMatrix() = default;

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  ThresholdMode mode() const { return mode_; }
  int levels() const { return levels_; }
  // Global threshold; NaN in per-triplet mode.
  double threshold() const { return threshold_; }

  // Pairwise code. Throws in per-triplet mode, where codes only exist
  // relative to a triplet.
  int at(std::size_t i, std::size_t j) const;

  // Codes of (i,j), (i,k), (j,k) under the matrix's threshold mode.
  std::array<int, 3> triplet_codes(std::size_t i, std::size_t j,
                                   std::size_t k) const;

  // Row-major n x n code table (global mode only).
  Eigen::MatrixXi to_matrix() const;

 private:
  friend CodedDistanceMatrix recode_distances(const Eigen::MatrixXd&,
                                              std::vector<std::string>,
                                              const RecodeOptions&);
  std::vector<std::string> ids_;
  std::vector<std::uint8_t> codes_;  // global mode
  Eigen::MatrixXd squared_;          // per-triplet mode
  double threshold_ = 0;
  ThresholdMode mode_ = ThresholdMode::kGlobalMean;
  int levels_ = 2;
};

// Pairwise squared Euclidean distances between the rows of coords.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& coords,
                                  unsigned threads = 1);

// Recodes a symmetric matrix of squared distances (or any dissimilarity).
CodedDistanceMatrix recode_distances(const Eigen::MatrixXd& squared,
                                     std::vector<std::string> ids,
                                     const RecodeOptions& options = {});

CodedDistanceMatrix recode_coordinates(const Eigen::MatrixXd& coords,
                                       std::vector<std::string> ids,
                                       const RecodeOptions& options = {});

// Per-triplet coding of three squared distances: threshold is their mean.
std::array<int, 3> code_triplet(double d_ij, double d_ik, double d_jk);

// Coded matrix as a square TSV with an id header row and id first column.
void write_tsv(const CodedDistanceMatrix& coded, std::ostream& out);

}  // namespace ultratext
