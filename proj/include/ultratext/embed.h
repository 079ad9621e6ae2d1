#pragma once

// Chi-squared profile distances and correspondence analysis.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ultratext/corpus.h"

namespace ultratext {

// Full-rank factor coordinates of rows and columns in a shared space.
// Coordinates are principal: squared Euclidean distance between two row
// points equals their chi-squared profile distance.
struct FactorEmbedding {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  Eigen::MatrixXd row_coords;  // n x rank
  Eigen::MatrixXd col_coords;  // m x rank
  Eigen::VectorXd eigenvalues;  // descending, strictly positive
  Eigen::VectorXd row_masses;
  Eigen::VectorXd col_masses;
  std::vector<std::string> dropped_rows;
  std::vector<std::string> dropped_cols;

  Eigen::Index rank() const { return eigenvalues.size(); }

  // Column coordinates scaled to unit inertia per axis.
  Eigen::MatrixXd standard_col_coords() const;
};

// Sum_j (1/f_j) (f_ij/f_i - f_i'j/f_i')^2 on relative frequencies.
// Columns with a zero total contribute nothing.
double chi2_distance_sq(const FrequencyMatrix& matrix, std::size_t i,
                        std::size_t i2);

// Pairs each row profile value p with its complement 1 - p, giving an
// n x 2m matrix whose rows all sum to m. Complement columns are suffixed
// with "#c" and follow their originals.
FrequencyMatrix double_profiles(const FrequencyMatrix& matrix);

// Relative singular values at or below this are treated as zero.
inline constexpr double kRankTolerance = 1e-12;

FactorEmbedding correspondence_analysis(const FrequencyMatrix& matrix);

}  // namespace ultratext
