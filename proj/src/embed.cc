#include "ultratext/embed.h"

#include <cmath>

#include "ultratext/error.h"

namespace ultratext {

Eigen::MatrixXd FactorEmbedding::standard_col_coords() const {
  Eigen::MatrixXd out = col_coords;
  for (Eigen::Index a = 0; a < rank(); ++a) {
    out.col(a) /= std::sqrt(eigenvalues(a));
  }
  return out;
}

double chi2_distance_sq(const FrequencyMatrix& matrix, std::size_t i,
                        std::size_t i2) {
  const auto& v = matrix.values;
  const auto r1 = static_cast<Eigen::Index>(i);
  const auto r2 = static_cast<Eigen::Index>(i2);
  if (r1 >= v.rows() || r2 >= v.rows()) {
    throw DomainError("row index out of range");
  }
  const double total = v.sum();
  const double t1 = v.row(r1).sum();
  const double t2 = v.row(r2).sum();
  if (t1 <= 0) throw DomainError("zero row total: " + matrix.row_ids[i]);
  if (t2 <= 0) throw DomainError("zero row total: " + matrix.row_ids[i2]);
  const Eigen::VectorXd col = v.colwise().sum().transpose();
  double d = 0;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    if (col(j) <= 0) continue;
    const double fj = col(j) / total;
    const double diff = v(r1, j) / t1 - v(r2, j) / t2;
    d += diff * diff / fj;
  }
  return d;
}

FrequencyMatrix double_profiles(const FrequencyMatrix& matrix) {
  if (matrix.mode != MatrixMode::kCounts) {
    throw DomainError("doubling requires a counts matrix");
  }
  const auto n = matrix.values.rows();
  const auto m = matrix.values.cols();
  FrequencyMatrix out;
  out.mode = MatrixMode::kCounts;
  out.row_ids = matrix.row_ids;
  for (const auto& c : matrix.col_ids) {
    out.col_ids.push_back(c);
    out.col_ids.push_back(c + "#c");
  }
  out.values.resize(n, 2 * m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double total = matrix.values.row(i).sum();
    if (total <= 0) {
      throw DomainError("zero row cannot be doubled: " +
                        matrix.row_ids[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      const double p = matrix.values(i, j) / total;
      out.values(i, 2 * j) = p;
      out.values(i, 2 * j + 1) = 1.0 - p;
    }
  }
  return out;
}

FactorEmbedding correspondence_analysis(const FrequencyMatrix& matrix) {
  if ((matrix.values.array() < 0).any()) {
    throw DomainError("correspondence analysis needs nonnegative entries");
  }
  const double total = matrix.values.sum();
  if (!(total > 0)) throw DomainError("all-zero matrix");

  FactorEmbedding emb;
  const auto zero_rows = matrix.zero_rows();
  const auto zero_cols = matrix.zero_cols();
  std::vector<Eigen::Index> rows, cols;
  for (std::size_t i = 0; i < zero_rows.size(); ++i) {
    if (zero_rows[i]) {
      emb.dropped_rows.push_back(matrix.row_ids[i]);
    } else {
      rows.push_back(static_cast<Eigen::Index>(i));
      emb.row_ids.push_back(matrix.row_ids[i]);
    }
  }
  for (std::size_t j = 0; j < zero_cols.size(); ++j) {
    if (zero_cols[j]) {
      emb.dropped_cols.push_back(matrix.col_ids[j]);
    } else {
      cols.push_back(static_cast<Eigen::Index>(j));
      emb.col_ids.push_back(matrix.col_ids[j]);
    }
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd p(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      p(i, j) = matrix.values(rows[i], cols[j]) / total;
    }
  }
  emb.row_masses = p.rowwise().sum();
  emb.col_masses = p.colwise().sum().transpose();
  const Eigen::VectorXd rs = emb.row_masses.cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd cs = emb.col_masses.cwiseSqrt().cwiseInverse();

  // Standardized residuals; centering removes the trivial factor.
  Eigen::MatrixXd s = p - emb.row_masses * emb.col_masses.transpose();
  s = rs.asDiagonal() * s * cs.asDiagonal();

  // The decomposition runs on whichever orientation has fewer columns; the
  // other side follows from the singular vectors.
  const bool wide = m > n;
  const Eigen::MatrixXd a = wide ? Eigen::MatrixXd(s.transpose()) : s;
  Eigen::JacobiSVD<Eigen::MatrixXd, Eigen::ColPivHouseholderQRPreconditioner>
      svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::Index rank = 0;
  const double largest = sv.size() > 0 ? sv(0) : 0.0;
  while (rank < sv.size() && largest > 0 &&
         sv(rank) > kRankTolerance * largest) {
    ++rank;
  }
  const Eigen::MatrixXd u = wide ? svd.matrixV() : svd.matrixU();
  const Eigen::MatrixXd v = wide ? svd.matrixU() : svd.matrixV();

  emb.eigenvalues = sv.head(rank).array().square();
  emb.row_coords = rs.asDiagonal() * u.leftCols(rank) *
                   sv.head(rank).asDiagonal();
  emb.col_coords = cs.asDiagonal() * v.leftCols(rank) *
                   sv.head(rank).asDiagonal();

  // Fix axis signs so the largest-magnitude column coordinate is positive.
  for (Eigen::Index a2 = 0; a2 < rank; ++a2) {
    Eigen::Index arg = 0;
    emb.col_coords.col(a2).cwiseAbs().maxCoeff(&arg);
    if (emb.col_coords(arg, a2) < 0) {
      emb.col_coords.col(a2) *= -1;
      emb.row_coords.col(a2) *= -1;
    }
  }
  return emb;
}

}  // namespace ultratext
