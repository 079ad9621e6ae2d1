#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "ultratext/embed.h"
#include "ultratext/error.h"

namespace ultratext {
namespace {

FrequencyMatrix make(const Eigen::MatrixXd& values) {
  FrequencyMatrix m;
  m.values = values;
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    m.row_ids.push_back("r" + std::to_string(i));
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    m.col_ids.push_back("c" + std::to_string(j));
  return m;
}

FrequencyMatrix random_counts(oracle::Rng& rng, Eigen::Index n, Eigen::Index m,
                              int max_count = 9) {
  Eigen::MatrixXd v(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      v(i, j) = static_cast<double>(oracle::uniform_int(rng, 0, max_count));
  for (Eigen::Index i = 0; i < n; ++i) v(i, i % m) += 1;  // no empty rows
  for (Eigen::Index j = 0; j < m; ++j) v(j % n, j) += 1;  // no empty columns
  return make(v);
}

TEST(Chi2, IdenticalProfilesAreAtZero) {
  Eigen::MatrixXd v(2, 3);
  v << 1, 2, 3, 2, 4, 6;
  EXPECT_DOUBLE_EQ(chi2_distance_sq(make(v), 0, 1), 0.0);
}

TEST(Chi2, DisjointUnitRows) {
  EXPECT_DOUBLE_EQ(chi2_distance_sq(make(Eigen::MatrixXd::Identity(2, 2)), 0, 1),
                   4.0);
}

TEST(Chi2, InvariantToRowScaling) {
  oracle::Rng rng(3);
  FrequencyMatrix m = random_counts(rng, 5, 6);
  // A scaled copy of row 2 sits at distance 0 from it and at the same
  // distance from every other row.
  FrequencyMatrix twin = m;
  twin.values.conservativeResize(6, Eigen::NoChange);
  twin.values.row(5) = m.values.row(2) * 7;
  twin.row_ids.push_back("twin");
  EXPECT_NEAR(chi2_distance_sq(twin, 2, 5), 0.0, 1e-15);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(chi2_distance_sq(twin, i, 2), chi2_distance_sq(twin, i, 5),
                1e-12);
  }
}

TEST(Chi2, MatchesDirectFormula) {
  oracle::Rng rng(4);
  const FrequencyMatrix m = random_counts(rng, 6, 8);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index k = 0; k < 6; ++k)
      EXPECT_NEAR(chi2_distance_sq(m, i, k), oracle::naive_chi2(m.values, i, k),
                  1e-12);
}

TEST(Doubling, UniformAndConcentratedRows) {
  Eigen::MatrixXd v(2, 2);
  v << 2, 2, 4, 0;
  const FrequencyMatrix d = double_profiles(make(v));
  Eigen::MatrixXd expected(2, 4);
  expected << 0.5, 0.5, 0.5, 0.5, 1, 0, 0, 1;
  EXPECT_EQ(d.values, expected);
  EXPECT_EQ(d.col_ids, (std::vector<std::string>{"c0", "c0#c", "c1", "c1#c"}));
}

TEST(Doubling, RowsSumToColumnCount) {
  oracle::Rng rng(5);
  const FrequencyMatrix d = double_profiles(random_counts(rng, 9, 7));
  for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
    EXPECT_NEAR(d.values.row(i).sum(), 7.0, 1e-12);
  }
}

TEST(Doubling, RejectsEmptyRowsAndPresence) {
  Eigen::MatrixXd v(2, 2);
  v << 1, 1, 0, 0;
  EXPECT_THROW(double_profiles(make(v)), DomainError);
  FrequencyMatrix p = make(Eigen::MatrixXd::Ones(2, 2));
  p.mode = MatrixMode::kPresence;
  EXPECT_THROW(double_profiles(p), DomainError);
}

TEST(Ca, RowDistancesEqualChi2) {
  oracle::Rng rng(6);
  const FrequencyMatrix m = random_counts(rng, 10, 20);
  const FactorEmbedding e = correspondence_analysis(m);
  EXPECT_LE(e.rank(), 9);
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index k = i + 1; k < 10; ++k) {
      const double factor = (e.row_coords.row(i) - e.row_coords.row(k)).squaredNorm();
      const double chi2 = oracle::naive_chi2(m.values, i, k);
      EXPECT_LE(std::abs(factor - chi2), 1e-8 * chi2);
    }
  }
}

TEST(Ca, ColumnDistancesEqualChi2OfTranspose) {
  oracle::Rng rng(7);
  const FrequencyMatrix m = random_counts(rng, 12, 5);
  const FactorEmbedding e = correspondence_analysis(m);
  const Eigen::MatrixXd t = m.values.transpose();
  for (Eigen::Index j = 0; j < 5; ++j) {
    for (Eigen::Index k = j + 1; k < 5; ++k) {
      const double factor = (e.col_coords.row(j) - e.col_coords.row(k)).squaredNorm();
      EXPECT_NEAR(factor, oracle::naive_chi2(t, j, k), 1e-9);
    }
  }
}

TEST(Ca, RankAndInertia) {
  oracle::Rng rng(8);
  const FrequencyMatrix m = random_counts(rng, 14, 40);
  const FactorEmbedding e = correspondence_analysis(m);
  EXPECT_EQ(e.rank(), 13);
  // Total inertia equals chi-squared over the grand total.
  const double n = m.values.sum();
  double chi2 = 0;
  for (Eigen::Index i = 0; i < 14; ++i)
    for (Eigen::Index j = 0; j < 40; ++j) {
      const double expected = m.values.row(i).sum() * m.values.col(j).sum() / n;
      chi2 += (m.values(i, j) - expected) * (m.values(i, j) - expected) / expected;
    }
  EXPECT_NEAR(e.eigenvalues.sum(), chi2 / n, 1e-10);
  for (Eigen::Index a = 1; a < e.rank(); ++a) {
    EXPECT_GE(e.eigenvalues(a - 1), e.eigenvalues(a));
  }
  // Principal row coordinates have inertia equal to the eigenvalue per axis.
  for (Eigen::Index a = 0; a < e.rank(); ++a) {
    const double inertia =
        (e.row_masses.array() * e.row_coords.col(a).array().square()).sum();
    EXPECT_NEAR(inertia, e.eigenvalues(a), 1e-10);
  }
}

TEST(Ca, TransitionFormula) {
  // Row points are barycentres of standard column points.
  oracle::Rng rng(9);
  const FrequencyMatrix m = random_counts(rng, 7, 9);
  const FactorEmbedding e = correspondence_analysis(m);
  const Eigen::MatrixXd std_cols = e.standard_col_coords();
  for (Eigen::Index i = 0; i < 7; ++i) {
    const Eigen::RowVectorXd profile = m.values.row(i) / m.values.row(i).sum();
    const Eigen::RowVectorXd bary = profile * std_cols;
    EXPECT_LE((bary - e.row_coords.row(i)).norm(), 1e-10);
  }
}

TEST(Ca, DropsZeroRowsAndColumns) {
  Eigen::MatrixXd v(4, 4);
  v << 1, 0, 2, 0, 0, 0, 0, 0, 3, 0, 1, 0, 1, 0, 1, 0;
  const FactorEmbedding e = correspondence_analysis(make(v));
  EXPECT_EQ(e.dropped_rows, (std::vector<std::string>{"r1"}));
  EXPECT_EQ(e.dropped_cols, (std::vector<std::string>{"c1", "c3"}));
  EXPECT_EQ(e.row_ids.size(), 3u);
  EXPECT_EQ(e.col_ids.size(), 2u);
  EXPECT_EQ(e.rank(), 1);
}

TEST(Ca, PresenceMatrixRankBelowFull) {
  // 65 x 30 presence table with empty rows and duplicate columns.
  oracle::Rng rng(10);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(65, 30);
  for (Eigen::Index i = 0; i < 60; ++i)
    for (Eigen::Index j = 0; j < 25; ++j)
      v(i, j) = oracle::uniform_int(rng, 0, 3) == 0 ? 1 : 0;
  for (Eigen::Index j = 0; j < 25; ++j) v(j, j) = 1;
  for (Eigen::Index j = 25; j < 28; ++j) v.col(j) = v.col(j - 25);
  FrequencyMatrix m = make(v);
  m.mode = MatrixMode::kPresence;
  const FactorEmbedding e = correspondence_analysis(m);
  EXPECT_EQ(e.dropped_rows.size(), 5u);
  EXPECT_EQ(e.dropped_cols.size(), 2u);
  EXPECT_EQ(e.rank(), 24);
}

TEST(Ca, RejectsNegativeAndEmpty) {
  Eigen::MatrixXd v(2, 2);
  v << 1, -1, 1, 1;
  EXPECT_THROW(correspondence_analysis(make(v)), DomainError);
  EXPECT_THROW(correspondence_analysis(make(Eigen::MatrixXd::Zero(2, 2))),
               DomainError);
}

TEST(Ca, DeterministicSigns) {
  oracle::Rng rng(12);
  const FrequencyMatrix m = random_counts(rng, 8, 6);
  const FactorEmbedding a = correspondence_analysis(m);
  const FactorEmbedding b = correspondence_analysis(m);
  EXPECT_EQ(a.row_coords, b.row_coords);
  for (Eigen::Index k = 0; k < a.rank(); ++k) {
    Eigen::Index arg;
    a.col_coords.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(a.col_coords(arg, k), 0);
  }
}

}  // namespace
}  // namespace ultratext
