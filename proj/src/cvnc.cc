#include "ultratext/cvnc.h"

#include <cmath>
#include <limits>
#include <ostream>

#include "ultratext/error.h"
#include "ultratext/parallel.h"

namespace ultratext {

ThresholdMode parse_threshold_mode(std::string_view name) {
  if (name == "global-mean") return ThresholdMode::kGlobalMean;
  if (name == "per-triplet") return ThresholdMode::kPerTriplet;
  throw DomainError("unknown threshold mode: " + std::string(name));
}

std::string to_string(ThresholdMode mode) {
  return mode == ThresholdMode::kGlobalMean ? "global-mean" : "per-triplet";
}

int CodedDistanceMatrix::at(std::size_t i, std::size_t j) const {
  if (mode_ == ThresholdMode::kPerTriplet) {
    throw DomainError("pairwise codes are undefined in per-triplet mode");
  }
  return codes_[i * ids_.size() + j];
}

std::array<int, 3> CodedDistanceMatrix::triplet_codes(std::size_t i,
                                                      std::size_t j,
                                                      std::size_t k) const {
  if (mode_ == ThresholdMode::kPerTriplet) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    const auto c = static_cast<Eigen::Index>(k);
    if (i == j || i == k || j == k) {
      return {i == j ? 0 : 1, i == k ? 0 : 1, j == k ? 0 : 1};
    }
    return code_triplet(squared_(a, b), squared_(a, c), squared_(b, c));
  }
  const std::size_t n = ids_.size();
  return {codes_[i * n + j], codes_[i * n + k], codes_[j * n + k]};
}

Eigen::MatrixXi CodedDistanceMatrix::to_matrix() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXi out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  return out;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& coords,
                                  unsigned threads) {
  const auto n = coords.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  parallel_chunks(static_cast<std::size_t>(n), threads,
                  [&](std::size_t begin, std::size_t end, unsigned) {
                    for (auto i = static_cast<Eigen::Index>(begin);
                         i < static_cast<Eigen::Index>(end); ++i) {
                      for (Eigen::Index j = 0; j < n; ++j) {
                        if (i == j) continue;
                        d(i, j) = (coords.row(i) - coords.row(j)).squaredNorm();
                      }
                    }
                  });
  return d;
}

std::array<int, 3> code_triplet(double d_ij, double d_ik, double d_jk) {
  const double mean = (d_ij + d_ik + d_jk) / 3.0;
  auto code = [mean](double d) { return d == 0.0 ? 0 : (d <= mean ? 1 : 2); };
  return {code(d_ij), code(d_ik), code(d_jk)};
}

CodedDistanceMatrix recode_distances(const Eigen::MatrixXd& squared,
                                     std::vector<std::string> ids,
                                     const RecodeOptions& options) {
  const auto n = squared.rows();
  if (squared.cols() != n) throw DomainError("distance matrix not square");
  if (n < 2) throw DomainError("recoding needs at least 2 points");
  if (static_cast<Eigen::Index>(ids.size()) != n) {
    throw DomainError("id count does not match distance matrix");
  }
  if (options.levels < 2) throw DomainError("levels must be >= 2");
  if (!squared.allFinite()) throw DomainError("non-finite distance");

  double sum = 0, lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = squared(i, j);
      if (d < 0) throw DomainError("negative distance");
      if (d != squared(j, i)) throw DomainError("asymmetric distance matrix");
      sum += d;
      if (d > 0) lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2;

  CodedDistanceMatrix out;
  out.ids_ = std::move(ids);
  out.mode_ = options.mode;
  out.levels_ = options.levels;
  if (options.mode == ThresholdMode::kPerTriplet) {
    out.threshold_ = std::numeric_limits<double>::quiet_NaN();
    out.squared_ = squared;
    return out;
  }
  out.threshold_ = sum / pairs;
  const double threshold = out.threshold_;
  const int p = options.levels;
  auto code = [&](double d) -> std::uint8_t {
    if (d == 0.0) return 0;
    if (p == 2) return d <= threshold ? 1 : 2;
    if (!(hi > lo)) return 1;
    const auto bin = static_cast<int>(std::floor((d - lo) / (hi - lo) * p));
    return static_cast<std::uint8_t>(1 + std::min(p - 1, bin));
  };
  const auto un = static_cast<std::size_t>(n);
  out.codes_.assign(un * un, 0);
  parallel_chunks(un, options.threads,
                  [&](std::size_t begin, std::size_t end, unsigned) {
                    for (std::size_t i = begin; i < end; ++i) {
                      for (std::size_t j = 0; j < un; ++j) {
                        if (i == j) continue;
                        out.codes_[i * un + j] =
                            code(squared(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(j)));
                      }
                    }
                  });
  return out;
}

CodedDistanceMatrix recode_coordinates(const Eigen::MatrixXd& coords,
                                       std::vector<std::string> ids,
                                       const RecodeOptions& options) {
  return recode_distances(squared_distances(coords, options.threads),
                          std::move(ids), options);
}

void write_tsv(const CodedDistanceMatrix& coded, std::ostream& out) {
  out << "id";
  for (const auto& id : coded.ids()) out << '\t' << id;
  out << '\n';
  for (std::size_t i = 0; i < coded.size(); ++i) {
    out << coded.ids()[i];
    for (std::size_t j = 0; j < coded.size(); ++j) {
      out << '\t' << coded.at(i, j);
    }
    out << '\n';
  }
}

}  // namespace ultratext
