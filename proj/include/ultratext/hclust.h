#pragma once

// Stored-matrix agglomerative clustering, cophenetic distances, cuts and the
// tree-fit stress measure.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ultratext {

enum class Linkage { kSingle, kComplete, kWard };

Linkage parse_linkage(std::string_view name);
std::string to_string(Linkage linkage);

// Node references: terminals are 0..n-1, merge r (0-based) is node n + r.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double level = 0;
  std::size_t size = 0;

  bool operator==(const Merge&) const = default;
};

struct Dendrogram {
  std::vector<std::string> labels;
  std::vector<Merge> merges;
  bool canonical = false;

  std::size_t leaf_count() const { return labels.size(); }
  bool is_leaf(std::size_t node) const { return node < labels.size(); }
  const Merge& merge_of(std::size_t node) const {
    return merges[node - labels.size()];
  }
  std::size_t root() const { return labels.size() + merges.size() - 1; }

  // Terminal indices in left-to-right (in-order) position.
  std::vector<std::size_t> leaf_order() const;
  // Parent node of every node; the root maps to itself.
  std::vector<std::size_t> parents() const;
};

// Throws DomainError unless the merge list is a valid binary hierarchy with
// non-decreasing levels and consistent sizes.
void validate(const Dendrogram& dendrogram);

// Lance-Williams agglomeration over a symmetric, zero-diagonal, nonnegative
// dissimilarity matrix. Ward expects squared Euclidean distances; weights
// default to unit masses. Ties go to the lowest (row, column) cluster pair,
// where a merged cluster keeps the lower of its two slots.
Dendrogram agglomerate(const Eigen::MatrixXd& dissimilarity, Linkage linkage,
                       std::vector<std::string> labels = {},
                       std::span<const double> weights = {});

// delta(i, j) = level of the lowest merge joining i and j.
Eigen::MatrixXd cophenetic(const Dendrogram& dendrogram);

// Maximal subtrees whose merge levels are all <= level, each sorted, ordered
// by smallest member.
std::vector<std::vector<std::size_t>> cut_clusters(const Dendrogram& dendrogram,
                                                   double level);

// Sum over unique pairs of (delta - d)^2 divided by the sum of d^2.
double tree_fit_stress(const Eigen::MatrixXd& dissimilarity,
                       const Dendrogram& dendrogram);

}  // namespace ultratext
