#include "ultratext/hclust.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ultratext/error.h"

namespace ultratext {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::vector<std::vector<std::size_t>> members_by_node(const Dendrogram& d) {
  const std::size_t n = d.leaf_count();
  std::vector<std::vector<std::size_t>> members(n + d.merges.size());
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  for (std::size_t r = 0; r < d.merges.size(); ++r) {
    auto& m = members[n + r];
    m = members[d.merges[r].left];
    const auto& right = members[d.merges[r].right];
    m.insert(m.end(), right.begin(), right.end());
  }
  return members;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

Linkage parse_linkage(std::string_view name) {
  if (name == "single") return Linkage::kSingle;
  if (name == "complete") return Linkage::kComplete;
  if (name == "ward") return Linkage::kWard;
  throw DomainError("unknown clustering criterion: " + std::string(name));
}

std::string to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::kSingle:
      return "single";
    case Linkage::kComplete:
      return "complete";
    case Linkage::kWard:
      return "ward";
  }
  return "?";
}

std::vector<std::size_t> Dendrogram::leaf_order() const {
  std::vector<std::size_t> order;
  if (labels.empty()) return order;
  if (merges.empty()) return {0};
  std::vector<std::size_t> stack{root()};
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    if (is_leaf(node)) {
      order.push_back(node);
    } else {
      stack.push_back(merge_of(node).right);
      stack.push_back(merge_of(node).left);
    }
  }
  return order;
}

std::vector<std::size_t> Dendrogram::parents() const {
  const std::size_t total = labels.size() + merges.size();
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t r = 0; r < merges.size(); ++r) {
    parent[merges[r].left] = labels.size() + r;
    parent[merges[r].right] = labels.size() + r;
  }
  return parent;
}

void validate(const Dendrogram& d) {
  const std::size_t n = d.leaf_count();
  if (n == 0) throw DomainError("dendrogram has no terminals");
  if (d.merges.size() != n - 1) {
    throw DomainError("dendrogram needs n-1 merges");
  }
  std::vector<bool> used(n + d.merges.size(), false);
  std::vector<std::size_t> size(n + d.merges.size(), 1);
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < d.merges.size(); ++r) {
    const Merge& m = d.merges[r];
    const std::size_t self = n + r;
    if (m.left >= self || m.right >= self || m.left == m.right) {
      throw DomainError("merge " + std::to_string(r) +
                        " references an invalid node");
    }
    if (used[m.left] || used[m.right]) {
      throw DomainError("node used twice as a child at merge " +
                        std::to_string(r));
    }
    used[m.left] = used[m.right] = true;
    if (!std::isfinite(m.level) || m.level < previous) {
      throw DomainError("merge levels must be finite and non-decreasing");
    }
    previous = m.level;
    size[self] = size[m.left] + size[m.right];
    if (m.size != size[self]) {
      throw DomainError("merge " + std::to_string(r) + " has wrong size");
    }
  }
}

Dendrogram agglomerate(const Eigen::MatrixXd& dissimilarity, Linkage linkage,
                       std::vector<std::string> labels,
                       std::span<const double> weights) {
  const auto n = static_cast<std::size_t>(dissimilarity.rows());
  if (dissimilarity.cols() != dissimilarity.rows()) {
    throw DomainError("dissimilarity matrix not square");
  }
  if (n < 2) throw DomainError("clustering needs at least 2 points");
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<Eigen::Index>(i);
    if (dissimilarity(a, a) != 0) throw DomainError("nonzero diagonal");
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = static_cast<Eigen::Index>(j);
      const double v = dissimilarity(a, b);
      if (!std::isfinite(v) || v < 0) {
        throw DomainError("dissimilarities must be finite and nonnegative");
      }
      if (v != dissimilarity(b, a)) throw DomainError("asymmetric matrix");
    }
  }
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) throw DomainError("label count mismatch");
  std::vector<double> weight(n, 1.0);
  if (!weights.empty()) {
    if (weights.size() != n) throw DomainError("weight count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(weights[i] > 0)) throw DomainError("weights must be positive");
      weight[i] = weights[i];
    }
  }

  Eigen::MatrixXd d = dissimilarity;
  std::vector<bool> active(n, true);
  std::vector<std::size_t> node(n), size(n, 1);
  std::iota(node.begin(), node.end(), std::size_t{0});
  std::vector<std::size_t> nn(n, kNone);
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());

  auto at = [&d](std::size_t i, std::size_t j) -> double& {
    return d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  // Nearest active partner with a higher slot; ties keep the lowest slot.
  auto refresh = [&](std::size_t i) {
    nn[i] = kNone;
    nnd[i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (active[j] && at(i, j) < nnd[i]) {
        nnd[i] = at(i, j);
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  Dendrogram out;
  out.labels = std::move(labels);
  out.merges.reserve(n - 1);
  double previous = 0;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t i = kNone;
    for (std::size_t k = 0; k < n; ++k) {
      if (active[k] && nn[k] != kNone && (i == kNone || nnd[k] < nnd[i])) {
        i = k;
      }
    }
    const std::size_t j = nn[i];
    const double dij = at(i, j);
    double level = dij;
    if (linkage == Linkage::kWard) level = std::max(level, previous);
    previous = level;
    out.merges.push_back({node[i], node[j], level, size[i] + size[j]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      const double dki = at(k, i), dkj = at(k, j);
      double updated = 0;
      switch (linkage) {
        case Linkage::kSingle:
          updated = std::min(dki, dkj);
          break;
        case Linkage::kComplete:
          updated = std::max(dki, dkj);
          break;
        case Linkage::kWard: {
          const double wi = weight[i], wj = weight[j], wk = weight[k];
          updated = ((wi + wk) * dki + (wj + wk) * dkj - wk * dij) /
                    (wi + wj + wk);
          break;
        }
      }
      at(k, i) = at(i, k) = updated;
    }
    active[j] = false;
    node[i] = n + step;
    size[i] += size[j];
    weight[i] += weight[j];

    refresh(i);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i) continue;
      if (nn[k] == i || nn[k] == j) {
        refresh(k);
      } else if (k < i && (at(k, i) < nnd[k] ||
                           (at(k, i) == nnd[k] && i < nn[k]))) {
        nn[k] = i;
        nnd[k] = at(k, i);
      }
    }
  }
  return out;
}

Eigen::MatrixXd cophenetic(const Dendrogram& dendrogram) {
  const std::size_t n = dendrogram.leaf_count();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                               static_cast<Eigen::Index>(n));
  const auto members = members_by_node(dendrogram);
  for (const Merge& m : dendrogram.merges) {
    for (std::size_t a : members[m.left]) {
      for (std::size_t b : members[m.right]) {
        out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            m.level;
        out(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
            m.level;
      }
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> cut_clusters(const Dendrogram& dendrogram,
                                                   double level) {
  const std::size_t n = dendrogram.leaf_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  // Representative terminal of every node.
  std::vector<std::size_t> rep(n + dendrogram.merges.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n),
            std::size_t{0});
  for (std::size_t r = 0; r < dendrogram.merges.size(); ++r) {
    const Merge& m = dendrogram.merges[r];
    rep[n + r] = rep[m.left];
    if (m.level <= level) {
      const std::size_t a = find_root(parent, rep[m.left]);
      const std::size_t b = find_root(parent, rep[m.right]);
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> slot(n, kNone);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find_root(parent, i);
    if (slot[root] == kNone) {
      slot[root] = clusters.size();
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(i);
  }
  return clusters;
}

double tree_fit_stress(const Eigen::MatrixXd& dissimilarity,
                       const Dendrogram& dendrogram) {
  const auto n = static_cast<Eigen::Index>(dendrogram.leaf_count());
  if (dissimilarity.rows() != n || dissimilarity.cols() != n) {
    throw DomainError("dissimilarity does not match the dendrogram");
  }
  const Eigen::MatrixXd delta = cophenetic(dendrogram);
  double num = 0, den = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = dissimilarity(i, j);
      num += (delta(i, j) - d) * (delta(i, j) - d);
      den += d * d;
    }
  }
  if (den == 0) throw DomainError("dissimilarities are all zero");
  return num / den;
}

}  // namespace ultratext
