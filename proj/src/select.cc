#include "ultratext/select.h"

#include <algorithm>
#include <numeric>

#include "ultratext/error.h"

namespace ultratext {

ColumnCoords parse_column_coords(std::string_view name) {
  if (name == "principal") return ColumnCoords::kPrincipal;
  if (name == "standard") return ColumnCoords::kStandard;
  throw DomainError("unknown column coordinates: " + std::string(name));
}

std::string to_string(ColumnCoords coords) {
  return coords == ColumnCoords::kPrincipal ? "principal" : "standard";
}

NearestTermsResult nearest_terms(const FactorEmbedding& embedding,
                                 std::string_view row_id, std::size_t k,
                                 ColumnCoords coords) {
  if (k < 1) throw DomainError("k must be at least 1");
  auto row_it =
      std::find(embedding.row_ids.begin(), embedding.row_ids.end(), row_id);
  if (row_it == embedding.row_ids.end()) {
    throw DomainError("unknown row id: " + std::string(row_id));
  }
  const auto row = static_cast<Eigen::Index>(row_it - embedding.row_ids.begin());
  const Eigen::MatrixXd cols = coords == ColumnCoords::kPrincipal
                                   ? embedding.col_coords
                                   : embedding.standard_col_coords();
  const Eigen::RowVectorXd point = embedding.row_coords.row(row);

  std::vector<std::pair<std::string, double>> all;
  all.reserve(embedding.col_ids.size());
  for (Eigen::Index j = 0; j < cols.rows(); ++j) {
    all.emplace_back(embedding.col_ids[static_cast<std::size_t>(j)],
                     (cols.row(j) - point).squaredNorm());
  }
  const std::size_t take = std::min(k, all.size());
  auto closer = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take),
                    all.end(), closer);
  all.resize(take);
  return {std::string(row_id), k, std::move(all)};
}

SupportSet suggest_support(const FactorEmbedding& embedding,
                           std::size_t k_per_row, ColumnCoords coords) {
  SupportSet support;
  for (const auto& id : embedding.row_ids) {
    for (const auto& [term, d2] :
         nearest_terms(embedding, id, k_per_row, coords).results) {
      support.add(term);
    }
  }
  return support;
}

}  // namespace ultratext
