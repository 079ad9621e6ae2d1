#pragma once

// Terms closest to a text in the joint factor space.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ultratext/corpus.h"
#include "ultratext/embed.h"

namespace ultratext {

enum class ColumnCoords { kPrincipal, kStandard };

ColumnCoords parse_column_coords(std::string_view name);
std::string to_string(ColumnCoords coords);

struct NearestTermsResult {
  std::string query;
  std::size_t k = 0;
  std::vector<std::pair<std::string, double>> results;  // (term, d^2)
};

// Exact k nearest column points to a row point over all factors. Ties are
// broken by term in lexicographic order.
NearestTermsResult nearest_terms(const FactorEmbedding& embedding,
                                 std::string_view row_id, std::size_t k,
                                 ColumnCoords coords = ColumnCoords::kPrincipal);

// Union of the k nearest terms of every row, in row order.
SupportSet suggest_support(const FactorEmbedding& embedding,
                           std::size_t k_per_row,
                           ColumnCoords coords = ColumnCoords::kPrincipal);

}  // namespace ultratext
