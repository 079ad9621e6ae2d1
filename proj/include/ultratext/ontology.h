#pragma once

// From dendrograms to oriented trees and concept hierarchies.
//
// Canonical form places, at every internal node, the child whose subtree
// holds the earlier agglomeration on the left; a bare terminal has no
// agglomeration and so sits on the right of any cluster. Reading terminals
// left to right then follows the agglomeration sequence.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ultratext/corpus.h"
#include "ultratext/cvnc.h"
#include "ultratext/hclust.h"

namespace ultratext {

Dendrogram canonicalize(const Dendrogram& dendrogram);
bool is_canonical(const Dendrogram& dendrogram);

// p[i] for terminal position i (0-based): the 1-based merge rank at which the
// terminal first joins a terminal to its right; the rightmost gets n.
std::vector<std::size_t> packed_permutation(const Dendrogram& canonical);

// Terminal labels promoted onto the n-1 internal nodes plus a virtual root.
struct PromotedTree {
  std::vector<std::string> labels;         // dendrogram terminal labels
  std::vector<std::size_t> internal_label;  // merge r -> terminal index
  std::size_t root_label = 0;              // terminal on the virtual root
  // Oriented arcs: merge r -> parent merge, or merges.size() for the
  // virtual root.
  std::vector<std::size_t> arc_target;
};

PromotedTree promote_labels(const Dendrogram& canonical);

enum class DominanceDirection {
  kLaterDominates,    // right (later formed) side dominates
  kEarlierDominates,  // inverted
};

DominanceDirection parse_direction(std::string_view name);
std::string to_string(DominanceDirection direction);

struct HierarchyOptions {
  DominanceDirection direction = DominanceDirection::kLaterDominates;
  // Merges whose level differs from their parent's by at most this are
  // collapsed into one multiway (ex aequo) node.
  double level_tolerance = 0.0;
};

struct ConceptNode {
  std::string id;
  std::string label;
  std::vector<std::string> members;  // terms held directly by this node
  double level = 0;
  std::vector<std::string> peers;  // ex aequo sibling node ids
};

struct ConceptArc {
  std::string from;  // dominated
  std::string to;    // dominating
};

struct ConceptHierarchy {
  std::vector<ConceptNode> nodes;
  std::vector<ConceptArc> arcs;
  DominanceDirection direction = DominanceDirection::kLaterDominates;

  const ConceptNode* find(std::string_view id) const;
  const ConceptNode* node_of_term(std::string_view term) const;
  // Arcs to climb before reaching a node with nothing above it (0 = top).
  // Peers without an arc of their own share their group's depth.
  std::vector<std::size_t> dominance_depths() const;
};

ConceptHierarchy derive_concept_hierarchy(const Dendrogram& canonical,
                                          const HierarchyOptions& options = {});

// Graphviz rendering: arcs point from dominated to dominating concept, peers
// share a rank and are joined by dashed edges.
void write_dot(const ConceptHierarchy& hierarchy, std::ostream& out);

// ((x, y) z): x and y are close, both far from the apex z.
struct SubsumptionTriple {
  std::string x;
  std::string y;
  std::string apex;
  std::vector<std::size_t> positions;  // window starts in the reduced document

  // Same unordered pair and apex.
  bool same_relation(const SubsumptionTriple& other) const;
};

std::vector<SubsumptionTriple> extract_subsumption_triples(
    const ReducedDocument& reduced, const CodedDistanceMatrix& coded);

}  // namespace ultratext
