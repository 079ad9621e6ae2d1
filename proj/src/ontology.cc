#include "ultratext/ontology.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>
#include <unordered_map>

#include "ultratext/error.h"
#include "ultratext/umetry.h"

namespace ultratext {
namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

// Earliest merge rank inside each node's subtree; terminals never merged.
std::vector<std::size_t> earliest_merge(const Dendrogram& d) {
  const std::size_t n = d.leaf_count();
  std::vector<std::size_t> key(n + d.merges.size(), kNever);
  for (std::size_t r = 0; r < d.merges.size(); ++r) {
    const Merge& m = d.merges[r];
    key[n + r] = std::min({r, key[m.left], key[m.right]});
  }
  return key;
}

void require_canonical(const Dendrogram& d) {
  validate(d);
  if (!is_canonical(d)) throw DomainError("dendrogram is not canonical");
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

class HierarchyBuilder {
 public:
  HierarchyBuilder(const Dendrogram& d, const HierarchyOptions& options)
      : d_(d), options_(options), n_(d.leaf_count()) {
    const auto parent = d.parents();
    collapsed_.assign(d.merges.size(), false);
    for (std::size_t r = 0; r < d.merges.size(); ++r) {
      const std::size_t self = n_ + r;
      if (parent[self] == self) continue;
      const double up = d.merge_of(parent[self]).level;
      collapsed_[r] =
          std::abs(d.merges[r].level - up) <= options.level_tolerance;
    }
  }

  ConceptHierarchy build() {
    out_.direction = options_.direction;
    if (n_ == 1) {
      add_node({d_.labels[0]}, 0.0);
    } else {
      build_node(d_.root());
    }
    return std::move(out_);
  }

 private:
  std::size_t add_node(std::vector<std::string> members, double level) {
    ConceptNode node;
    node.id = "c" + std::to_string(out_.nodes.size());
    node.label = members.front();
    node.members = std::move(members);
    node.level = level;
    out_.nodes.push_back(std::move(node));
    return out_.nodes.size() - 1;
  }

  void add_peer(std::size_t a, std::size_t b) {
    auto& peers = out_.nodes[a].peers;
    const std::string& id = out_.nodes[b].id;
    if (std::find(peers.begin(), peers.end(), id) == peers.end()) {
      peers.push_back(id);
    }
  }

  // Children of a multiway node in canonical order, looking through
  // collapsed merges.
  void expand(std::size_t node, std::vector<std::size_t>& children) const {
    const Merge& m = d_.merge_of(node);
    for (std::size_t c : {m.left, m.right}) {
      if (!d_.is_leaf(c) && collapsed_[c - n_]) {
        expand(c, children);
      } else {
        children.push_back(c);
      }
    }
  }

  // Returns the index of the concept node heading this subtree.
  std::size_t build_node(std::size_t node) {
    std::vector<std::size_t> children;
    expand(node, children);
    const double level = d_.merge_of(node).level;

    // Ex aequo cluster children (equal formation level) share a group, all
    // terminals entering here share one; groups keep canonical order.
    struct Group {
      std::vector<std::size_t> heads;
      double level = 0;
      bool terminal = false;
    };
    std::vector<Group> groups;
    std::vector<std::string> terminals;
    std::size_t terminal_group = 0;
    for (std::size_t c : children) {
      if (d_.is_leaf(c)) {
        if (terminals.empty()) {
          terminal_group = groups.size();
          groups.push_back({{}, level, true});
        }
        terminals.push_back(d_.labels[c]);
        continue;
      }
      const double lvl = d_.merge_of(c).level;
      const std::size_t head = build_node(c);
      auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
        return !g.terminal &&
               std::abs(g.level - lvl) <= options_.level_tolerance;
      });
      if (it == groups.end()) {
        groups.push_back({{head}, lvl, false});
      } else {
        it->heads.push_back(head);
      }
    }
    if (!terminals.empty()) {
      groups[terminal_group].heads.push_back(
          add_node(std::move(terminals), level));
    }
    for (const auto& g : groups) {
      for (std::size_t a : g.heads) {
        for (std::size_t b : g.heads) {
          if (a != b) add_peer(a, b);
        }
      }
    }
    const bool later = options_.direction == DominanceDirection::kLaterDominates;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
      const std::size_t lo = groups[g].heads.front();
      const std::size_t hi = groups[g + 1].heads.front();
      if (later) {
        out_.arcs.push_back({out_.nodes[lo].id, out_.nodes[hi].id});
      } else {
        out_.arcs.push_back({out_.nodes[hi].id, out_.nodes[lo].id});
      }
    }
    return later ? groups.back().heads.front() : groups.front().heads.front();
  }

  const Dendrogram& d_;
  const HierarchyOptions& options_;
  std::size_t n_;
  std::vector<bool> collapsed_;
  ConceptHierarchy out_;
};

}  // namespace

Dendrogram canonicalize(const Dendrogram& dendrogram) {
  validate(dendrogram);
  Dendrogram out = dendrogram;
  const auto key = earliest_merge(dendrogram);
  for (Merge& m : out.merges) {
    if (key[m.left] > key[m.right]) std::swap(m.left, m.right);
  }
  out.canonical = true;
  return out;
}

bool is_canonical(const Dendrogram& dendrogram) {
  const auto key = earliest_merge(dendrogram);
  for (const Merge& m : dendrogram.merges) {
    if (key[m.left] > key[m.right]) return false;
  }
  return true;
}

std::vector<std::size_t> packed_permutation(const Dendrogram& canonical) {
  require_canonical(canonical);
  const std::size_t n = canonical.leaf_count();
  const auto order = canonical.leaf_order();
  std::vector<std::size_t> position(n);
  for (std::size_t p = 0; p < n; ++p) position[order[p]] = p;
  std::vector<std::size_t> rightmost(n + canonical.merges.size());
  for (std::size_t i = 0; i < n; ++i) rightmost[i] = i;
  std::vector<std::size_t> perm(n, n);
  for (std::size_t r = 0; r < canonical.merges.size(); ++r) {
    const Merge& m = canonical.merges[r];
    perm[position[rightmost[m.left]]] = r + 1;
    rightmost[n + r] = rightmost[m.right];
  }
  return perm;
}

PromotedTree promote_labels(const Dendrogram& canonical) {
  require_canonical(canonical);
  const std::size_t n = canonical.leaf_count();
  const std::size_t internal = canonical.merges.size();
  const auto parent = canonical.parents();
  PromotedTree tree;
  tree.labels = canonical.labels;
  tree.internal_label.assign(internal, kNever);
  tree.arc_target.assign(internal, internal);
  for (std::size_t r = 0; r < internal; ++r) {
    const std::size_t up = parent[n + r];
    if (up != n + r) tree.arc_target[r] = up - n;
  }
  bool root_taken = false;
  for (std::size_t terminal : canonical.leaf_order()) {
    std::size_t node = terminal;
    bool placed = false;
    while (parent[node] != node) {
      node = parent[node];
      if (tree.internal_label[node - n] == kNever) {
        tree.internal_label[node - n] = terminal;
        placed = true;
        break;
      }
    }
    if (!placed) {
      if (root_taken) throw DomainError("label promotion failed");
      tree.root_label = terminal;
      root_taken = true;
    }
  }
  return tree;
}

DominanceDirection parse_direction(std::string_view name) {
  if (name == "later") return DominanceDirection::kLaterDominates;
  if (name == "earlier") return DominanceDirection::kEarlierDominates;
  throw DomainError("unknown dominance direction: " + std::string(name));
}

std::string to_string(DominanceDirection direction) {
  return direction == DominanceDirection::kLaterDominates ? "later"
                                                          : "earlier";
}

const ConceptNode* ConceptHierarchy::find(std::string_view id) const {
  for (const auto& node : nodes) {
    if (node.id == id) return &node;
  }
  return nullptr;
}

const ConceptNode* ConceptHierarchy::node_of_term(std::string_view term) const {
  for (const auto& node : nodes) {
    if (std::find(node.members.begin(), node.members.end(), term) !=
        node.members.end()) {
      return &node;
    }
  }
  return nullptr;
}

std::vector<std::size_t> ConceptHierarchy::dominance_depths() const {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i].id] = i;
  std::vector<std::size_t> out_arc(nodes.size(), kNever);
  for (const auto& arc : arcs) out_arc[index.at(arc.from)] = index.at(arc.to);
  std::vector<std::size_t> depth(nodes.size(), kNever);
  // Arcs form a forest, so following them terminates.
  auto climb = [&](std::size_t v) {
    std::size_t steps = 0;
    while (out_arc[v] != kNever) {
      v = out_arc[v];
      ++steps;
    }
    return steps;
  };
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    std::size_t d = climb(v);
    if (out_arc[v] == kNever) {
      for (const auto& peer : nodes[v].peers) {
        const std::size_t p = index.at(peer);
        if (out_arc[p] != kNever) {
          d = climb(p);
          break;
        }
      }
    }
    depth[v] = d;
  }
  return depth;
}

ConceptHierarchy derive_concept_hierarchy(const Dendrogram& canonical,
                                          const HierarchyOptions& options) {
  require_canonical(canonical);
  return HierarchyBuilder(canonical, options).build();
}

void write_dot(const ConceptHierarchy& hierarchy, std::ostream& out) {
  out << "digraph concepts {\n";
  out << "  rankdir=BT;\n";
  out << "  node [shape=box];\n";
  for (const auto& node : hierarchy.nodes) {
    std::string label;
    for (const auto& m : node.members) {
      if (!label.empty()) label += "\\n";
      label += dot_escape(m);
    }
    out << "  \"" << node.id << "\" [label=\"" << label << "\"];\n";
  }
  for (const auto& arc : hierarchy.arcs) {
    out << "  \"" << arc.from << "\" -> \"" << arc.to << "\";\n";
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& node : hierarchy.nodes) {
    for (const auto& peer : node.peers) {
      auto key = std::minmax(node.id, peer);
      if (!seen.insert({key.first, key.second}).second) continue;
      out << "  { rank=same; \"" << key.first << "\"; \"" << key.second
          << "\"; }\n";
      out << "  \"" << key.first << "\" -> \"" << key.second
          << "\" [dir=none, style=dashed];\n";
    }
  }
  out << "}\n";
}

bool SubsumptionTriple::same_relation(const SubsumptionTriple& other) const {
  return apex == other.apex && std::minmax(x, y) == std::minmax(other.x, other.y);
}

std::vector<SubsumptionTriple> extract_subsumption_triples(
    const ReducedDocument& reduced, const CodedDistanceMatrix& coded) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < coded.size(); ++i) index[coded.ids()[i]] = i;
  auto lookup = [&](const std::string& term) {
    auto it = index.find(term);
    if (it == index.end()) {
      throw DomainError("term missing from coded matrix: " + term);
    }
    return it->second;
  };

  std::vector<SubsumptionTriple> triples;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t>
      seen;
  const auto& terms = reduced.terms;
  for (std::size_t t = 0; t + 2 < terms.size(); ++t) {
    if (terms[t + 1].document != terms[t].document ||
        terms[t + 2].document != terms[t].document) {
      continue;
    }
    const std::string* w[3] = {&terms[t].term, &terms[t + 1].term,
                               &terms[t + 2].term};
    const std::size_t a = lookup(*w[0]), b = lookup(*w[1]), c = lookup(*w[2]);
    if (a == b || a == c || b == c) continue;
    const auto codes = coded.triplet_codes(a, b, c);  // ab, ac, bc
    if (classify_codes(codes[0], codes[1], codes[2]) !=
        TripletClass::kIsoscelesSmallBase) {
      continue;
    }
    // The base is the pair with the strictly smallest code.
    SubsumptionTriple triple;
    if (codes[0] < codes[1]) {
      triple = {*w[0], *w[1], *w[2], {}};
    } else if (codes[1] < codes[0]) {
      triple = {*w[0], *w[2], *w[1], {}};
    } else {
      triple = {*w[1], *w[2], *w[0], {}};
    }
    auto key = std::make_tuple(std::min(triple.x, triple.y),
                               std::max(triple.x, triple.y), triple.apex);
    auto [it, inserted] = seen.emplace(key, triples.size());
    if (inserted) triples.push_back(std::move(triple));
    triples[it->second].positions.push_back(t);
  }
  return triples;
}

}  // namespace ultratext
