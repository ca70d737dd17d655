#pragma once

// Co-occurrence graphs: per-event-type task and pair counts, statistical edge
// classes, cutoff-based simplification and a fixed circular layout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "madtasks/dataset.hpp"
#include "madtasks/error.hpp"
#include "madtasks/event.hpp"
#include "madtasks/stats.hpp"

namespace madtasks {

// Dense node and pair counts for one event type. Identifiers are TaskCode ids
// (Shrp2) or group ids (G14), 1-based.
class PairCounts {
 public:
  PairCounts(Taxonomy taxonomy, std::size_t max_id)
      : taxonomy_(taxonomy), max_id_(max_id), nodes_(max_id + 1, 0), pairs_((max_id + 1) * (max_id + 1), 0) {}

  Taxonomy taxonomy() const noexcept { return taxonomy_; }
  std::size_t max_id() const noexcept { return max_id_; }
  std::uint64_t population() const noexcept { return population_; }

  std::uint64_t count(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::uint64_t count(int a, int b) const { return pairs_.at(index(a, b)); }

  void add_event(const std::vector<int>& ids) {
    ++population_;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ++nodes_.at(static_cast<std::size_t>(ids[i]));
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        ++pairs_[index(ids[i], ids[j])];
        ++pairs_[index(ids[j], ids[i])];
      }
    }
  }

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * (max_id_ + 1) + static_cast<std::size_t>(b);
  }

  Taxonomy taxonomy_;
  std::size_t max_id_;
  std::uint64_t population_ = 0;
  std::vector<std::uint64_t> nodes_;
  std::vector<std::uint64_t> pairs_;
};

inline std::size_t max_node_id(Taxonomy taxonomy) {
  return taxonomy == Taxonomy::Shrp2 ? task_count() : static_cast<std::size_t>(kGroupCount);
}

inline PairCounts count_pairs(const std::vector<EventRecord>& events, EventType event_type,
                              Taxonomy taxonomy = Taxonomy::Shrp2) {
  PairCounts counts(taxonomy, max_node_id(taxonomy));
  for (const auto& e : events) {
    if (is_member(e, event_type)) counts.add_event(task_set(e, taxonomy));
  }
  if (counts.population() == 0) throw EmptyPopulationError(std::string(to_string(event_type)));
  return counts;
}

inline PairCounts count_pairs(const Dataset& ds, EventType event_type, Taxonomy taxonomy = Taxonomy::Shrp2) {
  return count_pairs(ds.events, event_type, taxonomy);
}

enum class EdgeClass {
  StrongerThanIndependent,
  WeakerThanIndependent,
  NotSignificant,
  WeakPositive,
  WeakNegative,
  Indeterminate,
};

inline constexpr std::array<EdgeClass, 6> kEdgeClasses{
    EdgeClass::StrongerThanIndependent, EdgeClass::WeakerThanIndependent, EdgeClass::NotSignificant,
    EdgeClass::WeakPositive,            EdgeClass::WeakNegative,          EdgeClass::Indeterminate,
};

inline std::string_view to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::StrongerThanIndependent: return "stronger_than_independent";
    case EdgeClass::WeakerThanIndependent: return "weaker_than_independent";
    case EdgeClass::NotSignificant: return "not_significant";
    case EdgeClass::WeakPositive: return "weak_positive";
    case EdgeClass::WeakNegative: return "weak_negative";
    case EdgeClass::Indeterminate: return "indeterminate";
  }
  return "?";
}

inline constexpr double kMinExpectedForChi2 = 5.0;
inline constexpr double kPhiThreshold = 0.1;

// The chi-squared test runs only when the expected co-occurrence cell is at
// least 5; below that the sign and size of phi decide.
inline EdgeClass classify_edge(const PairStats& p) {
  if (p.expected_ab >= kMinExpectedForChi2) {
    if (!p.chi2) return EdgeClass::Indeterminate;
    if (*p.chi2 > kChi2Critical05) {
      const double observed = static_cast<double>(p.n_ab);
      if (observed > p.expected_ab) return EdgeClass::StrongerThanIndependent;
      if (observed < p.expected_ab) return EdgeClass::WeakerThanIndependent;
    }
    return EdgeClass::NotSignificant;
  }
  if (!p.phi) return EdgeClass::Indeterminate;
  if (*p.phi > kPhiThreshold) return EdgeClass::WeakPositive;
  if (*p.phi < -kPhiThreshold) return EdgeClass::WeakNegative;
  return EdgeClass::Indeterminate;
}

struct Cutoffs {
  std::size_t top_k = 5;
  std::uint64_t min_count = 0;
  double min_rel_prev = 0.0;  // fraction in [0, 1]

  friend bool operator==(const Cutoffs&, const Cutoffs&) = default;
};

inline void validate(const Cutoffs& c) {
  if (c.top_k == 0) throw ContractViolation("top_k must be positive");
  if (!(c.min_rel_prev >= 0.0 && c.min_rel_prev <= 1.0)) throw ContractViolation("min_rel_prev must lie in [0, 1]");
}

struct Node {
  int id = 0;
  std::string name;
  std::uint64_t count = 0;
  double prevalence = 0;
  double x = 0;
  double y = 0;
};

struct Edge {
  int a = 0;  // a < b
  int b = 0;
  std::uint64_t count = 0;
  double rel_a = 0;
  double rel_b = 0;
  PairStats stats;
  EdgeClass edge_class = EdgeClass::Indeterminate;
};

struct GraphSpec {
  EventType event_type = EventType::CDS;
  Taxonomy taxonomy = Taxonomy::Shrp2;
  std::uint64_t population = 0;
  Cutoffs cutoffs;
  // True when every task present in the event type is shown and no edge is
  // filtered out.
  bool unsimplified = false;
  std::vector<Node> nodes;  // sorted by id
  std::vector<Edge> edges;  // sorted by (a, b)

  const Node* find_node(int id) const {
    for (const auto& n : nodes) {
      if (n.id == id) return &n;
    }
    return nullptr;
  }
  const Edge* find_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (const auto& e : edges) {
      if (e.a == a && e.b == b) return &e;
    }
    return nullptr;
  }
};

// Nodes sorted by id, clockwise on a circle of radius 0.4 around (0.5, 0.5)
// starting at 90 degrees. y grows upwards.
inline void assign_circular_layout(std::vector<Node>& nodes) {
  std::sort(nodes.begin(), nodes.end(), [](const Node& l, const Node& r) { return l.id < r.id; });
  const double n = static_cast<double>(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double theta = std::numbers::pi / 2.0 - 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    nodes[k].x = 0.5 + 0.4 * std::cos(theta);
    nodes[k].y = 0.5 + 0.4 * std::sin(theta);
  }
}

// Ids with nonzero count, most prevalent first, ties by ascending id.
inline std::vector<int> ranked_ids(const PairCounts& counts) {
  std::vector<int> ids;
  for (std::size_t id = 1; id <= counts.max_id(); ++id) {
    if (counts.count(static_cast<int>(id)) > 0) ids.push_back(static_cast<int>(id));
  }
  std::stable_sort(ids.begin(), ids.end(), [&](int l, int r) { return counts.count(l) > counts.count(r); });
  return ids;
}

inline std::vector<int> top_k_ids(const PairCounts& counts, std::size_t k) {
  auto ids = ranked_ids(counts);
  if (ids.size() > k) ids.resize(k);
  return ids;
}

namespace detail {

inline bool edge_displayed(const Cutoffs& c, std::uint64_t count, double rel_a, double rel_b) {
  if (count == 0) return false;
  return count >= c.min_count || std::max(rel_a, rel_b) >= c.min_rel_prev;
}

inline GraphSpec assemble_graph(const PairCounts& counts, EventType event_type, const Cutoffs& cutoffs,
                                std::vector<int> node_ids) {
  GraphSpec g;
  g.event_type = event_type;
  g.taxonomy = counts.taxonomy();
  g.population = counts.population();
  g.cutoffs = cutoffs;
  std::sort(node_ids.begin(), node_ids.end());
  const double pop = static_cast<double>(g.population);
  for (int id : node_ids) {
    Node n;
    n.id = id;
    n.name = node_name(id, g.taxonomy);
    n.count = counts.count(id);
    n.prevalence = static_cast<double>(n.count) / pop;
    g.nodes.push_back(std::move(n));
  }
  bool all_edges = true;
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    for (std::size_t j = i + 1; j < node_ids.size(); ++j) {
      const int a = node_ids[i];
      const int b = node_ids[j];
      Edge e;
      e.a = a;
      e.b = b;
      e.count = counts.count(a, b);
      const std::uint64_t ca = counts.count(a);
      const std::uint64_t cb = counts.count(b);
      e.rel_a = ca == 0 ? 0.0 : static_cast<double>(e.count) / static_cast<double>(ca);
      e.rel_b = cb == 0 ? 0.0 : static_cast<double>(e.count) / static_cast<double>(cb);
      if (!edge_displayed(cutoffs, e.count, e.rel_a, e.rel_b)) {
        all_edges = all_edges && e.count == 0;
        continue;
      }
      e.stats = make_pair_stats(g.population, ca, cb, e.count);
      e.edge_class = classify_edge(e.stats);
      g.edges.push_back(e);
    }
  }
  g.unsimplified = all_edges && node_ids.size() == ranked_ids(counts).size();
  assign_circular_layout(g.nodes);
  return g;
}

}  // namespace detail

inline GraphSpec build_graph(const PairCounts& counts, EventType event_type, const Cutoffs& cutoffs) {
  validate(cutoffs);
  return detail::assemble_graph(counts, event_type, cutoffs, top_k_ids(counts, cutoffs.top_k));
}

inline GraphSpec build_graph(const Dataset& ds, EventType event_type, const Cutoffs& cutoffs,
                             Taxonomy taxonomy = Taxonomy::Shrp2) {
  validate(cutoffs);
  return build_graph(count_pairs(ds, event_type, taxonomy), event_type, cutoffs);
}

// One graph per type over the union of each type's `per_type_top_k` most
// prevalent tasks; node sets and positions are identical across the result.
inline std::vector<GraphSpec> build_comparison(const Dataset& ds, const std::vector<EventType>& types,
                                               std::size_t per_type_top_k, Cutoffs cutoffs,
                                               Taxonomy taxonomy = Taxonomy::Shrp2) {
  if (types.size() < 2) throw ContractViolation("a comparison needs at least two event types");
  if (per_type_top_k == 0) throw ContractViolation("per_type_top_k must be positive");
  cutoffs.top_k = per_type_top_k;
  validate(cutoffs);
  std::vector<PairCounts> all;
  all.reserve(types.size());
  std::vector<int> node_ids;
  for (auto t : types) {
    all.push_back(count_pairs(ds, t, taxonomy));
    for (int id : top_k_ids(all.back(), per_type_top_k)) {
      if (std::find(node_ids.begin(), node_ids.end(), id) == node_ids.end()) node_ids.push_back(id);
    }
  }
  std::vector<GraphSpec> out;
  out.reserve(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) {
    out.push_back(detail::assemble_graph(all[i], types[i], cutoffs, node_ids));
  }
  return out;
}

}  // namespace madtasks
