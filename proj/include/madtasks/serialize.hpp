#pragma once

// Canonical JSON documents shared by the CLI and the HTTP service. Key order
// is fixed, reals carry six significant digits, arrays are sorted by id.

#include <string>
#include <vector>

#include <json.hpp>

#include "madtasks/analysis.hpp"
#include "madtasks/cooccur.hpp"
#include "madtasks/format.hpp"
#include "madtasks/render.hpp"

namespace madtasks {

using ojson = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline ojson real(double v) { return ojson(round_sig6(v)); }

inline ojson opt_real(const std::optional<double>& v) { return v ? real(*v) : ojson(nullptr); }

inline ojson to_json(const Cutoffs& c) {
  ojson j;
  j["top_k"] = c.top_k;
  j["min_count"] = c.min_count;
  j["min_rel_prev"] = real(c.min_rel_prev);
  return j;
}

inline ojson to_json(const GraphSpec& g, const StyleMap& style = {}) {
  ojson j;
  j["schema"] = "graphspec/" + std::to_string(kSchemaVersion);
  j["event_type"] = to_string(g.event_type);
  j["taxonomy"] = to_string(g.taxonomy);
  j["population"] = g.population;
  j["cutoffs"] = to_json(g.cutoffs);
  j["unsimplified"] = g.unsimplified;
  const auto threshold = style.label_min_count.value_or(g.unsimplified ? 50 : 0);
  auto nodes = ojson::array();
  for (const auto& n : g.nodes) {
    ojson o;
    o["id"] = n.id;
    o["name"] = n.name;
    o["count"] = n.count;
    o["prevalence"] = real(n.prevalence);
    o["x"] = real(n.x);
    o["y"] = real(n.y);
    o["label"] = node_label(n, g.population);
    o["label_visible"] = n.count >= threshold;
    nodes.push_back(std::move(o));
  }
  j["nodes"] = std::move(nodes);
  auto edges = ojson::array();
  for (const auto& e : g.edges) {
    ojson o;
    o["a"] = e.a;
    o["b"] = e.b;
    o["count"] = e.count;
    o["rel_a"] = real(e.rel_a);
    o["rel_b"] = real(e.rel_b);
    o["expected"] = real(e.stats.expected_ab);
    o["chi2"] = opt_real(e.stats.chi2);
    o["phi"] = opt_real(e.stats.phi);
    o["class"] = to_string(e.edge_class);
    o["label"] = edge_label(e);
    edges.push_back(std::move(o));
  }
  j["edges"] = std::move(edges);
  return j;
}

inline ojson to_json(const std::vector<GraphSpec>& graphs, const StyleMap& style = {}) {
  ojson j;
  j["schema"] = "comparison/" + std::to_string(kSchemaVersion);
  auto arr = ojson::array();
  for (const auto& g : graphs) arr.push_back(to_json(g, style));
  j["graphs"] = std::move(arr);
  return j;
}

inline ojson to_json(const EngagementCounts& c) {
  ojson j;
  j["n"] = c.n;
  j["no_task"] = c.no_task;
  j["sad"] = c.sad;
  j["mad"] = c.mad;
  j["three_plus"] = c.three_plus;
  j["no_task_pct"] = real(c.no_task_pct());
  j["sad_pct"] = real(c.sad_pct());
  j["mad_pct"] = real(c.mad_pct());
  j["three_plus_pct"] = real(c.three_plus_pct());
  return j;
}

inline ojson prevalence_json(const AnalysisReport& r) {
  ojson j;
  j["schema"] = "prevalence/" + std::to_string(kSchemaVersion);
  j["taxonomy"] = to_string(r.taxonomy);
  auto rows = ojson::array();
  for (const auto& p : r.prevalence) {
    ojson o;
    o["event_type"] = to_string(p.event_type);
    o.update(to_json(p.counts));
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline ojson odds_json(const AnalysisReport& r) {
  ojson j;
  j["schema"] = "odds/" + std::to_string(kSchemaVersion);
  j["taxonomy"] = to_string(r.taxonomy);
  auto rows = ojson::array();
  for (const auto& o : r.odds) {
    ojson row;
    row["event_type"] = to_string(o.event_type);
    row["behavior"] = to_string(o.behavior);
    row["reference"] = to_string(o.reference);
    row["a"] = o.cross_tab.a;
    row["b"] = o.cross_tab.b;
    row["c"] = o.cross_tab.c;
    row["d"] = o.cross_tab.d;
    row["or"] = real(o.or_hat);
    row["ci_low"] = real(o.ci_low);
    row["ci_high"] = real(o.ci_high);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

// Serialized document text: two-space indent, trailing newline.
inline std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

}  // namespace madtasks
