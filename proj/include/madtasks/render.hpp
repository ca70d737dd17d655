#pragma once

// DOT and SVG emitters for co-occurrence graphs, plus the stacked-bar
// prevalence chart. All output is byte-deterministic for equal input.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "madtasks/analysis.hpp"
#include "madtasks/cooccur.hpp"
#include "madtasks/format.hpp"

namespace madtasks {

// "{count} ({lo}%; {hi}%)" with the two relative prevalences ascending.
inline std::string format_edge_label(std::uint64_t count, double rel_a, double rel_b) {
  long long lo = percent_half_up(rel_a);
  long long hi = percent_half_up(rel_b);
  if (lo > hi) std::swap(lo, hi);
  return std::to_string(count) + " (" + std::to_string(lo) + "%; " + std::to_string(hi) + "%)";
}

inline std::string format_node_label(std::string_view name, std::uint64_t count, std::uint64_t population) {
  if (population == 0) throw ContractViolation("node label needs a positive population");
  return std::string(name) + "\n" + std::to_string(percent_half_up(count, population)) + "% (" +
         std::to_string(count) + ")";
}

inline std::string edge_label(const Edge& e) { return format_edge_label(e.count, e.rel_a, e.rel_b); }

inline std::string node_label(const Node& n, std::uint64_t population) {
  return format_node_label(n.name, n.count, population);
}

struct EdgeStyle {
  std::string_view color;
  std::string_view dot_style;
  std::string_view dasharray;  // empty = solid
};

struct StyleMap {
  std::array<EdgeStyle, 6> edges{{
      {"#1a7a1a", "solid", ""},         // stronger than independent
      {"#b22222", "dashed", "10,6"},    // weaker than independent
      {"#1f5fbf", "dashed", "10,4,2,4"},  // not significant (dash-dotted in SVG)
      {"#7fd67f", "solid", ""},         // weak positive
      {"#f4a0a0", "dashed", "10,6"},    // weak negative
      {"#999999", "dotted", "2,4"},     // indeterminate
  }};
  std::string_view node_fill = "#9ecae1";
  std::string_view node_stroke = "#3b6e8f";
  double min_radius = 8;
  double max_radius = 48;
  double min_edge_width = 1;
  double max_edge_width = 10;
  // Nodes with fewer events carry no text. Unset: 50 for unsimplified
  // graphs, otherwise every node is labelled.
  std::optional<std::uint64_t> label_min_count;

  const EdgeStyle& style(EdgeClass c) const { return edges[static_cast<std::size_t>(c)]; }
};

namespace detail {

inline double affine(double v, double lo, double hi, double out_lo, double out_hi) {
  if (hi <= lo) return (out_lo + out_hi) / 2.0;
  const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
  return out_lo + t * (out_hi - out_lo);
}

struct Geometry {
  std::vector<double> radius;  // parallel to graph.nodes
  std::vector<double> width;   // parallel to graph.edges
};

inline Geometry geometry(const GraphSpec& g, const StyleMap& s) {
  Geometry geo;
  double pmin = 1.0, pmax = 0.0;
  for (const auto& n : g.nodes) {
    pmin = std::min(pmin, n.prevalence);
    pmax = std::max(pmax, n.prevalence);
  }
  for (const auto& n : g.nodes) geo.radius.push_back(affine(n.prevalence, pmin, pmax, s.min_radius, s.max_radius));
  double cmin = 0, cmax = 0;
  bool first = true;
  for (const auto& e : g.edges) {
    const double c = static_cast<double>(e.count);
    cmin = first ? c : std::min(cmin, c);
    cmax = first ? c : std::max(cmax, c);
    first = false;
  }
  for (const auto& e : g.edges) {
    geo.width.push_back(e.edge_class == EdgeClass::Indeterminate
                            ? s.min_edge_width
                            : affine(static_cast<double>(e.count), cmin, cmax, s.min_edge_width, s.max_edge_width));
  }
  return geo;
}

inline std::uint64_t label_threshold(const GraphSpec& g, const StyleMap& s) {
  return s.label_min_count.value_or(g.unsimplified ? 50 : 0);
}

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  out += '"';
  return out;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) { return fixed(v, 2); }

inline std::string graph_title(const GraphSpec& g) {
  return std::string(to_string(g.event_type)) + " (n=" + std::to_string(g.population) + ")";
}

inline constexpr double kViewport = 1000.0;

}  // namespace detail

inline std::string emit_dot(const GraphSpec& g, const StyleMap& style = {}) {
  const auto geo = detail::geometry(g, style);
  const auto threshold = detail::label_threshold(g, style);
  std::string out = "graph " + detail::dot_quote(to_string(g.event_type)) + " {\n";
  out += "  graph [layout=neato, outputorder=edgesfirst, label=" + detail::dot_quote(detail::graph_title(g)) + "];\n";
  out += "  node [shape=circle, style=filled, fixedsize=true, fillcolor=" + detail::dot_quote(style.node_fill) +
         ", color=" + detail::dot_quote(style.node_stroke) + "];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    const std::string label = n.count >= threshold ? node_label(n, g.population) : std::string();
    out += "  t" + std::to_string(n.id) + " [label=" + detail::dot_quote(label) + ", pos=\"" +
           detail::num(n.x * detail::kViewport) + "," + detail::num(n.y * detail::kViewport) +
           "!\", width=" + fixed(2.0 * geo.radius[i] / 72.0, 4) + "];\n";
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    const auto& es = style.style(e.edge_class);
    out += "  t" + std::to_string(e.a) + " -- t" + std::to_string(e.b) + " [class=" +
           detail::dot_quote(to_string(e.edge_class)) + ", color=" + detail::dot_quote(es.color) +
           ", style=" + std::string(es.dot_style) + ", penwidth=" + detail::num(geo.width[i]);
    if (!g.unsimplified) out += ", label=" + detail::dot_quote(edge_label(e));
    out += "];\n";
  }
  out += "}\n";
  return out;
}

inline std::string emit_svg(const GraphSpec& g, const StyleMap& style = {}) {
  using detail::num;
  const auto geo = detail::geometry(g, style);
  const auto threshold = detail::label_threshold(g, style);
  auto sx = [](double x) { return x * detail::kViewport; };
  auto sy = [](double y) { return (1.0 - y) * detail::kViewport; };

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n";
  out += "<title>" + detail::xml_escape(detail::graph_title(g)) + "</title>\n";
  out += "<rect width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n";
  out += "<g class=\"edges\">\n";
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    const Node* a = g.find_node(e.a);
    const Node* b = g.find_node(e.b);
    const auto& es = style.style(e.edge_class);
    out += "<line class=\"edge " + std::string(to_string(e.edge_class)) + "\" data-a=\"" + std::to_string(e.a) +
           "\" data-b=\"" + std::to_string(e.b) + "\" x1=\"" + num(sx(a->x)) + "\" y1=\"" + num(sy(a->y)) +
           "\" x2=\"" + num(sx(b->x)) + "\" y2=\"" + num(sy(b->y)) + "\" stroke=\"" + std::string(es.color) +
           "\" stroke-width=\"" + num(geo.width[i]) + "\"";
    if (!es.dasharray.empty()) out += " stroke-dasharray=\"" + std::string(es.dasharray) + "\"";
    out += "/>\n";
    if (!g.unsimplified) {
      out += "<text class=\"edge-label\" x=\"" + num((sx(a->x) + sx(b->x)) / 2.0) + "\" y=\"" +
             num((sy(a->y) + sy(b->y)) / 2.0) + "\" font-size=\"14\" text-anchor=\"middle\">" +
             detail::xml_escape(edge_label(e)) + "</text>\n";
    }
  }
  out += "</g>\n<g class=\"nodes\">\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    out += "<circle class=\"node\" data-id=\"" + std::to_string(n.id) + "\" cx=\"" + num(sx(n.x)) + "\" cy=\"" +
           num(sy(n.y)) + "\" r=\"" + num(geo.radius[i]) + "\" fill=\"" + std::string(style.node_fill) +
           "\" stroke=\"" + std::string(style.node_stroke) + "\"/>\n";
    if (n.count >= threshold) {
      const std::string label = node_label(n, g.population);
      const auto nl = label.find('\n');
      const double ty = sy(n.y) + geo.radius[i] + 16.0;
      out += "<text class=\"node-label\" x=\"" + num(sx(n.x)) + "\" y=\"" + num(ty) +
             "\" font-size=\"14\" text-anchor=\"middle\"><tspan x=\"" + num(sx(n.x)) + "\">" +
             detail::xml_escape(label.substr(0, nl)) + "</tspan><tspan x=\"" + num(sx(n.x)) + "\" dy=\"16\">" +
             detail::xml_escape(label.substr(nl + 1)) + "</tspan></text>\n";
    }
  }
  out += "</g>\n</svg>\n";
  return out;
}

// Stacked SAD/MAD bars per event type, ordered by MAD prevalence ascending.
// G14 reports use diagonal-stripe fills.
inline std::string emit_prevalence_chart(const AnalysisReport& report) {
  using detail::num;
  if (report.prevalence.empty()) throw ContractViolation("prevalence chart needs at least one event type");
  std::vector<PrevalenceEntry> bars = report.prevalence;
  std::stable_sort(bars.begin(), bars.end(), [](const PrevalenceEntry& l, const PrevalenceEntry& r) {
    return l.counts.mad_pct() < r.counts.mad_pct();
  });
  const bool striped = report.taxonomy == Taxonomy::G14;
  const double left = 70, top = 40, plot_h = 400, bar_w = 60, gap = 30;
  const double width = left + static_cast<double>(bars.size()) * (bar_w + gap) + gap;
  const double height = top + plot_h + 90;
  const std::string sad_color = "#9ecae1", mad_color = "#08519c";
  const std::string sad_fill = striped ? "url(#diagonal-stripes-sad)" : sad_color;
  const std::string mad_fill = striped ? "url(#diagonal-stripes-mad)" : mad_color;

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  out += "<title>Secondary task engagement by event type (" + std::string(to_string(report.taxonomy)) + ")</title>\n";
  if (striped) {
    out += "<defs>\n";
    for (const auto& [id, color] : {std::pair{"sad", sad_color}, std::pair{"mad", mad_color}}) {
      out += "<pattern id=\"diagonal-stripes-" + std::string(id) +
             "\" patternUnits=\"userSpaceOnUse\" width=\"8\" height=\"8\" patternTransform=\"rotate(45)\">"
             "<rect width=\"8\" height=\"8\" fill=\"" + color +
             "\"/><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#ffffff\" stroke-width=\"3\"/></pattern>\n";
    }
    out += "</defs>\n";
  }
  out += "<rect width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"#ffffff\"/>\n";
  for (int pct = 0; pct <= 100; pct += 20) {
    const double y = top + plot_h * (1.0 - pct / 100.0);
    out += "<line class=\"grid\" x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(width - gap) +
           "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text class=\"tick\" x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">" + std::to_string(pct) + "%</text>\n";
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double x = left + gap + static_cast<double>(i) * (bar_w + gap);
    const double sad_h = plot_h * b.counts.sad_pct() / 100.0;
    const double mad_h = plot_h * b.counts.mad_pct() / 100.0;
    const double base = top + plot_h;
    const std::string type(to_string(b.event_type));
    out += "<g class=\"bar\" data-event-type=\"" + type + "\">\n";
    out += "<rect class=\"sad\" x=\"" + num(x) + "\" y=\"" + num(base - sad_h) + "\" width=\"" + num(bar_w) +
           "\" height=\"" + num(sad_h) + "\" fill=\"" + sad_fill + "\" stroke=\"#333333\"/>\n";
    out += "<rect class=\"mad\" x=\"" + num(x) + "\" y=\"" + num(base - sad_h - mad_h) + "\" width=\"" +
           num(bar_w) + "\" height=\"" + num(mad_h) + "\" fill=\"" + mad_fill + "\" stroke=\"#333333\"/>\n";
    out += "<text class=\"value\" x=\"" + num(x + bar_w / 2) + "\" y=\"" + num(base - sad_h - mad_h - 6) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + std::to_string(percent_half_up(b.counts.mad, b.counts.n)) +
           "%</text>\n";
    out += "<text class=\"category\" x=\"" + num(x + bar_w / 2) + "\" y=\"" + num(base + 18) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + detail::xml_escape(type) + "</text>\n";
    out += "</g>\n";
  }
  const double ly = top + plot_h + 50;
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(ly) + "\" width=\"14\" height=\"14\" fill=\"" + sad_fill +
         "\"/><text x=\"" + num(left + 20) + "\" y=\"" + num(ly + 12) + "\" font-size=\"12\">SAD</text>\n";
  out += "<rect x=\"" + num(left + 80) + "\" y=\"" + num(ly) + "\" width=\"14\" height=\"14\" fill=\"" + mad_fill +
         "\"/><text x=\"" + num(left + 100) + "\" y=\"" + num(ly + 12) + "\" font-size=\"12\">MAD</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace madtasks
