// madtasks command-line tool.
//
// Exit codes: 0 success, 1 data or validation error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "madtasks/analysis.hpp"
#include "madtasks/api_server.hpp"
#include "madtasks/cooccur.hpp"
#include "madtasks/dataset.hpp"
#include "madtasks/render.hpp"
#include "madtasks/serialize.hpp"
#include "madtasks/synthgen.hpp"

namespace fs = std::filesystem;
using namespace madtasks;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Temp file in the destination directory, then rename.
void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path() && !fs::exists(target.parent_path())) {
    throw IoError("directory does not exist: " + target.parent_path().string());
  }
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename into " + path + ": " + ec.message());
  }
}

void emit(const std::optional<std::string>& out, const std::string& content) {
  if (out) {
    write_atomic(*out, content);
  } else {
    std::cout << content << std::flush;
  }
}

DataFormat format_for(const std::string& path, const std::string& flag) {
  if (!flag.empty()) {
    auto f = parse_data_format(flag);
    if (!f) throw UsageError("--format must be csv or jsonl");
    return *f;
  }
  return fs::path(path).extension() == ".jsonl" ? DataFormat::Jsonl : DataFormat::Csv;
}

EventType event_type_arg(const std::string& s) {
  auto t = parse_event_type(s);
  if (!t) throw UsageError("unknown event type \"" + s + "\"");
  return *t;
}

std::vector<Taxonomy> taxonomies_arg(const std::string& s) {
  if (s.empty()) return {kTaxonomies.begin(), kTaxonomies.end()};
  auto t = parse_taxonomy(s);
  if (!t) throw UsageError("--taxonomy must be shrp2 or g14");
  return {*t};
}

Taxonomy taxonomy_arg(const std::string& s) {
  auto t = parse_taxonomy(s);
  if (!t) throw UsageError("--taxonomy must be shrp2 or g14");
  return *t;
}

std::string file_stem_for(EventType t) {
  std::string s(to_string(t));
  for (auto& c : s) {
    if (c == '+') c = 'p';
  }
  return s;
}

struct Common {
  std::string file;
  std::string format;
  std::optional<std::string> out;
  std::string taxonomy;
};

struct GraphArgs {
  std::string event_type;
  std::string types;
  std::size_t top_k = 5;
  std::uint64_t min_count = 0;
  double min_rel_prev = 0;  // percent
  std::string emit = "dot";
  std::string out_dir;
  std::optional<std::uint64_t> label_min_count;
};

Cutoffs cutoffs_of(const GraphArgs& g) {
  if (g.min_rel_prev < 0 || g.min_rel_prev > 100) throw UsageError("--min-rel-prev must lie in [0, 100]");
  if (g.top_k == 0) throw UsageError("--top-k must be positive");
  return Cutoffs{g.top_k, g.min_count, g.min_rel_prev / 100.0};
}

std::string render_graph(const GraphSpec& g, const std::string& emit, const StyleMap& style) {
  if (emit == "dot") return emit_dot(g, style);
  if (emit == "svg") return emit_svg(g, style);
  if (emit == "json") return dump(to_json(g, style));
  throw UsageError("--emit must be dot, svg or json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secondary-task engagement and co-occurrence analysis"};
  app.require_subcommand(1);
  Common c;
  GraphArgs g;

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("file", c.file, "Event file (csv or jsonl)")->required();
    sub->add_option("--format", c.format, "Input format: csv or jsonl (default: by extension)");
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", c.out, "Output path (default: stdout)"); };

  auto* validate = app.add_subcommand("validate", "Check a dataset and print engagement counts");
  add_input(validate);

  std::string table_emit = "csv";
  auto* prevalence = app.add_subcommand("prevalence", "Engagement prevalence per event type");
  add_input(prevalence);
  add_out(prevalence);
  prevalence->add_option("--taxonomy", c.taxonomy, "shrp2 or g14 (default: both)");
  prevalence->add_option("--emit", table_emit, "csv or json");

  auto* odds = app.add_subcommand("odds", "Crude odds ratios against no task engagement");
  add_input(odds);
  add_out(odds);
  odds->add_option("--taxonomy", c.taxonomy, "shrp2 or g14 (default: both)");
  odds->add_option("--emit", table_emit, "csv or json");
  double z = kDefaultZ;
  odds->add_option("--z", z, "Normal quantile for the confidence interval");

  auto* sensitivity = app.add_subcommand("sensitivity", "Compare SHRP2 and G14 task definitions");
  add_input(sensitivity);
  add_out(sensitivity);

  auto* chart = app.add_subcommand("chart", "Stacked engagement bar chart (SVG)");
  add_input(chart);
  add_out(chart);
  chart->add_option("--taxonomy", c.taxonomy, "shrp2 or g14")->default_val("shrp2");

  auto add_cutoffs = [&](CLI::App* sub) {
    sub->add_option("--min-count", g.min_count, "Show edges with at least this many co-occurrences");
    sub->add_option("--min-rel-prev", g.min_rel_prev, "Or with relative prevalence at least this percent");
    sub->add_option("--taxonomy", c.taxonomy, "shrp2 or g14")->default_val("shrp2");
    sub->add_option("--label-min-count", g.label_min_count, "Hide node labels below this count");
  };
  auto* graph = app.add_subcommand("graph", "Co-occurrence graph for one event type");
  add_input(graph);
  add_out(graph);
  graph->add_option("--event-type", g.event_type, "Event type label, e.g. CDS or L1-3")->required();
  graph->add_option("--top-k", g.top_k, "Number of most prevalent tasks to show");
  add_cutoffs(graph);
  graph->add_option("--emit", g.emit, "dot, svg or json");

  auto* compare = app.add_subcommand("compare", "Graphs for several event types on a shared node set");
  add_input(compare);
  compare->add_option("--types", g.types, "Comma-separated event type labels")->required();
  compare->add_option("--per-type-top-k", g.top_k, "Most prevalent tasks taken from each type");
  add_cutoffs(compare);
  compare->add_option("--out-dir", g.out_dir, "Directory for the rendered graphs")->required();

  std::string target_path;
  std::optional<std::uint64_t> seed;
  std::string synth_format;
  auto* synth = app.add_subcommand("synth", "Generate a calibrated synthetic dataset");
  synth->add_option("--target", target_path, "Calibration target (JSON)")->required();
  synth->add_option("--seed", seed, "Override the target's seed");
  synth->add_option("--format", synth_format, "csv or jsonl (default: by --out extension, else csv)");
  add_out(synth);

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string assets;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API and explorer assets");
  add_input(serve_cmd);
  serve_cmd->add_option("--port", port, "TCP port (0 picks a free one)");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--assets", assets, "Directory with built explorer assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto load = [&] { return load_dataset(c.file, format_for(c.file, c.format)); };

    if (*validate) {
      const auto ds = load();
      std::cout << c.file << ": " << ds.events.size() << " events, " << ds.excluded_unknown
                << " excluded (engagement unknown), digest " << ds.source_digest << "\n";
      std::cout << prevalence_csv(validate_counts(ds));
    } else if (*prevalence) {
      const auto ds = load();
      const auto taxa = taxonomies_arg(c.taxonomy);
      if (table_emit == "csv") {
        std::vector<PrevalenceRow> rows;
        for (auto t : taxa) {
          for (auto t2 : kEventTypes) rows.push_back({t2, t, engagement_counts(ds.events, t2, t)});
        }
        emit(c.out, prevalence_csv(rows));
      } else if (table_emit == "json") {
        if (taxa.size() != 1) throw UsageError("--emit json needs --taxonomy");
        emit(c.out, dump(prevalence_json(prevalence_report(ds, taxa[0]))));
      } else {
        throw UsageError("--emit must be csv or json");
      }
    } else if (*odds) {
      const auto ds = load();
      std::vector<AnalysisReport> reports;
      for (auto t : taxonomies_arg(c.taxonomy)) reports.push_back(compute_report(ds, t, z));
      if (table_emit == "csv") {
        std::vector<const AnalysisReport*> ptrs;
        for (const auto& r : reports) ptrs.push_back(&r);
        emit(c.out, odds_csv(ptrs));
      } else if (table_emit == "json") {
        if (reports.size() != 1) throw UsageError("--emit json needs --taxonomy");
        emit(c.out, dump(odds_json(reports[0])));
      } else {
        throw UsageError("--emit must be csv or json");
      }
    } else if (*sensitivity) {
      emit(c.out, sensitivity_csv(sensitivity_compare(load())));
    } else if (*chart) {
      emit(c.out, emit_prevalence_chart(prevalence_report(load(), taxonomy_arg(c.taxonomy))));
    } else if (*graph) {
      const auto type = event_type_arg(g.event_type);
      const auto cut = cutoffs_of(g);
      StyleMap style;
      style.label_min_count = g.label_min_count;
      const auto spec = build_graph(load(), type, cut, taxonomy_arg(c.taxonomy));
      emit(c.out, render_graph(spec, g.emit, style));
    } else if (*compare) {
      std::vector<EventType> types;
      std::stringstream ss(g.types);
      std::string item;
      while (std::getline(ss, item, ',')) types.push_back(event_type_arg(item));
      const auto cut = cutoffs_of(g);
      StyleMap style;
      style.label_min_count = g.label_min_count;
      const auto graphs = build_comparison(load(), types, g.top_k, cut, taxonomy_arg(c.taxonomy));
      std::error_code ec;
      fs::create_directories(g.out_dir, ec);
      if (ec) throw IoError("cannot create " + g.out_dir + ": " + ec.message());
      for (const auto& spec : graphs) {
        const auto stem = (fs::path(g.out_dir) / file_stem_for(spec.event_type)).string();
        write_atomic(stem + ".dot", emit_dot(spec, style));
        write_atomic(stem + ".svg", emit_svg(spec, style));
      }
      write_atomic((fs::path(g.out_dir) / "comparison.json").string(), dump(to_json(graphs, style)));
    } else if (*synth) {
      auto target = load_calibration_target(target_path);
      if (seed) target.seed = *seed;
      const auto fmt = format_for(c.out.value_or(""), synth_format);
      const auto ds = generate(target);
      emit(c.out, fmt == DataFormat::Csv ? write_csv(ds) : write_jsonl(ds.events));
    } else if (*serve_cmd) {
      std::optional<fs::path> dir;
      if (!assets.empty()) dir = fs::path(assets);
      const Service service(load(), dir);
      return serve(service, host, port, std::cerr);
    }
  } catch (const UsageError& e) {
    std::cerr << "madtasks: " << e.what() << "\n";
    return 2;
  } catch (const LoadError& e) {
    std::cerr << "madtasks: " << c.file << ": " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "madtasks: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "madtasks: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
