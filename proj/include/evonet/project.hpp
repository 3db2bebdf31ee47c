#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evonet/attrs.hpp"
#include "evonet/csv.hpp"
#include "evonet/error.hpp"
#include "evonet/generators.hpp"
#include "evonet/models.hpp"
#include "evonet/text.hpp"

namespace evonet {

struct OutputRequest {
  enum class Kind { Frequency, NodeSnapshot, EdgeSnapshot };

  Kind kind = Kind::Frequency;
  std::string attr;        // Frequency only
  std::uint64_t every = 1; // emit when step % every == 0

  bool due(std::uint64_t step) const noexcept { return step % every == 0; }

  // freq(attr) | nodes | edges, each optionally suffixed with @k.
  std::string to_string() const {
    std::string s;
    switch (kind) {
      case Kind::Frequency: s = "freq(" + attr + ")"; break;
      case Kind::NodeSnapshot: s = "nodes"; break;
      case Kind::EdgeSnapshot: s = "edges"; break;
    }
    if (every != 1) s += "@" + std::to_string(every);
    return s;
  }

  friend bool operator==(const OutputRequest&, const OutputRequest&) = default;
};

inline OutputRequest parse_output_request(std::string_view s) {
  s = text::trim(s);
  OutputRequest out;
  if (const auto at = s.rfind('@'); at != std::string_view::npos) {
    const auto every = text::parse_uint(s.substr(at + 1));
    if (!every || *every < 1) throw Error("output '" + std::string(s) + "': cadence must be a positive integer");
    out.every = *every;
    s = text::trim(s.substr(0, at));
  }
  if (s == "nodes") {
    out.kind = OutputRequest::Kind::NodeSnapshot;
  } else if (s == "edges") {
    out.kind = OutputRequest::Kind::EdgeSnapshot;
  } else if (s.starts_with("freq(") && s.ends_with(")")) {
    out.kind = OutputRequest::Kind::Frequency;
    out.attr = std::string(text::trim(s.substr(5, s.size() - 6)));
    if (!text::is_identifier(out.attr)) throw Error("output '" + std::string(s) + "': bad attribute name");
  } else {
    throw Error("unknown output '" + std::string(s) + "' (expected freq(attr), nodes or edges)");
  }
  return out;
}

// ';'-separated list; empty cell means no outputs.
inline std::vector<OutputRequest> parse_output_list(std::string_view s) {
  std::vector<OutputRequest> out;
  if (text::trim(s).empty()) return out;
  for (auto piece : text::split(s, ';')) out.push_back(parse_output_request(piece));
  return out;
}

inline std::string format_output_list(const std::vector<OutputRequest>& outputs) {
  std::string s;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (i) s += ';';
    s += outputs[i].to_string();
  }
  return s;
}

struct EdgeFileSource {
  std::string path;

  friend bool operator==(const EdgeFileSource&, const EdgeFileSource&) = default;
};

using GraphSource = std::variant<GridSpec, EdgeFileSource>;

inline constexpr std::string_view kSquareGrid = "squareGrid";
inline constexpr std::string_view kEdgeFile = "edgeFile";

// One project row.
struct ExperimentSpec {
  std::string id;
  std::string model_id;
  ParamTable params;
  GraphSource graph;
  NodesSpec nodes;
  std::uint64_t seed = 0;
  std::uint64_t stop_at = 0;
  std::uint64_t trials = 1;
  std::vector<OutputRequest> outputs;
  std::filesystem::path base_dir;  // relative file references resolve here

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct Project {
  std::vector<ExperimentSpec> experiments;

  const ExperimentSpec* find(std::string_view id) const {
    for (const auto& e : experiments) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  friend bool operator==(const Project&, const Project&) = default;
};

namespace detail {

inline const std::vector<std::string>& reserved_columns() {
  static const std::vector<std::string> cols{"id", "model", "trials", "seed", "stopAt", "nodes", "graph", "outputs"};
  return cols;
}

inline const std::vector<std::string>& graph_param_names() {
  static const std::vector<std::string> names{"width", "height", "periodic", "neighborhood", "path"};
  return names;
}

// Static checks that need the model schema but no file I/O.
inline void check_experiment(const ExperimentSpec& e, const ModelMeta& meta) {
  for (const auto& out : e.outputs) {
    if (out.kind == OutputRequest::Kind::Frequency && !meta.node_attrs.find(out.attr)) {
      throw Error("output freq(" + out.attr + ") references an attribute that model '" + meta.id + "' does not declare");
    }
  }
  auto check_assignments = [&](const std::vector<Assignment>& list) {
    for (const auto& a : list) {
      const auto idx = meta.node_attrs.index_of(a.name);
      try {
        (void)parse_value(a.value, meta.node_attrs[idx].range);
      } catch (const Error& err) {
        throw Error("nodes: attribute '" + a.name + "': " + err.what());
      }
    }
  };
  check_assignments(e.nodes.overrides);
  for (const auto& p : e.nodes.patches) check_assignments(p.values);

  if (e.nodes.kind != NodesSpec::Kind::File) {
    for (const auto& p : e.nodes.patches) {
      if (p.id >= e.nodes.count) throw Error("nodes: set(" + std::to_string(p.id) + ": ...) is out of range");
    }
    if (const auto* grid = std::get_if<GridSpec>(&e.graph)) {
      if (grid->width * grid->height != e.nodes.count) {
        throw Error("nodes spec declares " + std::to_string(e.nodes.count) + " nodes but the " +
                    std::to_string(grid->width) + "x" + std::to_string(grid->height) + " grid has " +
                    std::to_string(grid->width * grid->height));
      }
    }
  }
  if (e.nodes.kind == NodesSpec::Kind::Random && !e.nodes.seed) {
    // Unseeded random() draws from the trial stream; text attributes have no generator.
    for (const auto& d : meta.node_attrs) {
      bool listed = false;
      for (const auto& a : e.nodes.overrides) listed = listed || a.name == d.name;
      if (!listed && d.range.kind() == RangeKind::Text) {
        throw Error("nodes: random() cannot draw free-text attribute '" + d.name + "'");
      }
    }
  }
}

}  // namespace detail

// Columns: id,model,trials,seed,stopAt,nodes,graph,outputs plus graph.<p>
// and model.<p>. Unknown or misspelled columns are rejected. An empty
// model.<p> cell means the declared default.
inline Project parse_project(std::string_view csv_text, const ModelRegistry& registry,
                             const std::filesystem::path& base_dir = {}) {
  const auto rows = csv::parse(csv_text);
  if (rows.empty()) throw Error("project: missing header row");
  const auto& header = rows.front();

  std::map<std::string, std::size_t, std::less<>> col;
  std::vector<std::pair<std::string, std::size_t>> graph_cols;
  std::vector<std::pair<std::string, std::size_t>> model_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(text::trim(header[c]));
    if (!col.emplace(name, c).second) throw Error("project: duplicate column '" + name + "'");
    if (name.starts_with("graph.")) {
      const auto p = name.substr(6);
      const auto& known = detail::graph_param_names();
      if (std::find(known.begin(), known.end(), p) == known.end()) throw Error("project: unknown column '" + name + "'");
      graph_cols.emplace_back(p, c);
    } else if (name.starts_with("model.")) {
      model_cols.emplace_back(name.substr(6), c);
    } else {
      const auto& reserved = detail::reserved_columns();
      if (std::find(reserved.begin(), reserved.end(), name) == reserved.end()) {
        throw Error("project: unknown column '" + name + "'");
      }
    }
  }
  for (const auto& r : detail::reserved_columns()) {
    if (!col.count(r)) throw Error("project: missing required column '" + r + "'");
  }

  // A model.<p> column nobody declares is a typo.
  std::set<std::string> declared_anywhere;
  Project project;
  std::set<std::string> ids;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "project row " + std::to_string(r + 1);
    if (row.size() != header.size()) {
      throw Error(where + ": expected " + std::to_string(header.size()) + " fields, got " + std::to_string(row.size()));
    }
    auto cell = [&](std::string_view name) { return text::trim(row[col.find(name)->second]); };

    try {
      ExperimentSpec e;
      e.base_dir = base_dir;
      e.id = std::string(cell("id"));
      if (e.id.empty()) throw Error("empty experiment id");
      if (e.id.find_first_of("/\\") != std::string::npos) throw Error("experiment id must not contain path separators");
      if (!ids.insert(e.id).second) throw Error("duplicate experiment id '" + e.id + "'");

      e.model_id = std::string(cell("model"));
      const auto& meta = registry.resolve(e.model_id).meta;

      const auto trials = text::parse_uint(cell("trials"));
      if (!trials || *trials < 1) throw Error("trials must be an integer >= 1");
      e.trials = *trials;
      const auto seed = text::parse_uint(cell("seed"));
      if (!seed) throw Error("seed must be a non-negative 64-bit integer");
      e.seed = *seed;
      const auto stop = text::parse_uint(cell("stopAt"));
      if (!stop) throw Error("stopAt must be a non-negative integer");
      e.stop_at = *stop;
      e.nodes = parse_nodes_spec(cell("nodes"));
      e.outputs = parse_output_list(cell("outputs"));

      std::map<std::string, std::string, std::less<>> graph_params;
      for (const auto& [p, c] : graph_cols) {
        const auto v = text::trim(row[c]);
        if (!v.empty()) graph_params.emplace(p, std::string(v));
      }
      auto take = [&](const char* p) -> std::optional<std::string> {
        const auto it = graph_params.find(p);
        if (it == graph_params.end()) return std::nullopt;
        auto v = it->second;
        graph_params.erase(it);
        return v;
      };
      const auto kind = cell("graph");
      if (kind == kSquareGrid) {
        GridSpec g;
        const auto w = take("width");
        const auto h = take("height");
        if (!w || !h) throw Error("squareGrid needs graph.width and graph.height");
        const auto wv = text::parse_uint(*w);
        const auto hv = text::parse_uint(*h);
        if (!wv || !hv || *wv < 1 || *hv < 1 || *wv > 100000 || *hv > 100000) {
          throw Error("graph.width/graph.height must be integers in [1,100000]");
        }
        g.width = *wv;
        g.height = *hv;
        if (auto p = take("periodic")) g.periodic = parse_value(*p, AttributeRange::boolean()).as_bool();
        if (auto n = take("neighborhood")) g.neighborhood = parse_neighborhood(*n);
        g.check();
        e.graph = g;
      } else if (kind == kEdgeFile) {
        auto p = take("path");
        if (!p) throw Error("edgeFile needs graph.path");
        e.graph = EdgeFileSource{*p};
      } else {
        throw Error("unknown graph kind '" + std::string(kind) + "' (expected squareGrid or edgeFile)");
      }
      if (!graph_params.empty()) {
        throw Error("graph." + graph_params.begin()->first + " does not apply to graph kind '" + std::string(kind) + "'");
      }

      auto values = meta.params.defaults();
      for (const auto& [p, c] : model_cols) {
        const auto idx = meta.params.find(p);
        if (idx) declared_anywhere.insert(p);
        const std::string_view raw = row[c];
        if (text::trim(raw).empty()) continue;
        if (!idx) throw Error("model '" + meta.id + "' has no parameter '" + p + "'");
        try {
          values[*idx] = parse_value(raw, meta.params[*idx].range);
        } catch (const Error& err) {
          throw Error("model." + p + ": " + err.what());
        }
      }
      e.params = ParamTable(meta.params, std::move(values));

      detail::check_experiment(e, meta);
      project.experiments.push_back(std::move(e));
    } catch (const Error& err) {
      throw Error(where + ": " + err.what());
    }
  }

  for (const auto& [p, c] : model_cols) {
    if (!declared_anywhere.count(p)) throw Error("project: unknown column 'model." + p + "'");
  }
  return project;
}

inline Project load_project(const std::filesystem::path& path, const ModelRegistry& registry) {
  try {
    return parse_project(csv::read_file(path.string()), registry, path.parent_path());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

// Canonical CSV form; parse_project(serialize_project(p)) == p for the same base_dir.
inline std::string serialize_project(const Project& project) {
  std::vector<std::string> graph_used;
  std::vector<std::string> model_used;
  auto note = [](std::vector<std::string>& list, const std::string& name) {
    if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
  };
  for (const auto& e : project.experiments) {
    if (std::holds_alternative<GridSpec>(e.graph)) {
      for (const char* p : {"width", "height", "periodic", "neighborhood"}) note(graph_used, p);
    } else {
      note(graph_used, "path");
    }
    for (const auto& d : e.params.schema()) note(model_used, d.name);
  }
  // Keep graph columns in their canonical order.
  std::vector<std::string> graph_cols;
  for (const auto& p : detail::graph_param_names()) {
    if (std::find(graph_used.begin(), graph_used.end(), p) != graph_used.end()) graph_cols.push_back(p);
  }

  csv::Row header = detail::reserved_columns();
  for (const auto& p : graph_cols) header.push_back("graph." + p);
  for (const auto& p : model_used) header.push_back("model." + p);
  std::string out = csv::format_row(header);

  for (const auto& e : project.experiments) {
    csv::Row row{e.id,
                 e.model_id,
                 std::to_string(e.trials),
                 std::to_string(e.seed),
                 std::to_string(e.stop_at),
                 e.nodes.to_string(),
                 std::holds_alternative<GridSpec>(e.graph) ? std::string(kSquareGrid) : std::string(kEdgeFile),
                 format_output_list(e.outputs)};
    for (const auto& p : graph_cols) {
      std::string v;
      if (const auto* g = std::get_if<GridSpec>(&e.graph)) {
        if (p == "width") v = std::to_string(g->width);
        if (p == "height") v = std::to_string(g->height);
        if (p == "periodic") v = g->periodic ? "true" : "false";
        if (p == "neighborhood") v = to_string(g->neighborhood);
      } else if (p == "path") {
        v = std::get<EdgeFileSource>(e.graph).path;
      }
      row.push_back(v);
    }
    for (const auto& p : model_used) {
      const auto idx = e.params.schema().find(p);
      row.push_back(idx ? e.params.values()[*idx].to_string() : std::string());
    }
    out += csv::format_row(row);
  }
  return out;
}

}  // namespace evonet
