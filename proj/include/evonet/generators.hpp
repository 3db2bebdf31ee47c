#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evonet/attrs.hpp"
#include "evonet/csv.hpp"
#include "evonet/error.hpp"
#include "evonet/graph.hpp"
#include "evonet/pcg32.hpp"
#include "evonet/text.hpp"

namespace evonet {

enum class Neighborhood { VonNeumann, Moore };

inline const char* to_string(Neighborhood n) noexcept { return n == Neighborhood::Moore ? "moore" : "vonNeumann"; }

inline Neighborhood parse_neighborhood(std::string_view s) {
  s = text::trim(s);
  if (s == "vonNeumann") return Neighborhood::VonNeumann;
  if (s == "moore") return Neighborhood::Moore;
  throw Error("unknown neighborhood '" + std::string(s) + "' (expected vonNeumann or moore)");
}

struct GridSpec {
  std::size_t width = 1;
  std::size_t height = 1;
  bool periodic = false;
  Neighborhood neighborhood = Neighborhood::VonNeumann;

  // Wrapping a side shorter than 3 would connect the same pair twice.
  void check() const {
    if (width < 1 || height < 1) throw Error("grid width and height must be at least 1");
    if (periodic && (width < 3 || height < 3)) {
      throw Error("periodic grid needs width and height >= 3, got " + std::to_string(width) + "x" +
                  std::to_string(height));
    }
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Row-major lattice: id = row * width + col, position (col, row).
inline Graph square_grid(const GridSpec& spec, AttrSchema node_schema = {}, AttrSchema edge_schema = {}) {
  spec.check();
  const auto w = static_cast<std::int64_t>(spec.width);
  const auto h = static_cast<std::int64_t>(spec.height);

  // Forward half of the stencil; the other half is covered from the far cell.
  struct Offset {
    std::int64_t dx, dy;
  };
  std::vector<Offset> forward{{1, 0}, {0, 1}};
  if (spec.neighborhood == Neighborhood::Moore) {
    forward.push_back({1, 1});
    forward.push_back({-1, 1});
  }

  std::vector<EdgePair> pairs;
  pairs.reserve(static_cast<std::size_t>(w * h) * forward.size());
  for (std::int64_t row = 0; row < h; ++row) {
    for (std::int64_t col = 0; col < w; ++col) {
      for (const auto& o : forward) {
        std::int64_t c = col + o.dx;
        std::int64_t r = row + o.dy;
        if (spec.periodic) {
          c = (c + w) % w;
          r = (r + h) % h;
        } else if (c < 0 || c >= w || r < 0 || r >= h) {
          continue;
        }
        pairs.emplace_back(static_cast<std::size_t>(row * w + col), static_cast<std::size_t>(r * w + c));
      }
    }
  }

  Graph g(Directedness::Undirected, spec.width * spec.height, pairs, std::move(node_schema), std::move(edge_schema));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    g.set_position(NodeId(i), Point{static_cast<double>(i % spec.width), static_cast<double>(i / spec.width)});
  }
  return g;
}

inline void apply_circular_layout(Graph& g) {
  const auto n = static_cast<double>(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
    g.set_position(NodeId(i), Point{std::cos(angle), std::sin(angle)});
  }
}

// Edge list CSV. Header `origin,target` gives an undirected graph. With a
// third `directed` column the graph is directed when every row says true,
// undirected when every row says false; mixing is an error.
inline Graph graph_from_edge_csv(std::string_view content, std::size_t node_count, AttrSchema node_schema = {},
                                 AttrSchema edge_schema = {}) {
  const auto rows = csv::parse(content);
  if (rows.empty()) throw Error("edge file is empty (missing header origin,target)");
  const auto& header = rows.front();
  const bool has_flag = header.size() == 3 && header[2] == "directed";
  if (header.size() < 2 || header[0] != "origin" || header[1] != "target" || (header.size() == 3 && !has_flag) ||
      header.size() > 3) {
    throw Error("edge file header must be 'origin,target' or 'origin,target,directed'");
  }

  std::vector<EdgePair> pairs;
  std::optional<bool> directed;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) throw Error("edge file row " + std::to_string(r + 1) + ": wrong column count");
    const auto u = text::parse_uint(row[0]);
    const auto v = text::parse_uint(row[1]);
    if (!u || !v) throw Error("edge file row " + std::to_string(r + 1) + ": ids must be non-negative integers");
    if (has_flag) {
      const auto flag = text::trim(row[2]);
      if (flag != "true" && flag != "false") throw Error("edge file row " + std::to_string(r + 1) + ": bad directed flag");
      const bool d = flag == "true";
      if (directed && *directed != d) throw Error("edge file mixes directed and undirected rows");
      directed = d;
    }
    pairs.emplace_back(*u, *v);
  }

  Graph g(directed.value_or(false) ? Directedness::Directed : Directedness::Undirected, node_count, pairs,
          std::move(node_schema), std::move(edge_schema));
  apply_circular_layout(g);
  return g;
}

inline Graph graph_from_edge_file(const std::filesystem::path& path, std::size_t node_count,
                                  AttrSchema node_schema = {}, AttrSchema edge_schema = {}) {
  try {
    return graph_from_edge_csv(csv::read_file(path.string()), node_count, std::move(node_schema),
                               std::move(edge_schema));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

// --- nodes generator -------------------------------------------------------

struct Assignment {
  std::string name;
  std::string value;  // raw text, typed against the schema at generation

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct NodePatch {
  std::size_t id = 0;
  std::vector<Assignment> values;

  friend bool operator==(const NodePatch&, const NodePatch&) = default;
};

// Mini-language for initial populations:
//
//   same(N)  same(N; a=v, b=w)
//   random(N)  random(N; seed)  random(N; seed; a=v, ...)
//   file(path)
//
// optionally followed by any number of `| set(id: a=v, ...)` patches,
// applied left to right after the base command.
struct NodesSpec {
  enum class Kind { Same, Random, File };

  Kind kind = Kind::Same;
  std::size_t count = 0;
  std::optional<std::uint64_t> seed;
  std::string path;
  std::vector<Assignment> overrides;
  std::vector<NodePatch> patches;

  std::string to_string() const {
    auto assignments = [](const std::vector<Assignment>& list) {
      std::string s;
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) s += ", ";
        s += list[i].name + "=" + list[i].value;
      }
      return s;
    };
    std::string s;
    switch (kind) {
      case Kind::Same:
        s = "same(" + std::to_string(count);
        if (!overrides.empty()) s += "; " + assignments(overrides);
        s += ")";
        break;
      case Kind::Random:
        s = "random(" + std::to_string(count);
        if (seed) s += "; " + std::to_string(*seed);
        if (!overrides.empty()) s += "; " + assignments(overrides);
        s += ")";
        break;
      case Kind::File: s = "file(" + path + ")"; break;
    }
    for (const auto& p : patches) s += " | set(" + std::to_string(p.id) + ": " + assignments(p.values) + ")";
    return s;
  }

  friend bool operator==(const NodesSpec&, const NodesSpec&) = default;
};

namespace detail {

inline std::vector<Assignment> parse_assignments(std::string_view s, std::string_view where) {
  std::vector<Assignment> out;
  for (auto piece : text::split(s, ',')) {
    piece = text::trim(piece);
    const auto eq = piece.find('=');
    if (eq == std::string_view::npos) throw Error(std::string(where) + ": expected name=value, got '" + std::string(piece) + "'");
    Assignment a{std::string(text::trim(piece.substr(0, eq))), std::string(text::trim(piece.substr(eq + 1)))};
    if (!text::is_identifier(a.name)) throw Error(std::string(where) + ": bad attribute name '" + a.name + "'");
    if (a.value.find_first_of(";|()=") != std::string::npos) {
      throw Error(std::string(where) + ": value '" + a.value + "' contains a reserved character");
    }
    out.push_back(std::move(a));
  }
  return out;
}

inline std::size_t parse_count(std::string_view s, std::string_view where) {
  auto n = text::parse_uint(s);
  if (!n || *n < 1) throw Error(std::string(where) + ": node count must be a positive integer");
  return *n;
}

// Splits "name(args)" into name and args, requiring the whole clause.
inline std::pair<std::string_view, std::string_view> split_call(std::string_view clause) {
  clause = text::trim(clause);
  const auto open = clause.find('(');
  if (open == std::string_view::npos || clause.back() != ')') {
    throw Error("nodes spec: malformed clause '" + std::string(clause) + "'");
  }
  return {text::trim(clause.substr(0, open)), clause.substr(open + 1, clause.size() - open - 2)};
}

}  // namespace detail

inline NodesSpec parse_nodes_spec(std::string_view input) {
  NodesSpec spec;
  const auto clauses = text::split(input, '|');
  const auto [base, args] = detail::split_call(clauses.front());

  if (base == "file") {
    spec.kind = NodesSpec::Kind::File;
    spec.path = std::string(text::trim(args));
    if (spec.path.empty()) throw Error("nodes spec: file() needs a path");
  } else if (base == "same" || base == "random") {
    const auto parts = text::split(args, ';');
    spec.count = detail::parse_count(parts[0], base);
    if (base == "same") {
      spec.kind = NodesSpec::Kind::Same;
      if (parts.size() > 2) throw Error("nodes spec: same(N; a=v, ...) takes at most two sections");
      if (parts.size() == 2) spec.overrides = detail::parse_assignments(parts[1], "same");
    } else {
      spec.kind = NodesSpec::Kind::Random;
      if (parts.size() > 3) throw Error("nodes spec: random(N; seed; a=v, ...) takes at most three sections");
      std::size_t next = 1;
      if (parts.size() > 1 && parts[1].find('=') == std::string_view::npos) {
        spec.seed = text::parse_uint(parts[1]);
        if (!spec.seed) throw Error("nodes spec: random seed must be a non-negative integer");
        next = 2;
      }
      if (next < parts.size()) {
        if (next + 1 != parts.size()) throw Error("nodes spec: unexpected section after attribute overrides");
        spec.overrides = detail::parse_assignments(parts[next], "random");
      }
    }
  } else {
    throw Error("nodes spec: unknown command '" + std::string(base) + "' (expected same, random or file)");
  }

  for (std::size_t i = 1; i < clauses.size(); ++i) {
    const auto [name, body] = detail::split_call(clauses[i]);
    if (name != "set") throw Error("nodes spec: unknown patch '" + std::string(name) + "' (expected set)");
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) throw Error("nodes spec: set(id: a=v, ...) needs a ':'");
    const auto id = text::parse_uint(body.substr(0, colon));
    if (!id) throw Error("nodes spec: set() id must be a non-negative integer");
    spec.patches.push_back({*id, detail::parse_assignments(body.substr(colon + 1), "set")});
  }
  return spec;
}

struct NodeTable {
  std::vector<std::vector<AttrValue>> rows;
  std::vector<std::optional<Point>> positions;  // empty unless the source carried x,y

  std::size_t size() const noexcept { return rows.size(); }
};

namespace detail {

inline void apply_assignments(std::vector<AttrValue>& row, const std::vector<Assignment>& list, const AttrSchema& schema) {
  for (const auto& a : list) {
    const auto index = schema.index_of(a.name);
    try {
      row[index] = parse_value(a.value, schema[index].range);
    } catch (const Error& e) {
      throw Error("attribute '" + a.name + "': " + e.what());
    }
  }
}

inline NodeTable nodes_from_csv(std::string_view content, const AttrSchema& schema) {
  const auto rows = csv::parse(content);
  if (rows.empty()) throw Error("nodes file is empty");
  const auto& header = rows.front();
  std::vector<std::optional<std::size_t>> column_attr(header.size());
  std::optional<std::size_t> x_col;
  std::optional<std::size_t> y_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = text::trim(header[c]);
    if (auto idx = schema.find(name)) {
      column_attr[c] = idx;
    } else if (name == "x" && !x_col) {
      x_col = c;
    } else if (name == "y" && !y_col) {
      y_col = c;
    } else {
      throw Error("nodes file: unknown column '" + std::string(name) + "'");
    }
  }
  if (x_col.has_value() != y_col.has_value()) throw Error("nodes file: x and y columns must appear together");

  NodeTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) throw Error("nodes file row " + std::to_string(r + 1) + ": wrong column count");
    auto values = schema.defaults();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!column_attr[c] || row[c].empty()) continue;
      const auto& decl = schema[*column_attr[c]];
      try {
        values[*column_attr[c]] = parse_value(row[c], decl.range);
      } catch (const Error& e) {
        throw Error("nodes file row " + std::to_string(r + 1) + ", attribute '" + decl.name + "': " + e.what());
      }
    }
    table.rows.push_back(std::move(values));
    if (x_col) {
      const auto x = text::parse_real(row[*x_col]);
      const auto y = text::parse_real(row[*y_col]);
      if (x && y) {
        table.positions.push_back(Point{*x, *y});
      } else if (text::trim(row[*x_col]).empty() && text::trim(row[*y_col]).empty()) {
        table.positions.push_back(std::nullopt);
      } else {
        throw Error("nodes file row " + std::to_string(r + 1) + ": bad coordinates");
      }
    }
  }
  if (table.rows.empty()) throw Error("nodes file has no rows");
  return table;
}

}  // namespace detail

// Builds the initial attribute tables. `random(N)` without an explicit seed
// draws from `rng`; with a seed it uses its own PCG32 stream. Draw order is
// node-major, attributes in schema order, skipping overridden attributes.
inline NodeTable generate_nodes(const NodesSpec& spec, const AttrSchema& schema, Pcg32& rng,
                                const std::filesystem::path& base_dir = {}) {
  NodeTable table;
  switch (spec.kind) {
    case NodesSpec::Kind::Same: {
      auto row = schema.defaults();
      detail::apply_assignments(row, spec.overrides, schema);
      table.rows.assign(spec.count, row);
      break;
    }
    case NodesSpec::Kind::Random: {
      std::vector<bool> fixed(schema.size(), false);
      auto base = schema.defaults();
      detail::apply_assignments(base, spec.overrides, schema);
      for (const auto& a : spec.overrides) fixed[schema.index_of(a.name)] = true;
      Pcg32 own(spec.seed.value_or(0));
      Pcg32& source = spec.seed ? own : rng;
      table.rows.reserve(spec.count);
      for (std::size_t n = 0; n < spec.count; ++n) {
        auto row = base;
        for (std::size_t i = 0; i < schema.size(); ++i) {
          if (!fixed[i]) row[i] = random_value(schema[i].range, source);
        }
        table.rows.push_back(std::move(row));
      }
      break;
    }
    case NodesSpec::Kind::File: {
      const auto path = base_dir.empty() ? std::filesystem::path(spec.path) : base_dir / spec.path;
      try {
        table = detail::nodes_from_csv(csv::read_file(path.string()), schema);
      } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
      }
      break;
    }
  }
  for (const auto& patch : spec.patches) {
    if (patch.id >= table.rows.size()) {
      throw Error("set(" + std::to_string(patch.id) + ": ...) references a node outside 0.." +
                  std::to_string(table.rows.size() - 1));
    }
    detail::apply_assignments(table.rows[patch.id], patch.values, schema);
  }
  return table;
}

// Copies the table into the graph. Counts must match exactly.
inline void populate(Graph& g, const NodeTable& table) {
  if (table.size() != g.node_count()) {
    throw Error("nodes spec produced " + std::to_string(table.size()) + " nodes but the graph has " +
                std::to_string(g.node_count()));
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    g.assign_attrs(NodeId(i), table.rows[i]);
    if (!table.positions.empty() && table.positions[i]) g.set_position(NodeId(i), table.positions[i]);
  }
}

}  // namespace evonet
