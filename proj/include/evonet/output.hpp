#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "evonet/attrs.hpp"
#include "evonet/csv.hpp"
#include "evonet/graph.hpp"
#include "evonet/text.hpp"

namespace evonet {

using Frequency = std::map<AttrValue, std::uint64_t>;

// Count of each distinct value of a node attribute, ascending by value.
// Members of a finite declared domain always appear, possibly with 0.
inline Frequency stats_frequency(const Graph& g, std::string_view attr) {
  const auto index = g.node_schema().index_of(attr);
  Frequency freq;
  for (const auto& v : g.node_schema()[index].range.enumerate()) freq.emplace(v, 0);
  for (std::size_t i = 0; i < g.node_count(); ++i) ++freq[g.attr(NodeId(i), index)];
  return freq;
}

// One frequency output accumulated over a trial. Columns are the union of
// all values seen, so interval-typed attributes still get a fixed header.
class FrequencySeries {
 public:
  explicit FrequencySeries(std::string attr = {}) : attr_(std::move(attr)) {}

  const std::string& attr() const noexcept { return attr_; }

  void add(std::uint64_t step, Frequency row) { rows_.emplace_back(step, std::move(row)); }

  std::size_t row_count() const noexcept { return rows_.size(); }
  const std::vector<std::pair<std::uint64_t, Frequency>>& rows() const noexcept { return rows_; }

  std::vector<AttrValue> columns() const {
    Frequency all;
    for (const auto& [_, row] : rows_) {
      for (const auto& [v, __] : row) all.emplace(v, 0);
    }
    std::vector<AttrValue> out;
    for (const auto& [v, _] : all) out.push_back(v);
    return out;
  }

  // header `step,<v1>,<v2>,...`
  std::string to_csv() const {
    const auto cols = columns();
    csv::Row header{"step"};
    for (const auto& v : cols) header.push_back(v.to_string());
    std::string out = csv::format_row(header);
    for (const auto& [step, row] : rows_) {
      csv::Row line{std::to_string(step)};
      for (const auto& v : cols) {
        const auto it = row.find(v);
        line.push_back(std::to_string(it == row.end() ? 0 : it->second));
      }
      out += csv::format_row(line);
    }
    return out;
  }

  friend bool operator==(const FrequencySeries&, const FrequencySeries&) = default;

 private:
  std::string attr_;
  std::vector<std::pair<std::uint64_t, Frequency>> rows_;
};

inline std::string format_coordinate(const std::optional<Point>& p, bool x) {
  if (!p) return {};
  return text::format_real(x ? p->x : p->y);
}

// header `id,x,y,<attr...>`, ascending id; x,y empty without a layout.
inline std::string nodes_snapshot_csv(const Graph& g) {
  csv::Row header{"id", "x", "y"};
  for (const auto& d : g.node_schema()) header.push_back(d.name);
  std::string out = csv::format_row(header);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const NodeId id(i);
    const auto pos = g.position(id);
    csv::Row row{std::to_string(i), format_coordinate(pos, true), format_coordinate(pos, false)};
    for (const auto& v : g.attrs(id)) row.push_back(v.to_string());
    out += csv::format_row(row);
  }
  return out;
}

// header `id,origin,target,<attr...>`
inline std::string edges_snapshot_csv(const Graph& g) {
  csv::Row header{"id", "origin", "target"};
  for (const auto& d : g.edge_schema()) header.push_back(d.name);
  std::string out = csv::format_row(header);
  for (const auto& e : g.edges()) {
    csv::Row row{std::to_string(e.id), std::to_string(e.origin.index()), std::to_string(e.target.index())};
    for (const auto& v : g.edge_attrs(e.id)) row.push_back(v.to_string());
    out += csv::format_row(row);
  }
  return out;
}

}  // namespace evonet
