#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evonet/attrs.hpp"
#include "evonet/error.hpp"
#include "evonet/graph.hpp"
#include "evonet/output.hpp"

// JSON encodings shared by the HTTP API and the frame stream.
namespace evonet::wire {

using json = nlohmann::ordered_json;

inline json to_json(const AttrValue& v) {
  switch (v.type()) {
    case ValueType::Bool: return v.as_bool();
    case ValueType::Int: return v.as_int();
    case ValueType::Real: return v.as_real();
    case ValueType::Text: return v.as_text();
  }
  return nullptr;
}

// JSON value -> typed value for `range`; no cross-type coercion except that
// a JSON integer is accepted where a real is expected.
inline AttrValue from_json(const json& j, const AttributeRange& range) {
  AttrValue v;
  switch (range.value_type()) {
    case ValueType::Bool:
      if (!j.is_boolean()) throw Error("expected a boolean");
      v = j.get<bool>();
      break;
    case ValueType::Int:
      if (!j.is_number_integer()) throw Error("expected an integer");
      v = j.get<std::int64_t>();
      break;
    case ValueType::Real:
      if (!j.is_number()) throw Error("expected a number");
      v = j.get<double>();
      break;
    case ValueType::Text:
      if (!j.is_string()) throw Error("expected a string");
      v = j.get<std::string>();
      break;
  }
  if (!validate(v, range)) throw Error("value " + j.dump() + " is outside " + range.to_string());
  return v;
}

inline json attrs_to_json(const AttrSchema& schema, std::span<const AttrValue> values) {
  json obj = json::object();
  for (std::size_t i = 0; i < schema.size(); ++i) obj[schema[i].name] = to_json(values[i]);
  return obj;
}

inline json node_to_json(const Graph& g, NodeId id, std::span<const AttrValue> values) {
  json n;
  n["id"] = id.index();
  if (const auto p = g.position(id)) {
    n["x"] = p->x;
    n["y"] = p->y;
  }
  n["attrs"] = attrs_to_json(g.node_schema(), values);
  return n;
}

inline json frequency_to_json(const Frequency& f) {
  json obj = json::object();
  for (const auto& [v, count] : f) obj[v.to_string()] = count;
  return obj;
}

// Full-frame encoding: every node with its coordinates and attributes.
inline std::string encode_frame(const std::string& experiment_id, std::size_t trial_index, std::uint64_t step,
                                const char* status, const Graph& g,
                                const std::vector<std::pair<std::string, Frequency>>& stats) {
  json frame;
  frame["experimentId"] = experiment_id;
  frame["trialIndex"] = trial_index;
  frame["step"] = step;
  frame["status"] = status;
  json schema = json::object();
  for (const auto& d : g.node_schema()) schema[d.name] = d.range.to_string();
  frame["schema"] = std::move(schema);
  json nodes = json::array();
  for (std::size_t i = 0; i < g.node_count(); ++i) nodes.push_back(node_to_json(g, NodeId(i), g.attrs(NodeId(i))));
  frame["nodes"] = std::move(nodes);
  if (!stats.empty()) {
    json s = json::object();
    for (const auto& [attr, f] : stats) s[attr] = frequency_to_json(f);
    frame["stats"] = std::move(s);
  }
  return frame.dump();
}

}  // namespace evonet::wire
