#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evonet/attrs.hpp"
#include "evonet/error.hpp"
#include "evonet/graph.hpp"
#include "evonet/pcg32.hpp"

namespace evonet {

// Declarative description of a model: what its nodes, edges and
// parameters look like. Mirrors the per-model metadata.json file.
struct ModelMeta {
  std::string id;
  int version = 1;
  AttrSchema node_attrs;
  AttrSchema edge_attrs;
  AttrSchema params;

  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

namespace detail {

inline AttrSchema schema_from_json(const nlohmann::ordered_json& j, const char* key) {
  AttrSchema schema;
  if (!j.contains(key)) return schema;
  const auto& obj = j.at(key);
  if (!obj.is_object()) throw Error(std::string("model metadata: '") + key + "' must be an object");
  for (const auto& [name, range] : obj.items()) {
    if (!range.is_string()) throw Error("model metadata: range of '" + name + "' must be a string");
    schema.add(name, parse_attr_range(range.get<std::string>()));
  }
  return schema;
}

inline nlohmann::ordered_json schema_to_json(const AttrSchema& schema) {
  auto obj = nlohmann::ordered_json::object();
  for (const auto& d : schema) obj[d.name] = d.range.to_string();
  return obj;
}

}  // namespace detail

// Key order inside nodeAttrs/edgeAttrs/params is the schema order.
inline ModelMeta parse_model_meta(std::string_view json_text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model metadata: ") + e.what());
  }
  if (!j.is_object()) throw Error("model metadata must be a JSON object");
  ModelMeta meta;
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
    throw Error("model metadata: 'id' must be a non-empty string");
  }
  meta.id = j["id"].get<std::string>();
  if (j.contains("version")) {
    if (!j["version"].is_number_integer()) throw Error("model metadata: 'version' must be an integer");
    meta.version = j["version"].get<int>();
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "id" && key != "version" && key != "nodeAttrs" && key != "edgeAttrs" && key != "params") {
      throw Error("model metadata: unknown key '" + key + "'");
    }
  }
  meta.node_attrs = detail::schema_from_json(j, "nodeAttrs");
  meta.edge_attrs = detail::schema_from_json(j, "edgeAttrs");
  meta.params = detail::schema_from_json(j, "params");
  return meta;
}

inline std::string to_json(const ModelMeta& meta) {
  nlohmann::ordered_json j;
  j["id"] = meta.id;
  j["version"] = meta.version;
  j["nodeAttrs"] = detail::schema_to_json(meta.node_attrs);
  j["edgeAttrs"] = detail::schema_to_json(meta.edge_attrs);
  j["params"] = detail::schema_to_json(meta.params);
  return j.dump(2);
}

// Resolved model parameters, one value per declared parameter.
class ParamTable {
 public:
  ParamTable() = default;
  ParamTable(AttrSchema schema, std::vector<AttrValue> values) : schema_(std::move(schema)), values_(std::move(values)) {
    if (values_.size() != schema_.size()) throw Error("parameter table size mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!validate(values_[i], schema_[i].range)) {
        throw Error("parameter '" + schema_[i].name + "' = " + values_[i].to_string() + " is outside " +
                    schema_[i].range.to_string());
      }
    }
  }

  static ParamTable defaults(const AttrSchema& schema) { return ParamTable(schema, schema.defaults()); }

  const AttrSchema& schema() const noexcept { return schema_; }
  const std::vector<AttrValue>& values() const noexcept { return values_; }
  const AttrValue& get(std::string_view name) const { return values_[schema_.index_of(name)]; }

  friend bool operator==(const ParamTable&, const ParamTable&) = default;

 private:
  AttrSchema schema_;
  std::vector<AttrValue> values_;
};

// What a model sees during init/step. `workers` bounds the threads a model
// may use for read-only phases; results must not depend on it.
struct ModelContext {
  Graph& graph;
  const ParamTable& params;
  Pcg32& rng;
  std::uint64_t step = 0;
  unsigned workers = 1;
};

struct InitResult {
  bool ok = true;
  std::string message;

  static InitResult success() { return {}; }
  static InitResult failure(std::string why) { return {false, std::move(why)}; }
  explicit operator bool() const noexcept { return ok; }
};

class Model {
 public:
  virtual ~Model() = default;

  // Checks preconditions and caches derived state. A failure aborts the trial.
  virtual InitResult init(ModelContext& ctx) = 0;

  virtual void step(ModelContext& ctx) = 0;

  // Optional early-stop hook, polled after every step.
  virtual bool converged(const ModelContext&) const { return false; }
};

using ModelFactory = std::function<std::unique_ptr<Model>()>;

class ModelRegistry {
 public:
  struct Entry {
    ModelMeta meta;
    ModelFactory factory;
  };

  void add(ModelMeta meta, ModelFactory factory) {
    if (meta.id.empty()) throw Error("model id must not be empty");
    if (!factory) throw Error("model '" + meta.id + "' has no factory");
    auto id = meta.id;
    if (!entries_.emplace(id, Entry{std::move(meta), std::move(factory)}).second) {
      throw Error("model '" + id + "' is already registered");
    }
  }

  bool contains(std::string_view id) const { return entries_.find(std::string(id)) != entries_.end(); }

  const Entry& resolve(std::string_view id) const {
    const auto it = entries_.find(std::string(id));
    if (it == entries_.end()) throw Error("unknown model '" + std::string(id) + "'");
    return it->second;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : entries_) out.push_back(id);
    return out;
  }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace evonet
