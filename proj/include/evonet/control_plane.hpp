#pragma once

#include <charconv>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "evonet/error.hpp"
#include "evonet/models.hpp"
#include "evonet/project.hpp"
#include "evonet/text.hpp"
#include "evonet/trial_control.hpp"
#include "evonet/wire.hpp"
#include "evonet/worker_pool.hpp"

namespace evonet {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

// Transport-independent implementation of the HTTP API:
//
//   GET   /api/experiments
//   GET   /api/experiments/{id}/trials/{t}
//   POST  /api/experiments/{id}/trials/{t}/control   {"command": ..., "n": k}
//   GET   /api/experiments/{id}/trials/{t}/nodes/{node}
//   PATCH /api/experiments/{id}/trials/{t}/nodes/{node}   {"<attr>": value, ...}
//   WS    /api/stream?exp={id}&trial={t}&every={k}
//
// Errors: 400 bad input, 404 unknown id, 405 wrong method, 409 invalid
// state transition. Every trial starts Ready.
class ControlPlane {
 public:
  ControlPlane(Project project, const ModelRegistry& registry, std::size_t threads, TrialOptions options = {},
               std::size_t subscriber_capacity = 64)
      : project_(std::move(project)), pool_(threads) {
    for (const auto& e : project_.experiments) {
      auto& list = trials_.emplace_back();
      for (std::size_t t = 0; t < e.trials; ++t) {
        list.push_back(std::make_unique<TrialController>(e, t, registry, pool_, options, subscriber_capacity));
      }
    }
  }

  const Project& project() const noexcept { return project_; }

  TrialController* find(std::string_view experiment_id, std::size_t trial) {
    for (std::size_t i = 0; i < project_.experiments.size(); ++i) {
      if (project_.experiments[i].id == experiment_id) {
        return trial < trials_[i].size() ? trials_[i][trial].get() : nullptr;
      }
    }
    return nullptr;
  }

  ApiResponse handle(std::string_view method, std::string_view target, std::string_view body) {
    try {
      return route(method, target, body);
    } catch (const InvalidTransition& e) {
      return error(409, e.what());
    } catch (const Error& e) {
      return error(400, e.what());
    } catch (const nlohmann::json::exception& e) {
      return error(400, std::string("malformed JSON: ") + e.what());
    }
  }

  // Stream subscription for a WS upgrade request, or the error to reply with.
  std::variant<std::shared_ptr<Subscription>, ApiResponse> open_stream(std::string_view target) {
    const auto [path, query] = split_target(target);
    if (path != "/api/stream") return error(404, "no such endpoint");
    std::string exp;
    std::optional<std::uint64_t> trial = 0;
    std::optional<std::uint64_t> every = 1;
    for (auto pair : text::split(query, '&')) {
      const auto eq = pair.find('=');
      const auto key = pair.substr(0, eq);
      const auto value = eq == std::string_view::npos ? std::string() : url_decode(pair.substr(eq + 1));
      if (key == "exp") exp = value;
      if (key == "trial") trial = text::parse_uint(value);
      if (key == "every") every = text::parse_uint(value);
    }
    if (exp.empty()) return error(400, "missing exp parameter");
    if (!trial) return error(400, "trial must be a non-negative integer");
    if (!every || *every < 1) return error(400, "every must be a positive integer");
    auto* controller = find(exp, *trial);
    if (!controller) return error(404, "unknown experiment or trial");
    return controller->subscribe(*every);
  }

 private:
  static ApiResponse error(int status, std::string_view message) {
    wire::json j;
    j["error"] = message;
    return {status, j.dump()};
  }

  static ApiResponse ok(const wire::json& j) { return {200, j.dump()}; }

  static std::pair<std::string_view, std::string_view> split_target(std::string_view target) {
    const auto q = target.find('?');
    if (q == std::string_view::npos) return {target, {}};
    return {target.substr(0, q), target.substr(q + 1)};
  }

  static std::string url_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      unsigned byte = 0;
      if (s[i] == '%' && i + 2 < s.size() &&
          std::from_chars(s.data() + i + 1, s.data() + i + 3, byte, 16).ptr == s.data() + i + 3) {
        out += static_cast<char>(byte);
        i += 2;
      } else if (s[i] == '+') {
        out += ' ';
      } else {
        out += s[i];
      }
    }
    return out;
  }

  wire::json trial_json(const TrialController& c) const {
    wire::json t;
    t["index"] = c.index();
    t["status"] = to_string(c.status());
    t["step"] = c.step();
    if (c.status() == TrialStatus::Failed) t["diagnostic"] = c.diagnostic();
    return t;
  }

  ApiResponse route(std::string_view method, std::string_view target, std::string_view body) {
    const auto path = split_target(target).first;
    auto parts = text::split(path, '/');
    // "/api/experiments/..." splits as "", "api", "experiments", ...
    if (parts.size() < 3 || !parts[0].empty() || parts[1] != "api" || parts[2] != "experiments") {
      return error(404, "no such endpoint");
    }
    if (!parts.empty() && parts.back().empty()) parts.pop_back();

    if (parts.size() == 3) {
      if (method != "GET") return error(405, "method not allowed");
      wire::json list = wire::json::array();
      for (std::size_t i = 0; i < project_.experiments.size(); ++i) {
        const auto& e = project_.experiments[i];
        wire::json j;
        j["id"] = e.id;
        j["model"] = e.model_id;
        j["stopAt"] = e.stop_at;
        j["params"] = wire::attrs_to_json(e.params.schema(), e.params.values());
        wire::json trials = wire::json::array();
        for (const auto& c : trials_[i]) trials.push_back(trial_json(*c));
        j["trials"] = std::move(trials);
        list.push_back(std::move(j));
      }
      return ok(list);
    }

    if (parts.size() < 6 || parts[4] != "trials") return error(404, "no such endpoint");
    const auto trial_index = text::parse_uint(parts[5]);
    TrialController* c = trial_index ? find(parts[3], *trial_index) : nullptr;
    if (!c) return error(404, "unknown experiment '" + std::string(parts[3]) + "' or trial '" + std::string(parts[5]) + "'");

    if (parts.size() == 6) {
      if (method != "GET") return error(405, "method not allowed");
      return ok(trial_json(*c));
    }

    if (parts.size() == 7 && parts[6] == "control") {
      if (method != "POST") return error(405, "method not allowed");
      const auto j = wire::json::parse(body.empty() ? std::string_view("{}") : body);
      if (!j.is_object() || !j.contains("command") || !j["command"].is_string()) {
        throw Error("body must be {\"command\": \"run\"|\"pause\"|\"step\"|\"stop\"}");
      }
      std::uint64_t n = 1;
      if (j.contains("n")) {
        if (!j["n"].is_number_unsigned() || j["n"].get<std::uint64_t>() < 1) throw Error("n must be a positive integer");
        n = j["n"].get<std::uint64_t>();
      }
      c->control(parse_command(j["command"].get<std::string>(), n));
      return ok(trial_json(*c));
    }

    if (parts.size() == 8 && parts[6] == "nodes") {
      const auto node = text::parse_uint(parts[7]);
      if (!node || *node >= c->node_count()) return error(404, "unknown node '" + std::string(parts[7]) + "'");
      const NodeId id(*node);
      if (method == "GET") return ok(node_json(*c, id, c->node_attrs(id), std::nullopt));
      if (method == "PATCH") {
        const auto j = wire::json::parse(body);
        if (!j.is_object() || j.empty()) throw Error("body must be a non-empty object of attribute values");
        std::vector<AttrEdit> edits;
        const auto& schema = c->node_schema();
        for (const auto& [name, value] : j.items()) {
          const auto idx = schema.find(name);
          if (!idx) throw Error("unknown attribute '" + name + "'");
          try {
            edits.emplace_back(*idx, wire::from_json(value, schema[*idx].range));
          } catch (const InvalidTransition&) {
            throw;
          } catch (const Error& e) {
            throw Error("attribute '" + name + "': " + e.what());
          }
        }
        bool queued = false;
        auto values = c->edit_node(id, edits, &queued);
        return ok(node_json(*c, id, values, queued));
      }
      return error(405, "method not allowed");
    }
    return error(404, "no such endpoint");
  }

  wire::json node_json(const TrialController& c, NodeId id, const std::vector<AttrValue>& values,
                       std::optional<bool> pending) const {
    wire::json n;
    n["id"] = id.index();
    if (const auto p = c.node_position(id)) {
      n["x"] = p->x;
      n["y"] = p->y;
    }
    n["attrs"] = wire::attrs_to_json(c.node_schema(), values);
    n["step"] = c.step();
    if (pending) n["pending"] = *pending;
    return n;
  }

  Project project_;
  WorkerPool pool_;  // outlives every controller below
  std::vector<std::vector<std::unique_ptr<TrialController>>> trials_;
};

}  // namespace evonet
