#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evonet/error.hpp"
#include "evonet/generators.hpp"
#include "evonet/graph.hpp"
#include "evonet/models.hpp"
#include "evonet/output.hpp"
#include "evonet/pcg32.hpp"
#include "evonet/project.hpp"

namespace evonet {

enum class TrialStatus { Ready, Queued, Running, Paused, Finished, Failed };

inline const char* to_string(TrialStatus s) noexcept {
  switch (s) {
    case TrialStatus::Ready: return "ready";
    case TrialStatus::Queued: return "queued";
    case TrialStatus::Running: return "running";
    case TrialStatus::Paused: return "paused";
    case TrialStatus::Finished: return "finished";
    case TrialStatus::Failed: return "failed";
  }
  return "?";
}

inline bool is_terminal(TrialStatus s) noexcept { return s == TrialStatus::Finished || s == TrialStatus::Failed; }

// Ready -> Queued -> Running <-> Paused -> Finished; anything live -> Failed.
inline bool transition_allowed(TrialStatus from, TrialStatus to) noexcept {
  using S = TrialStatus;
  if (to == S::Failed) return !is_terminal(from);
  switch (from) {
    case S::Ready: return to == S::Queued;
    case S::Queued: return to == S::Running;
    case S::Running: return to == S::Paused || to == S::Finished;
    case S::Paused: return to == S::Running || to == S::Finished;
    default: return false;
  }
}

class InvalidTransition : public Error {
 public:
  using Error::Error;
};

struct TrialOptions {
  // Empty: keep snapshots in memory and write nothing.
  std::filesystem::path out_dir;
  // Threads a model may use inside one step.
  unsigned model_workers = 1;
};

struct Snapshot {
  OutputRequest::Kind kind = OutputRequest::Kind::NodeSnapshot;
  std::uint64_t step = 0;
  std::string csv;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct TrialResult {
  std::string experiment_id;
  std::size_t trial_index = 0;
  TrialStatus status = TrialStatus::Ready;
  std::string diagnostic;
  std::uint64_t steps = 0;
  std::vector<FrequencySeries> frequencies;
  std::vector<Snapshot> snapshots;
  std::vector<std::filesystem::path> files;
  std::optional<Graph> final_graph;
  double wall_seconds = 0;

  // Deterministic rendering of everything except timing and file paths.
  std::string serialize() const {
    std::string out = "# " + experiment_id + " trial " + std::to_string(trial_index) + " " + to_string(status) +
                      " steps " + std::to_string(steps) + "\n";
    if (!diagnostic.empty()) out += "# diagnostic " + diagnostic + "\n";
    for (const auto& f : frequencies) out += "# freq " + f.attr() + "\n" + f.to_csv();
    for (const auto& s : snapshots) out += "# snapshot " + std::to_string(s.step) + "\n" + s.csv;
    if (final_graph) out += "# final nodes\n" + nodes_snapshot_csv(*final_graph);
    return out;
  }
};

inline std::string output_prefix(const std::string& experiment_id, std::size_t trial_index) {
  return experiment_id + "_t" + std::to_string(trial_index);
}

inline Graph build_graph(const ExperimentSpec& spec, const ModelMeta& meta, std::size_t node_count) {
  if (const auto* grid = std::get_if<GridSpec>(&spec.graph)) {
    return square_grid(*grid, meta.node_attrs, meta.edge_attrs);
  }
  const auto& source = std::get<EdgeFileSource>(spec.graph);
  const auto path = spec.base_dir.empty() ? std::filesystem::path(source.path) : spec.base_dir / source.path;
  return graph_from_edge_file(path, node_count, meta.node_attrs, meta.edge_attrs);
}

// One execution of an experiment. Single-threaded: callers that share a
// Trial across threads must serialize access (see TrialController).
class Trial {
 public:
  Trial(ExperimentSpec spec, std::size_t index, const ModelRegistry& registry, TrialOptions options = {})
      : spec_(std::move(spec)),
        index_(index),
        entry_(&registry.resolve(spec_.model_id)),
        options_(std::move(options)),
        rng_(spec_.seed + index) {}

  const ExperimentSpec& spec() const noexcept { return spec_; }
  std::size_t index() const noexcept { return index_; }
  const ModelMeta& meta() const noexcept { return entry_->meta; }
  TrialStatus status() const noexcept { return status_; }
  std::uint64_t step() const noexcept { return step_; }
  bool is_set_up() const noexcept { return model_ != nullptr; }
  const std::string& diagnostic() const noexcept { return diagnostic_; }
  Graph& graph() noexcept { return graph_; }
  const Graph& graph() const noexcept { return graph_; }

  void transition(TrialStatus to) {
    if (!transition_allowed(status_, to)) {
      throw InvalidTransition(std::string("cannot go from ") + to_string(status_) + " to " + to_string(to));
    }
    status_ = to;
  }

  void fail(std::string why) {
    diagnostic_ = std::move(why);
    if (!is_terminal(status_)) status_ = TrialStatus::Failed;
  }

  // Builds the graph, populates nodes, runs model init and emits step 0.
  bool setup() {
    if (is_set_up()) return true;
    const auto start = std::chrono::steady_clock::now();
    try {
      auto table = generate_nodes(spec_.nodes, meta().node_attrs, rng_, spec_.base_dir);
      graph_ = build_graph(spec_, meta(), table.size());
      populate(graph_, table);
      auto model = entry_->factory();
      auto ctx = context();
      if (auto init = model->init(ctx); !init) {
        fail("model init failed: " + init.message);
        return false;
      }
      model_ = std::move(model);
      for (const auto& out : spec_.outputs) {
        if (out.kind == OutputRequest::Kind::Frequency) frequencies_.emplace_back(out.attr);
      }
      emit();
    } catch (const std::exception& e) {
      fail(e.what());
      return false;
    }
    elapsed_ += std::chrono::steady_clock::now() - start;
    return true;
  }

  bool done() {
    if (!is_set_up()) return false;
    if (step_ >= spec_.stop_at) return true;
    return model_->converged(context());
  }

  // One model step followed by any due outputs.
  bool advance() {
    const auto start = std::chrono::steady_clock::now();
    try {
      auto ctx = context();
      model_->step(ctx);
      ++step_;
      emit();
    } catch (const std::exception& e) {
      fail("step " + std::to_string(step_ + 1) + ": " + e.what());
      return false;
    }
    elapsed_ += std::chrono::steady_clock::now() - start;
    return true;
  }

  // Writes the accumulated frequency tables and marks the trial Finished.
  bool finalize() {
    try {
      if (!options_.out_dir.empty()) {
        for (const auto& f : frequencies_) {
          write(output_prefix(spec_.id, index_) + "_freq_" + f.attr() + ".csv", f.to_csv());
        }
      }
    } catch (const std::exception& e) {
      fail(e.what());
      return false;
    }
    transition(TrialStatus::Finished);
    return true;
  }

  TrialResult result() const {
    TrialResult r;
    r.experiment_id = spec_.id;
    r.trial_index = index_;
    r.status = status_;
    r.diagnostic = diagnostic_;
    r.steps = step_;
    r.frequencies = frequencies_;
    r.snapshots = snapshots_;
    r.files = files_;
    if (is_set_up()) r.final_graph = graph_;
    r.wall_seconds = std::chrono::duration<double>(elapsed_).count();
    return r;
  }

  const std::vector<FrequencySeries>& frequencies() const noexcept { return frequencies_; }

 private:
  ModelContext context() { return ModelContext{graph_, spec_.params, rng_, step_, options_.model_workers}; }

  void emit() {
    std::size_t f = 0;
    for (const auto& out : spec_.outputs) {
      if (out.kind == OutputRequest::Kind::Frequency) {
        if (out.due(step_)) frequencies_[f].add(step_, stats_frequency(graph_, out.attr));
        ++f;
        continue;
      }
      if (!out.due(step_)) continue;
      const bool nodes = out.kind == OutputRequest::Kind::NodeSnapshot;
      auto body = nodes ? nodes_snapshot_csv(graph_) : edges_snapshot_csv(graph_);
      if (options_.out_dir.empty()) {
        snapshots_.push_back({out.kind, step_, std::move(body)});
      } else {
        write(output_prefix(spec_.id, index_) + (nodes ? "_nodes_" : "_edges_") + std::to_string(step_) + ".csv", body);
      }
    }
  }

  void write(const std::string& name, const std::string& body) {
    std::filesystem::create_directories(options_.out_dir);
    const auto path = options_.out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw Error("cannot write '" + path.string() + "'");
    files_.push_back(path);
  }

  ExperimentSpec spec_;
  std::size_t index_;
  const ModelRegistry::Entry* entry_;
  TrialOptions options_;
  Pcg32 rng_;
  TrialStatus status_ = TrialStatus::Ready;
  std::string diagnostic_;
  std::uint64_t step_ = 0;
  Graph graph_;
  std::unique_ptr<Model> model_;
  std::vector<FrequencySeries> frequencies_;
  std::vector<Snapshot> snapshots_;
  std::vector<std::filesystem::path> files_;
  std::chrono::steady_clock::duration elapsed_{};
};

// Runs a trial start to finish on the calling thread.
inline TrialResult run_trial(const ExperimentSpec& spec, std::size_t trial_index, const ModelRegistry& registry,
                             TrialOptions options = {}) {
  Trial trial(spec, trial_index, registry, std::move(options));
  trial.transition(TrialStatus::Queued);
  trial.transition(TrialStatus::Running);
  if (trial.setup()) {
    while (!trial.done()) {
      if (!trial.advance()) break;
    }
    if (trial.status() == TrialStatus::Running) trial.finalize();
  }
  return trial.result();
}

}  // namespace evonet
