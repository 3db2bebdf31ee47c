#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evonet/error.hpp"
#include "evonet/models.hpp"
#include "evonet/output.hpp"
#include "evonet/project.hpp"
#include "evonet/trial.hpp"
#include "evonet/wire.hpp"
#include "evonet/worker_pool.hpp"

namespace evonet {

// Bounded frame queue between a trial and one stream consumer. A full queue
// blocks the producing trial, so a stalled consumer stalls stepping rather
// than losing frames.
class Subscription {
 public:
  Subscription(std::uint64_t every, std::size_t capacity) : every_(every ? every : 1), capacity_(capacity ? capacity : 1) {}

  std::uint64_t every() const noexcept { return every_; }

  bool push(std::string frame) {
    std::unique_lock lock(mutex_);
    space_.wait(lock, [this] { return closed_ || frames_.size() < capacity_; });
    if (closed_) return false;
    frames_.push_back(std::move(frame));
    ready_.notify_one();
    return true;
  }

  // Next frame, or nullopt on timeout or when closed and drained.
  std::optional<std::string> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    ready_.wait_for(lock, timeout, [this] { return closed_ || !frames_.empty(); });
    if (frames_.empty()) return std::nullopt;
    auto f = std::move(frames_.front());
    frames_.pop_front();
    space_.notify_one();
    return f;
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    space_.notify_all();
    ready_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
  }

  bool drained() const {
    std::lock_guard lock(mutex_);
    return closed_ && frames_.empty();
  }

 private:
  const std::uint64_t every_;
  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable space_;
  std::condition_variable ready_;
  std::deque<std::string> frames_;
  bool closed_ = false;
};

struct ControlCommand {
  enum class Kind { Run, Pause, Step, Stop };
  Kind kind = Kind::Run;
  std::uint64_t n = 1;  // Step only
};

inline ControlCommand parse_command(std::string_view name, std::uint64_t n = 1) {
  if (name == "run") return {ControlCommand::Kind::Run, n};
  if (name == "pause") return {ControlCommand::Kind::Pause, n};
  if (name == "step") {
    if (n < 1) throw Error("step needs n >= 1");
    return {ControlCommand::Kind::Step, n};
  }
  if (name == "stop") return {ControlCommand::Kind::Stop, n};
  throw Error("unknown command '" + std::string(name) + "' (expected run, pause, step or stop)");
}

using AttrEdit = std::pair<std::size_t, AttrValue>;  // schema index, value

// Thread-safe driver around one Trial for interactive use.
//
// Stepping happens on a WorkerPool job. Every command and edit is applied
// at a step boundary: the job holds the trial lock for the duration of a
// model step, so readers never observe a half-updated graph. status() and
// step() are lock-free and may lag by one step.
class TrialController {
 public:
  TrialController(ExperimentSpec spec, std::size_t index, const ModelRegistry& registry, WorkerPool& pool,
                  TrialOptions options = {}, std::size_t subscriber_capacity = 64)
      : trial_(std::move(spec), index, registry, std::move(options)), pool_(pool), capacity_(subscriber_capacity) {
    trial_.setup();
    sync();
  }

  TrialController(const TrialController&) = delete;
  TrialController& operator=(const TrialController&) = delete;

  ~TrialController() {
    auto lock = access();
    pause_requested_ = true;
    for (auto& s : subscribers_) s->close();
    settled_.wait(lock, [this] { return !driving_; });
  }

  const ExperimentSpec& spec() const noexcept { return trial_.spec(); }
  std::size_t index() const noexcept { return trial_.index(); }
  TrialStatus status() const noexcept { return status_.load(); }
  std::uint64_t step() const noexcept { return step_.load(); }

  std::string diagnostic() const {
    auto lock = access();
    return trial_.diagnostic();
  }

  // Applies a command and returns the resulting status. pause, step and
  // stop return once the trial has settled at a boundary.
  TrialStatus control(const ControlCommand& cmd) {
    using S = TrialStatus;
    using K = ControlCommand::Kind;
    auto lock = access();
    const S current = trial_.status();
    if (is_terminal(current)) {
      throw InvalidTransition(std::string("trial is ") + to_string(current));
    }
    switch (cmd.kind) {
      case K::Run:
        budget_.reset();
        pause_requested_ = false;
        if (current == S::Ready) {
          trial_.transition(S::Queued);
        } else if (current == S::Paused) {
          trial_.transition(S::Running);
        }
        start_driving();
        break;

      case K::Pause:
        if (current == S::Ready) {
          // Holds a fresh trial at step 0 so it can be edited before it runs.
          trial_.transition(S::Queued);
          trial_.transition(S::Running);
          trial_.transition(S::Paused);
          break;
        }
        if (current == S::Paused) break;
        pause_requested_ = true;
        settled_.wait_for(lock, std::chrono::seconds(5), [this] { return !driving_; });
        break;

      case K::Step:
        if (cmd.n < 1) throw Error("step needs n >= 1");
        if (current != S::Ready && current != S::Paused) {
          throw InvalidTransition(std::string("cannot step a ") + to_string(current) + " trial");
        }
        budget_ = cmd.n;
        pause_requested_ = false;
        trial_.transition(current == S::Ready ? S::Queued : S::Running);
        start_driving();
        settled_.wait(lock, [this] { return !driving_; });
        break;

      case K::Stop:
        if (current == S::Ready) {
          trial_.transition(S::Queued);
          trial_.transition(S::Running);
          finish_locked();
        } else if (current == S::Paused) {
          finish_locked();
        } else {
          stop_requested_ = true;
          settled_.wait(lock, [this] { return !driving_; });
        }
        break;
    }
    sync();
    return trial_.status();
  }

  // Blocks until no stepping job is queued or running.
  void wait_settled() {
    auto lock = access();
    settled_.wait(lock, [this] { return !driving_; });
  }

  const AttrSchema& node_schema() const noexcept { return trial_.meta().node_attrs; }

  std::size_t node_count() const {
    auto lock = access();
    return trial_.graph().node_count();
  }

  // Current attributes, with any queued edits for this node overlaid.
  std::vector<AttrValue> node_attrs(NodeId id) const {
    auto lock = access();
    return view_locked(id);
  }

  std::optional<Point> node_position(NodeId id) const {
    auto lock = access();
    require_node(id);
    return trial_.graph().position(id);
  }

  // Validates and applies edits. While a stepping job is active the edit is
  // queued and lands exactly once at the next boundary, before the next
  // model step. Returns the node's attributes as they will be after that.
  std::vector<AttrValue> edit_node(NodeId id, const std::vector<AttrEdit>& edits, bool* queued = nullptr) {
    auto lock = access();
    if (is_terminal(trial_.status())) throw InvalidTransition(std::string("trial is ") + to_string(trial_.status()));
    require_node(id);
    const auto& schema = trial_.graph().node_schema();
    for (const auto& [index, value] : edits) {
      if (index >= schema.size()) throw Error("attribute index out of range");
      if (!validate(value, schema[index].range)) {
        throw Error("value " + value.to_string() + " is invalid for '" + schema[index].name + "' (" +
                    schema[index].range.to_string() + ")");
      }
    }
    if (driving_) {
      pending_.emplace_back(id, edits);
    } else {
      for (const auto& [index, value] : edits) trial_.graph().set_attr(id, index, value);
    }
    if (queued) *queued = driving_;
    return view_locked(id);
  }

  // Frames for every step divisible by `every`. If the current step is on
  // cadence the subscriber receives it immediately.
  std::shared_ptr<Subscription> subscribe(std::uint64_t every) {
    auto sub = std::make_shared<Subscription>(every, capacity_);
    auto lock = access();
    if (trial_.is_set_up() && trial_.step() % sub->every() == 0) sub->push(frame_locked());
    if (is_terminal(trial_.status())) {
      sub->close();
    } else {
      subscribers_.push_back(sub);
    }
    return sub;
  }

 private:
  // The stepping job would otherwise re-take the mutex step after step and
  // starve callers (std::mutex is not fair). Callers announce themselves and
  // the job gives way at the next boundary.
  std::unique_lock<std::mutex> access() const {
    ++waiters_;
    std::unique_lock lock(mutex_);
    --waiters_;
    handoff_.notify_all();
    return lock;
  }

  void require_node(NodeId id) const {
    if (!trial_.is_set_up()) throw Error("trial has no graph (" + trial_.diagnostic() + ")");
    if (!trial_.graph().contains(id)) throw Error("unknown node " + std::to_string(id.index()));
  }

  std::vector<AttrValue> view_locked(NodeId id) const {
    require_node(id);
    const auto span = trial_.graph().attrs(id);
    std::vector<AttrValue> values(span.begin(), span.end());
    for (const auto& [node, edits] : pending_) {
      if (node != id) continue;
      for (const auto& [index, value] : edits) values[index] = value;
    }
    return values;
  }

  std::string frame_locked() const {
    std::vector<std::pair<std::string, Frequency>> stats;
    for (const auto& out : trial_.spec().outputs) {
      if (out.kind == OutputRequest::Kind::Frequency) stats.emplace_back(out.attr, stats_frequency(trial_.graph(), out.attr));
    }
    return wire::encode_frame(trial_.spec().id, trial_.index(), trial_.step(), to_string(trial_.status()),
                              trial_.graph(), stats);
  }

  void sync() {
    status_.store(trial_.status());
    step_.store(trial_.step());
  }

  void start_driving() {
    if (driving_) return;
    driving_ = true;
    pool_.submit([this] { drive(); });
  }

  // Status is published before subscribers see the stream end.
  void finish_locked() {
    trial_.finalize();
    sync();
    close_subscribers();
  }

  void close_subscribers() {
    for (auto& s : subscribers_) s->close();
    subscribers_.clear();
  }

  void drive() {
    std::unique_lock lock(mutex_);
    if (trial_.status() == TrialStatus::Queued) trial_.transition(TrialStatus::Running);
    sync();
    for (;;) {
      handoff_.wait(lock, [this] { return waiters_.load() == 0; });
      for (auto& [id, edits] : pending_) {
        for (const auto& [index, value] : edits) trial_.graph().set_attr(id, index, value);
      }
      pending_.clear();

      if (stop_requested_) {
        finish_locked();
        break;
      }
      if (pause_requested_) {
        trial_.transition(TrialStatus::Paused);
        break;
      }
      if (trial_.done()) {
        finish_locked();
        break;
      }
      if (budget_ && *budget_ == 0) {
        trial_.transition(TrialStatus::Paused);
        break;
      }
      if (!trial_.advance()) {
        sync();
        close_subscribers();
        break;
      }
      if (budget_) --*budget_;
      sync();

      // Deliver outside the lock so a slow consumer only stalls this trial.
      std::vector<std::shared_ptr<Subscription>> due;
      for (const auto& s : subscribers_) {
        if (trial_.step() % s->every() == 0) due.push_back(s);
      }
      if (!due.empty()) {
        const auto frame = frame_locked();
        lock.unlock();
        for (auto& s : due) s->push(frame);
        lock.lock();
        std::erase_if(subscribers_, [](const auto& s) { return s->closed(); });
      }
    }
    budget_.reset();
    pause_requested_ = false;
    stop_requested_ = false;
    driving_ = false;
    sync();
    settled_.notify_all();
  }

  Trial trial_;
  WorkerPool& pool_;
  const std::size_t capacity_;

  mutable std::mutex mutex_;
  mutable std::atomic<int> waiters_{0};
  mutable std::condition_variable handoff_;
  std::condition_variable settled_;
  bool driving_ = false;
  bool pause_requested_ = false;
  bool stop_requested_ = false;
  std::optional<std::uint64_t> budget_;
  std::vector<std::pair<NodeId, std::vector<AttrEdit>>> pending_;
  std::vector<std::shared_ptr<Subscription>> subscribers_;

  std::atomic<TrialStatus> status_{TrialStatus::Ready};
  std::atomic<std::uint64_t> step_{0};
};

}  // namespace evonet
