#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "evonet/graph.hpp"
#include "evonet/models.hpp"

// Spatial prisoner's dilemma with deterministic imitation of the best
// performer.
//
// Each round every node plays the one-shot game against each neighbor and
// against itself, summing the payoffs. Then, synchronously, every node adopts
// the cooperation flag of the highest earner in its closed neighborhood.
// A node whose own payoff ties the maximum keeps its flag; otherwise the
// lowest-id maximal neighbor wins.
namespace evonet::pd {

inline constexpr double kReward = 1.0;
inline constexpr double kPunishment = 0.0;
inline constexpr double kSucker = 0.0;

// Strategy codes. Parity is the only thing the dynamics read; the
// "new" states mark a flip in the last step for display purposes.
enum Strategy : std::int64_t {
  kCooperator = 0,
  kDefector = 1,
  kNewCooperator = 2,
  kNewDefector = 3,
};

constexpr bool cooperates(std::int64_t strategy) noexcept { return strategy % 2 == 0; }

constexpr std::int64_t recode(bool was_cooperating, bool cooperating) noexcept {
  if (cooperating) return was_cooperating ? kCooperator : kNewCooperator;
  return was_cooperating ? kNewDefector : kDefector;
}

inline constexpr const char* kModelId = "prisonersDilemma";

// Kept identical to models/prisonersDilemma/metadata.json.
inline constexpr const char* kMetadataJson = R"({
  "id": "prisonersDilemma",
  "version": 1,
  "nodeAttrs": {
    "strategy": "int{0,1,2,3}"
  },
  "edgeAttrs": {},
  "params": {
    "temptation": "double[0,10]"
  }
})";

inline ModelMeta metadata() { return parse_model_meta(kMetadataJson); }

struct PDParams {
  double temptation = 0;
};

// Payoff to A.
constexpr double payoff(bool a_cooperates, bool b_cooperates, const PDParams& p) noexcept {
  if (a_cooperates) return b_cooperates ? kReward : kSucker;
  return b_cooperates ? p.temptation : kPunishment;
}

namespace detail {

template <typename FlagOf>
double accumulate(const Graph& g, NodeId id, const PDParams& p, FlagOf&& flag_of) {
  const bool self = flag_of(id);
  double total = 0.0;
  for (const NodeId nb : g.neighbors(id)) total += payoff(self, flag_of(nb), p);
  return total + payoff(self, self, p);
}

}  // namespace detail

// Total payoff of `id` against its neighbors plus one game against itself,
// read from the node's current `strategy` attribute.
inline double accumulate(const Graph& g, NodeId id, const PDParams& p) {
  const auto strategy = g.node_schema().index_of("strategy");
  return detail::accumulate(g, id, p, [&](NodeId n) { return cooperates(g.attr(n, strategy).as_int()); });
}

class PrisonersDilemma final : public Model {
 public:
  InitResult init(ModelContext& ctx) override {
    const auto& g = ctx.graph;
    const auto idx = g.node_schema().find("strategy");
    if (!idx) return InitResult::failure("prisonersDilemma: nodes have no 'strategy' attribute");
    strategy_ = *idx;

    const auto t = ctx.params.schema().find("temptation");
    if (!t) return InitResult::failure("prisonersDilemma: missing parameter 'temptation'");
    const auto& tv = ctx.params.values()[*t];
    if (tv.type() != ValueType::Real || !validate(tv, metadata().params[0].range)) {
      return InitResult::failure("prisonersDilemma: temptation " + tv.to_string() + " outside double[0,10]");
    }
    params_.temptation = tv.as_real();

    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const auto& v = g.attr(NodeId(i), strategy_);
      if (v.type() != ValueType::Int || v.as_int() < kCooperator || v.as_int() > kNewDefector) {
        return InitResult::failure("prisonersDilemma: node " + std::to_string(i) + " has strategy " + v.to_string() +
                                   ", expected one of 0,1,2,3");
      }
    }
    flags_.resize(g.node_count());
    payoffs_.resize(g.node_count());
    return InitResult::success();
  }

  void step(ModelContext& ctx) override {
    auto& g = ctx.graph;
    const std::size_t n = g.node_count();
    for (std::size_t i = 0; i < n; ++i) flags_[i] = cooperates(g.attr(NodeId(i), strategy_).as_int()) ? 1 : 0;

    // Payoffs: read-only over the graph, split across workers.
    const auto compute = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        payoffs_[i] = detail::accumulate(g, NodeId(i), params_, [&](NodeId k) { return flags_[k.index()] != 0; });
      }
    };
    const std::size_t workers = std::clamp<std::size_t>(ctx.workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
      compute(0, n);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin < end) pool.emplace_back(compute, begin, end);
      }
    }

    // Imitation and recoding, from the same payoff snapshot.
    for (std::size_t i = 0; i < n; ++i) {
      double best = payoffs_[i];
      bool choice = flags_[i] != 0;
      for (const NodeId nb : g.neighbors(NodeId(i))) {
        if (payoffs_[nb.index()] > best) {
          best = payoffs_[nb.index()];
          choice = flags_[nb.index()] != 0;
        }
      }
      g.set_attr(NodeId(i), strategy_, AttrValue(recode(flags_[i] != 0, choice)));
    }
  }

  const PDParams& params() const noexcept { return params_; }
  const std::vector<double>& last_payoffs() const noexcept { return payoffs_; }

 private:
  std::size_t strategy_ = 0;
  PDParams params_;
  std::vector<std::uint8_t> flags_;
  std::vector<double> payoffs_;
};

inline void register_model(ModelRegistry& registry) {
  registry.add(metadata(), [] { return std::make_unique<PrisonersDilemma>(); });
}

}  // namespace evonet::pd

namespace evonet {

// Registry preloaded with the models that ship with the library.
inline ModelRegistry builtin_models() {
  ModelRegistry registry;
  pd::register_model(registry);
  return registry;
}

}  // namespace evonet
