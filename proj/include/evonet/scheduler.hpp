#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "evonet/error.hpp"
#include "evonet/models.hpp"
#include "evonet/project.hpp"
#include "evonet/trial.hpp"
#include "evonet/worker_pool.hpp"

namespace evonet {

// Runs every (experiment, trial) pair as an independent job on a pool of at
// most `max_workers` threads. Results come back in (row, trial) order no
// matter which job finished first; a failing trial never affects siblings.
inline std::vector<TrialResult> schedule(const Project& project, const ModelRegistry& registry,
                                         std::size_t max_workers, const TrialOptions& options = {}) {
  if (max_workers < 1) throw Error("maxWorkers must be at least 1");

  struct Unit {
    const ExperimentSpec* spec;
    std::size_t trial;
  };
  std::vector<Unit> units;
  for (const auto& e : project.experiments) {
    for (std::size_t t = 0; t < e.trials; ++t) units.push_back({&e, t});
  }

  std::vector<TrialResult> results(units.size());
  {
    WorkerPool pool(std::min(max_workers, std::max<std::size_t>(units.size(), 1)));
    for (std::size_t i = 0; i < units.size(); ++i) {
      pool.submit([&, i] {
        try {
          results[i] = run_trial(*units[i].spec, units[i].trial, registry, options);
        } catch (const std::exception& e) {
          results[i].experiment_id = units[i].spec->id;
          results[i].trial_index = units[i].trial;
          results[i].status = TrialStatus::Failed;
          results[i].diagnostic = e.what();
        }
      });
    }
  }
  return results;
}

}  // namespace evonet
