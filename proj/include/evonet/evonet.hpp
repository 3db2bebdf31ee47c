#pragma once

// Everything except the network front end (evonet/http_server.hpp), which
// pulls in Boost.Beast.

#include "evonet/attrs.hpp"
#include "evonet/control_plane.hpp"
#include "evonet/csv.hpp"
#include "evonet/error.hpp"
#include "evonet/generators.hpp"
#include "evonet/graph.hpp"
#include "evonet/models.hpp"
#include "evonet/output.hpp"
#include "evonet/pcg32.hpp"
#include "evonet/prisoners_dilemma.hpp"
#include "evonet/project.hpp"
#include "evonet/scheduler.hpp"
#include "evonet/trial.hpp"
#include "evonet/trial_control.hpp"
#include "evonet/wire.hpp"
#include "evonet/worker_pool.hpp"
