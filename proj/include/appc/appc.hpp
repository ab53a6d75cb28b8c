#pragma once

#include "appc/bench.hpp"
#include "appc/engine.hpp"
#include "appc/grid_world.hpp"
#include "appc/instance_gen.hpp"
#include "appc/max_flow.hpp"
#include "appc/pathfinding.hpp"
#include "appc/rng.hpp"
#include "appc/strategies.hpp"
#include "appc/trace.hpp"
#include "appc/types.hpp"
#include "appc/visibility.hpp"
