#pragma once

#include "aoifleet/events.hpp"
#include "aoifleet/fleet.hpp"
#include "aoifleet/freshness_ledger.hpp"
#include "aoifleet/metrics_io.hpp"
#include "aoifleet/rng.hpp"
#include "aoifleet/road_graph.hpp"
#include "aoifleet/router.hpp"
#include "aoifleet/scenario.hpp"
#include "aoifleet/sim_engine.hpp"
#include "aoifleet/traffic_model.hpp"
