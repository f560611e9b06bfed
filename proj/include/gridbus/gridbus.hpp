#pragma once

#include "gridbus/bank/grid_bank.hpp"
#include "gridbus/broker/discovery.hpp"
#include "gridbus/broker/planning.hpp"
#include "gridbus/broker/session.hpp"
#include "gridbus/core/format.hpp"
#include "gridbus/core/rng.hpp"
#include "gridbus/core/types.hpp"
#include "gridbus/data/data_grid.hpp"
#include "gridbus/grid/grid.hpp"
#include "gridbus/grid/model.hpp"
#include "gridbus/libra/libra.hpp"
#include "gridbus/libra/session.hpp"
#include "gridbus/market/directory.hpp"
#include "gridbus/session.hpp"
#include "gridbus/sim/kernel.hpp"
#include "gridbus/simulation.hpp"
#include "gridbus/sweep/plan.hpp"
#include "gridbus/world.hpp"
