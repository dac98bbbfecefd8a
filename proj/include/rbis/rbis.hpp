#pragma once

// Umbrella header for the rbis synchronization library.

#include "rbis/clock.hpp"
#include "rbis/compensation.hpp"
#include "rbis/config.hpp"
#include "rbis/csv.hpp"
#include "rbis/errors.hpp"
#include "rbis/estimator.hpp"
#include "rbis/manifest.hpp"
#include "rbis/protocol.hpp"
#include "rbis/random.hpp"
#include "rbis/scenario.hpp"
#include "rbis/simulation.hpp"
#include "rbis/stats.hpp"
#include "rbis/time.hpp"
#include "rbis/tsn_bridge.hpp"
#include "rbis/version.hpp"
