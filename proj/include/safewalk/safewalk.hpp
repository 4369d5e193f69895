// Convenience header for the whole engine (without the network transport).

#pragma once

#include "safewalk/calibration.hpp"
#include "safewalk/config.hpp"
#include "safewalk/gait.hpp"
#include "safewalk/geometry.hpp"
#include "safewalk/locomotion.hpp"
#include "safewalk/pipeline.hpp"
#include "safewalk/room.hpp"
#include "safewalk/session.hpp"
#include "safewalk/sim.hpp"
#include "safewalk/trace.hpp"
#include "safewalk/tracking.hpp"
#include "safewalk/warning.hpp"
