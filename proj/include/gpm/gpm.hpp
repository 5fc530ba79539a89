#pragma once

#include "gpm/error.hpp"
#include "gpm/grassmann.hpp"
#include "gpm/interpolation.hpp"
#include "gpm/linalg.hpp"
#include "gpm/metrics.hpp"
#include "gpm/snapshots.hpp"
#include "gpm/stability.hpp"
#include "gpm/synth.hpp"
