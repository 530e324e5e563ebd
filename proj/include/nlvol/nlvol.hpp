#pragma once

// Umbrella header: nonlocal-volume estimation for pure qubit states.

#include "nlvol/rng.hpp"
#include "nlvol/linalg.hpp"
#include "nlvol/scenario.hpp"
#include "nlvol/state.hpp"
#include "nlvol/observable.hpp"
#include "nlvol/measurement.hpp"
#include "nlvol/inequality.hpp"
#include "nlvol/bell_operator.hpp"
#include "nlvol/behavior.hpp"
#include "nlvol/cg.hpp"
#include "nlvol/simplex.hpp"
#include "nlvol/polytope.hpp"
#include "nlvol/volume.hpp"
#include "nlvol/theorems.hpp"
#include "nlvol/suites.hpp"
