#pragma once

#include "cmaes/bounds.hpp"
#include "cmaes/cma.hpp"
#include "cmaes/cmawm.hpp"
#include "cmaes/distribution.hpp"
#include "cmaes/errors.hpp"
#include "cmaes/hyperparams.hpp"
#include "cmaes/lra.hpp"
#include "cmaes/restart.hpp"
#include "cmaes/rng.hpp"
#include "cmaes/snapshot.hpp"
#include "cmaes/state_io.hpp"
#include "cmaes/termination.hpp"
#include "cmaes/types.hpp"
#include "cmaes/update.hpp"
#include "cmaes/warm_start.hpp"
