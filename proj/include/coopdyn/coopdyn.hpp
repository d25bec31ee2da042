#pragma once

#include "coopdyn/abm.hpp"
#include "coopdyn/errors.hpp"
#include "coopdyn/experiment.hpp"
#include "coopdyn/fpe.hpp"
#include "coopdyn/game.hpp"
#include "coopdyn/io.hpp"
#include "coopdyn/meanfield.hpp"
#include "coopdyn/population.hpp"
#include "coopdyn/reward.hpp"
#include "coopdyn/rng.hpp"
#include "coopdyn/run.hpp"
#include "coopdyn/snapshot.hpp"
#include "coopdyn/stationary.hpp"
#include "coopdyn/verify.hpp"
