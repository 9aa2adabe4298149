#pragma once

#include "chemolab/config.hpp"
#include "chemolab/constants.hpp"
#include "chemolab/diagnostics.hpp"
#include "chemolab/elliptic.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/grid.hpp"
#include "chemolab/harness.hpp"
#include "chemolab/oracles.hpp"
#include "chemolab/stepper.hpp"
