#pragma once

// Umbrella header.

#include "cyclores/classical.hpp"
#include "cyclores/fields.hpp"
#include "cyclores/grid.hpp"
#include "cyclores/landau.hpp"
#include "cyclores/observables.hpp"
#include "cyclores/propagators.hpp"
#include "cyclores/scenario.hpp"
