#pragma once

#include "qfip/analytic.hpp"
#include "qfip/brute_force.hpp"
#include "qfip/core.hpp"
#include "qfip/montecarlo.hpp"
#include "qfip/noise.hpp"
#include "qfip/pauli.hpp"
#include "qfip/preserve.hpp"
#include "qfip/qfi.hpp"
