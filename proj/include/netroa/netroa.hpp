#pragma once

// Umbrella header: region-of-attraction estimation for load-balancing
// dynamics on weighted digraphs via a two-state reduction and a level-set
// backward march, with a brute-force integration oracle for validation.

#include "netroa/commands.hpp"
#include "netroa/config.hpp"
#include "netroa/grid.hpp"
#include "netroa/hjsolver.hpp"
#include "netroa/netmodel.hpp"
#include "netroa/oracle.hpp"
#include "netroa/polynomial.hpp"
#include "netroa/roa.hpp"
#include "netroa/weno.hpp"
