#pragma once

// Umbrella header for the moment-inequality inference engine.

#include "mineq/bootstrap.hpp"
#include "mineq/diagnostics.hpp"
#include "mineq/extended_real.hpp"
#include "mineq/lasso.hpp"
#include "mineq/methods.hpp"
#include "mineq/moments.hpp"
#include "mineq/normal.hpp"
#include "mineq/parallel.hpp"
#include "mineq/rng.hpp"
#include "mineq/sample_matrix.hpp"
#include "mineq/selection.hpp"
#include "mineq/simulate.hpp"
#include "mineq/sn.hpp"
#include "mineq/summation.hpp"
