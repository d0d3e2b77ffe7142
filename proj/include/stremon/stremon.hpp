#pragma once

// Robust predictive runtime verification for stochastic multi-agent systems:
// STL/STREL parsing and monitoring, distribution-shift-robust conformal
// calibration, trajectory predictors, shift estimation, and the coverage
// experiment harness.

#include "stremon/conformal.hpp"
#include "stremon/dataset.hpp"
#include "stremon/experiment.hpp"
#include "stremon/ext_real.hpp"
#include "stremon/formula.hpp"
#include "stremon/graph.hpp"
#include "stremon/parser.hpp"
#include "stremon/predicate.hpp"
#include "stremon/predictors.hpp"
#include "stremon/rng.hpp"
#include "stremon/rprv.hpp"
#include "stremon/semantics.hpp"
#include "stremon/shift.hpp"
#include "stremon/systems.hpp"
#include "stremon/trajectory.hpp"
#include "stremon/transform.hpp"
