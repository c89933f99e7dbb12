#pragma once

#include "vcdl/numeric.hpp"
#include "vcdl/interval_union.hpp"
#include "vcdl/piecewise_density.hpp"
#include "vcdl/loss.hpp"
#include "vcdl/functionals.hpp"
#include "vcdl/validity.hpp"
#include "vcdl/learners.hpp"
#include "vcdl/instances.hpp"
#include "vcdl/stats.hpp"
#include "vcdl/exactcheck.hpp"
#include "vcdl/serialization.hpp"
#include "vcdl/experiments.hpp"
