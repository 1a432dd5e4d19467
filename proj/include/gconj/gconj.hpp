#pragma once

// Umbrella header for the generalized-conjugation laboratory.

#include "gconj/errors.hpp"
#include "gconj/extended_value.hpp"
#include "gconj/tolerances.hpp"
#include "gconj/parallel.hpp"
#include "gconj/point_set.hpp"
#include "gconj/sampled_function.hpp"
#include "gconj/expr.hpp"
#include "gconj/sampling.hpp"
#include "gconj/coupling.hpp"
#include "gconj/conjugate.hpp"
#include "gconj/duality.hpp"
#include "gconj/lagrangian.hpp"
#include "gconj/gapfn.hpp"
#include "gconj/stability.hpp"
#include "gconj/csv.hpp"
#include "gconj/problem_spec.hpp"
