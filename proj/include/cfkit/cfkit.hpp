#pragma once

// Characteristic-function toolkit for aggregate loss distributions:
// build claim count and severity CFs, compose them, and invert the result
// numerically for densities, distribution functions, and quantiles.

#include "char_fn.hpp"
#include "compose.hpp"
#include "empirical.hpp"
#include "errors.hpp"
#include "frequency.hpp"
#include "gpd.hpp"
#include "invert.hpp"
#include "io.hpp"
#include "quadrature.hpp"
#include "severity.hpp"
#include "simulate.hpp"
#include "stats.hpp"
