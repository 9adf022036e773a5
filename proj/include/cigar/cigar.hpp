#pragma once

// Umbrella header for the cigar soliton verification library.

#include "calculus.hpp"
#include "charts.hpp"
#include "errors.hpp"
#include "fd.hpp"
#include "field_types.hpp"
#include "fields.hpp"
#include "functions.hpp"
#include "geodesics.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "metrics.hpp"
#include "ode.hpp"
#include "sampling.hpp"
#include "soliton.hpp"
#include "suite.hpp"
