#pragma once

#include "splinequad/error.hpp"
#include "splinequad/knots.hpp"
#include "splinequad/bspline.hpp"
#include "splinequad/system.hpp"
#include "splinequad/solver.hpp"
#include "splinequad/continuation.hpp"
#include "splinequad/sources.hpp"
#include "splinequad/generate.hpp"
#include "splinequad/verify.hpp"
#include "splinequad/io.hpp"
