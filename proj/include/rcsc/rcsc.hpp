#pragma once

#include "rcsc/rng.hpp"
#include "rcsc/space.hpp"
#include "rcsc/geometry.hpp"
#include "rcsc/connect.hpp"
#include "rcsc/complex.hpp"
#include "rcsc/functional.hpp"
#include "rcsc/montecarlo.hpp"
#include "rcsc/stats.hpp"
#include "rcsc/parallel.hpp"
#include "rcsc/moments.hpp"
#include "rcsc/normapprox.hpp"
#include "rcsc/config.hpp"
#include "rcsc/report.hpp"
#include "rcsc/render.hpp"
#include "rcsc/runner.hpp"
