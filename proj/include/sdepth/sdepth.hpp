#pragma once

// Scatter halfspace depth: exact engines, randomized approximations, a
// brute-force reference oracle, file I/O, and a benchmark harness.

#include "sdepth/approx.hpp"
#include "sdepth/bench.hpp"
#include "sdepth/core.hpp"
#include "sdepth/exact2d.hpp"
#include "sdepth/exactnd.hpp"
#include "sdepth/io.hpp"
#include "sdepth/linalg.hpp"
#include "sdepth/oracle.hpp"
#include "sdepth/rng.hpp"
#include "sdepth/visited_store.hpp"
