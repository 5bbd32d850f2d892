#pragma once

// Umbrella header for the whole library.

#include "sdkrylov/analysis.hpp"
#include "sdkrylov/baselines.hpp"
#include "sdkrylov/bench.hpp"
#include "sdkrylov/cg.hpp"
#include "sdkrylov/cholesky.hpp"
#include "sdkrylov/dense.hpp"
#include "sdkrylov/eig.hpp"
#include "sdkrylov/errors.hpp"
#include "sdkrylov/io.hpp"
#include "sdkrylov/minres.hpp"
#include "sdkrylov/operator.hpp"
#include "sdkrylov/problems.hpp"
#include "sdkrylov/random.hpp"
#include "sdkrylov/selfdual.hpp"
#include "sdkrylov/sparse.hpp"
#include "sdkrylov/split.hpp"
