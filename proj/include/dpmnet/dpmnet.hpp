#pragma once

#include "dpmnet/benchmark.hpp"
#include "dpmnet/competitors.hpp"
#include "dpmnet/dataset.hpp"
#include "dpmnet/dcov.hpp"
#include "dpmnet/error.hpp"
#include "dpmnet/evaluate.hpp"
#include "dpmnet/gold_standard.hpp"
#include "dpmnet/methods.hpp"
#include "dpmnet/parallel.hpp"
#include "dpmnet/partial_distance.hpp"
#include "dpmnet/precision.hpp"
#include "dpmnet/rng.hpp"
#include "dpmnet/score_matrix.hpp"
#include "dpmnet/simulate.hpp"
