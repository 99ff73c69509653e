#pragma once

#include "curvature_flow.hpp"
#include "detector.hpp"
#include "errors.hpp"
#include "gmm.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "resistance.hpp"
#include "sbm_bench.hpp"
