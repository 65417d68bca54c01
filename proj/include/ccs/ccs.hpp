#pragma once

#include "ccs/eval.hpp"
#include "ccs/graph.hpp"
#include "ccs/metrics.hpp"
#include "ccs/oracle.hpp"
#include "ccs/pprcs.hpp"
#include "ccs/rng.hpp"
#include "ccs/sampler.hpp"
#include "ccs/sccs.hpp"
