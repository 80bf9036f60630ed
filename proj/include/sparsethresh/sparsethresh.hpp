#pragma once

#include "sparsethresh/diagnostics.hpp"
#include "sparsethresh/experiment.hpp"
#include "sparsethresh/generators.hpp"
#include "sparsethresh/linalg.hpp"
#include "sparsethresh/metrics.hpp"
#include "sparsethresh/objectives.hpp"
#include "sparsethresh/operators.hpp"
#include "sparsethresh/problem_io.hpp"
#include "sparsethresh/random.hpp"
#include "sparsethresh/solver.hpp"
