#pragma once

#include "l0qubo/core.hpp"
#include "l0qubo/qubo.hpp"
#include "l0qubo/qubo_io.hpp"
#include "l0qubo/solvers.hpp"
#include "l0qubo/scenarios.hpp"
#include "l0qubo/baselines.hpp"
#include "l0qubo/harness.hpp"
#include "l0qubo/config.hpp"
