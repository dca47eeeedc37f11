#pragma once

#include "lancaster/bootstrap.hpp"
#include "lancaster/error.hpp"
#include "lancaster/experiments.hpp"
#include "lancaster/interaction_tests.hpp"
#include "lancaster/io.hpp"
#include "lancaster/kernels.hpp"
#include "lancaster/oracle.hpp"
#include "lancaster/parallel.hpp"
#include "lancaster/random.hpp"
#include "lancaster/statistics.hpp"
#include "lancaster/synthdata.hpp"
