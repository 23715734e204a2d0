#pragma once

#include "lsqb/bounds.hpp"
#include "lsqb/config.hpp"
#include "lsqb/design.hpp"
#include "lsqb/estimator.hpp"
#include "lsqb/io.hpp"
#include "lsqb/montecarlo.hpp"
#include "lsqb/noise.hpp"
#include "lsqb/seed.hpp"
#include "lsqb/stats.hpp"
