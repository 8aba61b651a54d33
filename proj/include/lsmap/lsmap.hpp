#pragma once

#include "lsmap/baselines.hpp"
#include "lsmap/channel.hpp"
#include "lsmap/config.hpp"
#include "lsmap/correlate.hpp"
#include "lsmap/env.hpp"
#include "lsmap/eval.hpp"
#include "lsmap/filter.hpp"
#include "lsmap/geometry.hpp"
#include "lsmap/grid.hpp"
#include "lsmap/io.hpp"
#include "lsmap/logodds.hpp"
#include "lsmap/rng.hpp"
