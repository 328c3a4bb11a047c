#pragma once

#include "baselines.hpp"
#include "canonical.hpp"
#include "csv.hpp"
#include "dwt.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "random.hpp"
#include "stats.hpp"
#include "testbed.hpp"
