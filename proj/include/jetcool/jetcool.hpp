#pragma once

// Umbrella header for the whole toolkit.

#include "jetcool/benchmark.hpp"
#include "jetcool/cli.hpp"
#include "jetcool/config.hpp"
#include "jetcool/correlations.hpp"
#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"
#include "jetcool/explorer.hpp"
#include "jetcool/geometry.hpp"
#include "jetcool/metrology.hpp"
#include "jetcool/performance.hpp"
#include "jetcool/props.hpp"
#include "jetcool/rootfind.hpp"
#include "jetcool/topo.hpp"
#include "jetcool/units.hpp"
