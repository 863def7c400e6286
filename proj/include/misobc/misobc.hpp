#pragma once

#include "misobc/rational.hpp"
#include "misobc/core.hpp"
#include "misobc/region.hpp"
#include "misobc/scheme_ir.hpp"
#include "misobc/decode_walker.hpp"
#include "misobc/exponent_engine.hpp"
#include "misobc/mc_sim.hpp"
#include "misobc/scheduler.hpp"
#include "misobc/io.hpp"
