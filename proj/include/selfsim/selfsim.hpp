// Umbrella header for the library (everything except the CLI front end).
#pragma once

#include "selfsim/bl_metric.hpp"
#include "selfsim/cascade.hpp"
#include "selfsim/core.hpp"
#include "selfsim/histogram.hpp"
#include "selfsim/holder.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/packing.hpp"
#include "selfsim/schedule.hpp"
#include "selfsim/spectrum.hpp"
#include "selfsim/transport.hpp"
#include "selfsim/verify.hpp"
