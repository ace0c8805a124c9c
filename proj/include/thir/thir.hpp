// thir.hpp - umbrella header.

#pragma once

#include "thir/analysis.hpp"
#include "thir/channel.hpp"
#include "thir/config.hpp"
#include "thir/detectors.hpp"
#include "thir/experiment.hpp"
#include "thir/montecarlo.hpp"
#include "thir/rng.hpp"
#include "thir/scenario.hpp"
#include "thir/spreading.hpp"
#include "thir/stats.hpp"
#include "thir/verification.hpp"
