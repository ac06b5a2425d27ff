// Umbrella header for the perception-entropy library.

#pragma once

#include "percept/config.hpp"
#include "percept/entropy.hpp"
#include "percept/evaluator.hpp"
#include "percept/fusion.hpp"
#include "percept/geometry.hpp"
#include "percept/optimizer.hpp"
#include "percept/prior.hpp"
#include "percept/sensor_models.hpp"
