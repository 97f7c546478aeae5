#pragma once

// Umbrella header for the full library.

#include "snr/csv.hpp"
#include "snr/family.hpp"
#include "snr/geograph.hpp"
#include "snr/geojson.hpp"
#include "snr/intensity.hpp"
#include "snr/io.hpp"
#include "snr/mixed_model.hpp"
#include "snr/model.hpp"
#include "snr/model_config.hpp"
#include "snr/point_pattern.hpp"
#include "snr/rng.hpp"
#include "snr/simulate.hpp"
#include "snr/spline.hpp"
#include "snr/stats_util.hpp"
