#pragma once

// Umbrella header: the full weighted-bootstrap toolkit.

#include "wboot/bands.hpp"
#include "wboot/empirical.hpp"
#include "wboot/experiments.hpp"
#include "wboot/gaussian.hpp"
#include "wboot/io.hpp"
#include "wboot/kde.hpp"
#include "wboot/parallel.hpp"
#include "wboot/rng.hpp"
#include "wboot/stats.hpp"
#include "wboot/weights.hpp"
