#pragma once

#include "istdforge/brd.hpp"
#include "istdforge/components.hpp"
#include "istdforge/degrade.hpp"
#include "istdforge/errors.hpp"
#include "istdforge/filters.hpp"
#include "istdforge/grid.hpp"
#include "istdforge/harvest.hpp"
#include "istdforge/image.hpp"
#include "istdforge/image_io.hpp"
#include "istdforge/losses.hpp"
#include "istdforge/metrics.hpp"
#include "istdforge/noiselab.hpp"
#include "istdforge/regen.hpp"
#include "istdforge/rng.hpp"
#include "istdforge/wavelet.hpp"
