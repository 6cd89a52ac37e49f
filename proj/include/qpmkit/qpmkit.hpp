#pragma once

#include "qpmkit/coincsim.hpp"
#include "qpmkit/crystal_config.hpp"
#include "qpmkit/dispersion.hpp"
#include "qpmkit/errors.hpp"
#include "qpmkit/pairstats.hpp"
#include "qpmkit/phasematch.hpp"
#include "qpmkit/presets.hpp"
#include "qpmkit/qpm_inference.hpp"
#include "qpmkit/roots.hpp"
#include "qpmkit/units.hpp"
