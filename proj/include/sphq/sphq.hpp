#pragma once

#include "sphq/common.hpp"
#include "sphq/distortion.hpp"
#include "sphq/evt.hpp"
#include "sphq/factorial.hpp"
#include "sphq/montecarlo.hpp"
#include "sphq/quadrature.hpp"
#include "sphq/radial.hpp"
#include "sphq/search.hpp"
#include "sphq/special.hpp"
#include "sphq/version.hpp"
