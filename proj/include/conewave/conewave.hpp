#pragma once

#include "conewave/errors.hpp"
#include "conewave/lattice.hpp"
#include "conewave/wave.hpp"
#include "conewave/sampler.hpp"
#include "conewave/geometry.hpp"
#include "conewave/synthesis.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/tube_cover.hpp"
#include "conewave/blue_exceptional.hpp"
#include "conewave/extraction.hpp"
#include "conewave/profile.hpp"
#include "conewave/calibration.hpp"
#include "conewave/wave_io.hpp"
#include "conewave/tube_io.hpp"
