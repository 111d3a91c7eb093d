#pragma once

#include "fmc/analysis.hpp"
#include "fmc/core.hpp"
#include "fmc/io.hpp"
#include "fmc/multiplier.hpp"
#include "fmc/spectral.hpp"
#include "fmc/torus.hpp"
