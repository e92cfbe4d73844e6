#pragma once

#include "core.hpp"
#include "geometry.hpp"
#include "fourier.hpp"
#include "toeplitz.hpp"
#include "cell.hpp"
#include "field_system.hpp"
#include "spectrum.hpp"
#include "limit.hpp"
#include "epsilon.hpp"
#include "projection.hpp"
#include "slab1d.hpp"
#include "green.hpp"
#include "bands.hpp"
#include "io.hpp"
#include "config.hpp"
