// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hmortar/assembly.hpp"
#include "hmortar/bspline.hpp"
#include "hmortar/config.hpp"
#include "hmortar/errors.hpp"
#include "hmortar/geometry.hpp"
#include "hmortar/harmonics.hpp"
#include "hmortar/infsup.hpp"
#include "hmortar/io.hpp"
#include "hmortar/jacobi.hpp"
#include "hmortar/manufactured.hpp"
#include "hmortar/quadrature.hpp"
#include "hmortar/saddle.hpp"
#include "hmortar/source.hpp"
#include "hmortar/spline_space.hpp"
