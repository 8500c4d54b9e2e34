#pragma once

#include "infgeo/check.hpp"
#include "infgeo/cli.hpp"
#include "infgeo/divergence.hpp"
#include "infgeo/dually_flat.hpp"
#include "infgeo/errors.hpp"
#include "infgeo/families.hpp"
#include "infgeo/generator.hpp"
#include "infgeo/geodesic.hpp"
#include "infgeo/metric.hpp"
#include "infgeo/numeric.hpp"
#include "infgeo/types.hpp"
