#pragma once

#include "fbiharm/error.hpp"
#include "fbiharm/numdiff.hpp"
#include "fbiharm/report.hpp"
#include "fbiharm/maps.hpp"
#include "fbiharm/functions.hpp"
#include "fbiharm/curves.hpp"
#include "fbiharm/hypersurfaces.hpp"
