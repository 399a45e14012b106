#pragma once

#include "supbridge/errors.hpp"
#include "supbridge/geometry.hpp"
#include "supbridge/curves.hpp"
#include "supbridge/crookedness.hpp"
#include "supbridge/constructions.hpp"
#include "supbridge/region_n.hpp"
#include "supbridge/search.hpp"
#include "supbridge/knot_io.hpp"
#include "supbridge/verify.hpp"
