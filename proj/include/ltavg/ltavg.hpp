#pragma once

#include "arith.hpp"
#include "cache_spill.hpp"
#include "classnumber.hpp"
#include "curves.hpp"
#include "experiments.hpp"
#include "finite_field.hpp"
#include "ltconstant.hpp"
#include "numberfield.hpp"
#include "report.hpp"
