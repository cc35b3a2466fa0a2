#pragma once

// Umbrella header: the full library in one include.

#include "lorentz/rational.hpp"
#include "lorentz/certified.hpp"
#include "lorentz/atom.hpp"
#include "lorentz/verdict.hpp"
#include "lorentz/measure_space.hpp"
#include "lorentz/builtin.hpp"
#include "lorentz/transformation.hpp"
#include "lorentz/simple_function.hpp"
#include "lorentz/lorentz_norm.hpp"
#include "lorentz/operators.hpp"
#include "lorentz/trend.hpp"
#include "lorentz/chaos.hpp"
#include "lorentz/expansivity.hpp"
#include "lorentz/oracle.hpp"
#include "lorentz/report.hpp"
