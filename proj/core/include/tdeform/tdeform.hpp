#pragma once

#include "tdeform/analysis.hpp"
#include "tdeform/deformation.hpp"
#include "tdeform/errors.hpp"
#include "tdeform/field.hpp"
#include "tdeform/integrator.hpp"
#include "tdeform/sweep.hpp"
#include "tdeform/t_system.hpp"
#include "tdeform/types.hpp"
#include "tdeform/version.hpp"
