#pragma once

#include "ris/errors.hpp"
#include "ris/geometry.hpp"
#include "ris/em_core.hpp"
#include "ris/surface_profiles.hpp"
#include "ris/quadrature.hpp"
#include "ris/field_integrals.hpp"
#include "ris/asymptotics.hpp"
#include "ris/experiments.hpp"
#include "ris/config.hpp"
