#pragma once

#include "cgfact/contrasts.hpp"
#include "cgfact/copulas.hpp"
#include "cgfact/effects.hpp"
#include "cgfact/errors.hpp"
#include "cgfact/inference.hpp"
#include "cgfact/parallel.hpp"
#include "cgfact/rng.hpp"
#include "cgfact/simulation.hpp"
#include "cgfact/survival.hpp"
