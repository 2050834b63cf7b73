#ifndef COPDEP_COPDEP_HPP
#define COPDEP_COPDEP_HPP

#include "copdep/archimedean.hpp"
#include "copdep/core.hpp"
#include "copdep/errors.hpp"
#include "copdep/extreme_value.hpp"
#include "copdep/grid.hpp"
#include "copdep/normal.hpp"
#include "copdep/properties.hpp"
#include "copdep/quadrature.hpp"
#include "copdep/registry.hpp"
#include "copdep/report.hpp"
#include "copdep/sampler.hpp"
#include "copdep/verdict.hpp"

#endif  // COPDEP_COPDEP_HPP
