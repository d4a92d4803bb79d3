#pragma once

#include "sinkdiff/analytic.hpp"
#include "sinkdiff/csv.hpp"
#include "sinkdiff/fdoracle.hpp"
#include "sinkdiff/field.hpp"
#include "sinkdiff/laplace.hpp"
#include "sinkdiff/model.hpp"
#include "sinkdiff/quadrature.hpp"
#include "sinkdiff/run_config.hpp"
#include "sinkdiff/specfun.hpp"
#include "sinkdiff/volterra.hpp"
