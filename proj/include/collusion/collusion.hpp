#pragma once

#include "collusion/curve_table.hpp"
#include "collusion/errors.hpp"
#include "collusion/model.hpp"
#include "collusion/quadrature.hpp"
#include "collusion/solvers.hpp"
#include "collusion/svg_plot.hpp"
#include "collusion/sweeps.hpp"
#include "collusion/verify.hpp"
