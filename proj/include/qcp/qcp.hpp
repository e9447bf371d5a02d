#pragma once

// Umbrella header.

#include "qcp/core.hpp"
#include "qcp/polyhedron.hpp"
#include "qcp/lp.hpp"
#include "qcp/scalarization.hpp"
#include "qcp/vlp_solver.hpp"
#include "qcp/qcp_solver.hpp"
#include "qcp/lifting.hpp"
#include "qcp/problems.hpp"
#include "qcp/io.hpp"
