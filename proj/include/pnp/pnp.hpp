#pragma once

#include "pnp/config.hpp"
#include "pnp/diagnostics.hpp"
#include "pnp/errors.hpp"
#include "pnp/experiments.hpp"
#include "pnp/field.hpp"
#include "pnp/grid.hpp"
#include "pnp/linalg/bicgstab.hpp"
#include "pnp/linalg/dense.hpp"
#include "pnp/linalg/ilu0.hpp"
#include "pnp/linalg/linear_operator.hpp"
#include "pnp/linalg/sparse_matrix.hpp"
#include "pnp/mms.hpp"
#include "pnp/nernst_planck.hpp"
#include "pnp/newton.hpp"
#include "pnp/output.hpp"
#include "pnp/poisson.hpp"
#include "pnp/problem.hpp"
#include "pnp/stencil.hpp"
#include "pnp/timestepper.hpp"
