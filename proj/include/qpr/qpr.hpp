#pragma once

// Quasipolynomial reduction toolkit: exact rational linear algebra, the QP
// data model with its format-preserving transformations, decoupling
// reductions, an ODE text format, and numeric trajectory verification.

#include "qpr/cli.hpp"
#include "qpr/coefficient.hpp"
#include "qpr/error.hpp"
#include "qpr/integrate.hpp"
#include "qpr/linalg.hpp"
#include "qpr/parse.hpp"
#include "qpr/qp_system.hpp"
#include "qpr/rat_matrix.hpp"
#include "qpr/rational.hpp"
#include "qpr/reduce.hpp"
#include "qpr/report.hpp"
#include "qpr/transform.hpp"
#include "qpr/verify.hpp"
