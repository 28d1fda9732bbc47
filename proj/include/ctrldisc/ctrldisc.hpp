#pragma once

#include "ctrldisc/exact_basis.hpp"
#include "ctrldisc/fem.hpp"
#include "ctrldisc/mesh.hpp"
#include "ctrldisc/ocp.hpp"
#include "ctrldisc/polynomial.hpp"
#include "ctrldisc/qp.hpp"
#include "ctrldisc/quadrature.hpp"
#include "ctrldisc/rational.hpp"
#include "ctrldisc/report.hpp"
#include "ctrldisc/sparse.hpp"
