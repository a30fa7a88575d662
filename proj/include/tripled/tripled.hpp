#pragma once

#include "tripled/cli.hpp"
#include "tripled/errors.hpp"
#include "tripled/funcspace.hpp"
#include "tripled/hypotheses.hpp"
#include "tripled/io.hpp"
#include "tripled/mnc.hpp"
#include "tripled/operators.hpp"
#include "tripled/problems.hpp"
#include "tripled/quadrature.hpp"
#include "tripled/random.hpp"
#include "tripled/solver.hpp"
