#pragma once

#include "bergman/core.hpp"
#include "bergman/ball.hpp"
#include "bergman/lattice.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/kernels.hpp"
#include "bergman/measures.hpp"
#include "bergman/operators.hpp"
#include "bergman/summing.hpp"
#include "bergman/serialize.hpp"
#include "bergman/experiments.hpp"
