#pragma once

#include "zonokit/attacks.hpp"
#include "zonokit/errors.hpp"
#include "zonokit/estimator.hpp"
#include "zonokit/harness.hpp"
#include "zonokit/linalg.hpp"
#include "zonokit/lp.hpp"
#include "zonokit/model.hpp"
#include "zonokit/rng.hpp"
#include "zonokit/scenario.hpp"
#include "zonokit/setops.hpp"
#include "zonokit/svg.hpp"
#include "zonokit/tolerances.hpp"
