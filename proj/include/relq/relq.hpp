#pragma once

#include "relq/brownian.hpp"
#include "relq/constellation.hpp"
#include "relq/feasibility.hpp"
#include "relq/harness.hpp"
#include "relq/instance.hpp"
#include "relq/linalg.hpp"
#include "relq/random.hpp"
#include "relq/rounding.hpp"
#include "relq/sdp.hpp"
#include "relq/solution.hpp"
