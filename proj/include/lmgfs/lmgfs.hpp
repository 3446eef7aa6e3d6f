#pragma once

#include "lmgfs/analytic.hpp"
#include "lmgfs/critical.hpp"
#include "lmgfs/errors.hpp"
#include "lmgfs/fidelity.hpp"
#include "lmgfs/hypergeometric.hpp"
#include "lmgfs/model.hpp"
#include "lmgfs/reduced_state.hpp"
#include "lmgfs/scaling.hpp"
#include "lmgfs/sweep.hpp"
