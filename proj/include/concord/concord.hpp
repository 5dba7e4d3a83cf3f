#pragma once

#include "concord/errors.hpp"
#include "concord/io.hpp"
#include "concord/lp.hpp"
#include "concord/mcmc.hpp"
#include "concord/measures.hpp"
#include "concord/owamcc.hpp"
#include "concord/rng.hpp"
#include "concord/simulate.hpp"
#include "concord/types.hpp"
