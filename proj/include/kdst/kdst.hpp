#pragma once

#include "kdst/errors.hpp"
#include "kdst/experiment.hpp"
#include "kdst/generator.hpp"
#include "kdst/graph.hpp"
#include "kdst/lp.hpp"
#include "kdst/lp_model.hpp"
#include "kdst/max_flow.hpp"
#include "kdst/mps.hpp"
#include "kdst/path_space.hpp"
#include "kdst/rounding.hpp"
#include "kdst/serialization.hpp"
#include "kdst/simplex.hpp"
#include "kdst/util.hpp"
#include "kdst/verify.hpp"
