#pragma once

#include "uwit/criteria.hpp"
#include "uwit/eigen.hpp"
#include "uwit/error.hpp"
#include "uwit/experiments.hpp"
#include "uwit/matrix.hpp"
#include "uwit/sampling.hpp"
#include "uwit/state_io.hpp"
#include "uwit/states.hpp"
