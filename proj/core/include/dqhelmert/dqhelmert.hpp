#pragma once

#include "dqhelmert/constrained.hpp"
#include "dqhelmert/errors.hpp"
#include "dqhelmert/jacobians.hpp"
#include "dqhelmert/linalg.hpp"
#include "dqhelmert/precision.hpp"
#include "dqhelmert/problem.hpp"
#include "dqhelmert/qa.hpp"
#include "dqhelmert/quaternion.hpp"
#include "dqhelmert/simplified.hpp"
#include "dqhelmert/solve_result.hpp"
