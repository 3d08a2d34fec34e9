#pragma once

#include "bellman_solver.hpp"
#include "dyadic_martingale.hpp"
#include "errors.hpp"
#include "majorant_oracle.hpp"
#include "rng.hpp"
#include "root_finding.hpp"
#include "special_functions.hpp"
#include "trajectories.hpp"
#include "verification.hpp"
