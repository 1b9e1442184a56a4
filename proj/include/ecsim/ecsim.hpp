#pragma once

#include "ecsim/types.hpp"
#include "ecsim/propagator.hpp"
#include "ecsim/cat_dynamics.hpp"
#include "ecsim/qubit_witness.hpp"
#include "ecsim/fock_oracle.hpp"
#include "ecsim/scenario.hpp"
#include "ecsim/validation.hpp"
