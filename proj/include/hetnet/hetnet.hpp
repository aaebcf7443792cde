#pragma once

// Umbrella header for the two-tier network market solver library.

#include "hetnet/core_model.hpp"
#include "hetnet/csv.hpp"
#include "hetnet/duopoly.hpp"
#include "hetnet/investment_game.hpp"
#include "hetnet/monopoly.hpp"
#include "hetnet/numerics.hpp"
#include "hetnet/oracle.hpp"
#include "hetnet/parallel.hpp"
#include "hetnet/welfare.hpp"
