#pragma once

#include "gaar/solver/ground.hpp"
#include "gaar/solver/problem_file.hpp"
#include "gaar/solver/sat.hpp"
#include "gaar/solver/validity.hpp"
