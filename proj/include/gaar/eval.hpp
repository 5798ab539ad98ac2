#pragma once

#include "gaar/eval/bradley_terry.hpp"
#include "gaar/eval/match.hpp"
#include "gaar/eval/schedule.hpp"
#include "gaar/eval/topsis.hpp"
#include "gaar/eval/validity.hpp"
