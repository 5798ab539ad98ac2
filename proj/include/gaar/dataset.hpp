#pragma once

#include "gaar/dataset/batch.hpp"
#include "gaar/dataset/record.hpp"
#include "gaar/dataset/split.hpp"
#include "gaar/dataset/stats.hpp"
