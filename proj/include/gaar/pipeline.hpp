#pragma once

#include "gaar/pipeline/assets.hpp"
#include "gaar/pipeline/engine.hpp"
#include "gaar/pipeline/schemes.hpp"
#include "gaar/pipeline/trace.hpp"
#include "gaar/pipeline/types.hpp"
