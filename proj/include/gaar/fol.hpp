#pragma once

#include "gaar/fol/formula.hpp"
#include "gaar/fol/keys.hpp"
#include "gaar/fol/parser.hpp"
#include "gaar/fol/render.hpp"
#include "gaar/fol/signature.hpp"
