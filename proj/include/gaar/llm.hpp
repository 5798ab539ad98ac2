#pragma once

#include "gaar/llm/backend.hpp"
#include "gaar/llm/live_backend.hpp"
#include "gaar/llm/pairwise.hpp"
#include "gaar/llm/parsers.hpp"
#include "gaar/llm/sections.hpp"
#include "gaar/llm/template.hpp"
