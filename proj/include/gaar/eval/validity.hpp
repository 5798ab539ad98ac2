#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/log.hpp"
#include "gaar/pipeline/engine.hpp"
#include "gaar/pipeline/types.hpp"
#include "gaar/solver/validity.hpp"

namespace gaar::eval {

// Percentage of formalizations whose premises entail their conclusion. An
// empty optional (no usable formalization) and solver errors count as
// invalid.
inline double validity_rate(std::span<const std::optional<pipeline::Formalization>> items) {
  if (items.empty()) throw NotEnoughData("validity rate of an empty set");
  std::size_t valid = 0;
  for (const auto& f : items) {
    if (!f) continue;
    try {
      if (solver::check_validity(f->premises, f->conclusion).valid()) ++valid;
    } catch (const solver::SolverError& e) {
      log::warn(std::string("counted as invalid: ") + e.what());
    }
  }
  return 100.0 * static_cast<double>(valid) / static_cast<double>(items.size());
}

// For reconstructions produced outside the engine: one Stage-3 call each,
// then the solver.
inline double validity_rate(const std::vector<pipeline::Reconstruction>& recons,
                            const pipeline::StageContext& ctx) {
  std::vector<std::optional<pipeline::Formalization>> formal;
  for (const auto& r : recons) {
    pipeline::StageRecord record;
    try {
      formal.push_back(pipeline::formalize(ctx, r, record));
    } catch (const pipeline::UnparseableResponse& e) {
      log::warn(std::string("counted as invalid: ") + e.what());
      formal.push_back(std::nullopt);
    }
  }
  return validity_rate(formal);
}

}  // namespace gaar::eval
