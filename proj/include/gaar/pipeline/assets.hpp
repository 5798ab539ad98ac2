#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gaar/error.hpp"
#include "gaar/llm/template.hpp"
#include "gaar/pipeline/schemes.hpp"

#ifndef GAAR_DEFAULT_ASSET_DIR
#define GAAR_DEFAULT_ASSET_DIR "assets"
#endif

namespace gaar::pipeline {

// $GAAR_ASSET_DIR if set, else the source tree's assets/ directory.
inline std::filesystem::path default_asset_dir() {
  if (const char* env = std::getenv("GAAR_ASSET_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return GAAR_DEFAULT_ASSET_DIR;
}

// Prompt templates, criterion blocks and both scheme catalogs.
struct Assets {
  llm::PromptTemplate fallacy_detection;
  llm::PromptTemplate reconstruction;
  llm::PromptTemplate formalization;
  llm::PromptTemplate streamlining;
  llm::PromptTemplate faithfulness;
  llm::PromptTemplate pairwise;
  std::string criterion_accuracy;
  std::string criterion_completeness;
  std::string criterion_parsimony;
  SchemeCatalog general;
  SchemeCatalog specific;

  const SchemeCatalog& catalog(SchemeTheory t) const {
    return t == SchemeTheory::kGeneral ? general : specific;
  }

  const std::string& criterion_block(Criterion c) const {
    switch (c) {
      case Criterion::kAccuracy: return criterion_accuracy;
      case Criterion::kCompleteness: return criterion_completeness;
      case Criterion::kParsimony: return criterion_parsimony;
    }
    return criterion_accuracy;
  }

  static Assets load(const std::filesystem::path& dir) {
    auto prompt = [&](const char* name) {
      return llm::load_template(dir / "prompts" / (std::string(name) + ".txt"), name);
    };
    auto text = [&](const char* name) {
      std::ifstream in(dir / "prompts" / (std::string(name) + ".txt"));
      if (!in) throw Error("cannot read asset prompts/" + std::string(name) + ".txt");
      std::ostringstream buf;
      buf << in.rdbuf();
      return buf.str();
    };
    Assets a;
    a.fallacy_detection = prompt("fallacy_detection");
    a.reconstruction = prompt("reconstruction");
    a.formalization = prompt("formalization");
    a.streamlining = prompt("streamlining");
    a.faithfulness = prompt("faithfulness");
    a.pairwise = prompt("pairwise");
    a.criterion_accuracy = text("criterion_accuracy");
    a.criterion_completeness = text("criterion_completeness");
    a.criterion_parsimony = text("criterion_parsimony");
    a.general = load_catalog_from_assets(dir, SchemeTheory::kGeneral);
    a.specific = load_catalog_from_assets(dir, SchemeTheory::kSpecific);
    return a;
  }

  // Loaded once from default_asset_dir().
  static const Assets& defaults() {
    static const Assets a = load(default_asset_dir());
    return a;
  }
};

}  // namespace gaar::pipeline
