#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/pipeline/types.hpp"
#include "json.hpp"

namespace gaar::pipeline {

struct SchemeSubtype {
  std::string id;
  std::string name;
};

struct ArgumentScheme {
  SchemeTheory theory = SchemeTheory::kGeneral;
  std::string id;
  std::string name;
  std::string description;  // may be empty for specific schemes
  std::string template_text;
  std::vector<SchemeSubtype> subtypes;
};

struct SchemeCatalog {
  SchemeTheory theory = SchemeTheory::kGeneral;
  std::vector<ArgumentScheme> schemes;
};

inline constexpr std::size_t kGeneralSchemeCount = 4;
inline constexpr std::size_t kSpecificSchemeCount = 60;

inline std::string_view to_string(SchemeTheory t) {
  return t == SchemeTheory::kGeneral ? "general" : "specific";
}

inline SchemeCatalog load_scheme_catalog(const std::filesystem::path& path,
                                         SchemeTheory theory) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read scheme catalog " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed scheme catalog " + path.string() + ": " + e.what());
  }
  SchemeCatalog catalog{theory, {}};
  for (const auto& e : j) {
    ArgumentScheme s;
    s.theory = theory;
    s.id = e.at("id").get<std::string>();
    s.name = e.at("name").get<std::string>();
    s.description = e.value("description", std::string{});
    s.template_text = e.at("template").get<std::string>();
    for (const auto& sub : e.value("subtypes", nlohmann::json::array())) {
      s.subtypes.push_back({sub.at("id").get<std::string>(), sub.at("name").get<std::string>()});
    }
    catalog.schemes.push_back(std::move(s));
  }
  const std::size_t want =
      theory == SchemeTheory::kGeneral ? kGeneralSchemeCount : kSpecificSchemeCount;
  if (catalog.schemes.size() != want) {
    throw Error("scheme catalog " + path.string() + " has " +
                std::to_string(catalog.schemes.size()) + " entries, expected " +
                std::to_string(want));
  }
  return catalog;
}

// <asset_dir>/schemes/{general,specific}.json
inline SchemeCatalog load_catalog_from_assets(const std::filesystem::path& asset_dir,
                                              SchemeTheory theory) {
  return load_scheme_catalog(
      asset_dir / "schemes" / (std::string(to_string(theory)) + ".json"), theory);
}

// The catalog block of the reconstruction prompt: the list of argument
// types followed by a reconstruction pattern for each.
inline std::string render_scheme_instruction(const SchemeCatalog& catalog) {
  std::string out = "\n## Argument Types\n";
  for (std::size_t i = 0; i < catalog.schemes.size(); ++i) {
    const auto& s = catalog.schemes[i];
    out += std::to_string(i + 1) + ". " + s.name;
    if (!s.description.empty()) out += ": " + s.description;
    out += "\n";
    for (const auto& sub : s.subtypes) out += "   - " + sub.name + "\n";
  }
  out += "\n## Reconstruction Guidelines Based on Argument Types\n";
  for (std::size_t i = 0; i < catalog.schemes.size(); ++i) {
    const auto& s = catalog.schemes[i];
    out += std::to_string(i + 1) + ". " + s.name + "\n" + s.template_text + "\n\n";
  }
  return out;
}

}  // namespace gaar::pipeline
