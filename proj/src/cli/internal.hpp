#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disco/cli.hpp"
#include "disco/relclass.hpp"
#include "json.hpp"

namespace disco::cli {

using Json = nlohmann::ordered_json;

// Parses a JSON config file; throws ValidationError.
Json load_config(const std::filesystem::path& path);

// Throws ValidationError unless `path` names a readable regular file.
void require_file(const std::filesystem::path& path, std::string_view what);

// manifest.json: tool and version, the command, the resolved config and its
// hash, and SHA-256 of every input and output file.
void write_manifest(
    const RunDirectory& dir, std::string_view command, const Json& config,
    const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
    const std::vector<std::string>& outputs);

struct VariantConfig {
  std::string name;
  std::filesystem::path corpus;
};

struct ExperimentConfig {
  std::filesystem::path source_corpus;
  std::string source_id = "source";
  std::filesystem::path eval_corpus;
  std::optional<std::filesystem::path> eval_translated_corpus;
  std::vector<VariantConfig> variants;
  std::vector<relclass::SetupKind> setups;
  bool coarsened_four_way = false;
  relclass::Hyperparams hyperparams;
  unsigned threads = 1;
  std::filesystem::path output_dir;

  // Relative paths are resolved against `base`.
  static ExperimentConfig from_json(const Json& j,
                                    const std::filesystem::path& base);
  // Canonical form for the manifest (output_dir excluded).
  Json to_json() const;
};

// Runs the set-up x variant matrix into a fresh run directory.
int run_experiment(const ExperimentConfig& config, bool force,
                   std::ostream& out, std::ostream& err);

}  // namespace disco::cli
