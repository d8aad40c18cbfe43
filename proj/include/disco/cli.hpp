#pragma once

// Command-line front end. Exit codes: 0 success, 1 runtime failure (including
// failed experiment cells), 2 validation failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "disco/core.hpp"
#include "disco/relclass.hpp"

namespace disco::cli {

inline constexpr std::string_view kToolName = "disco_project";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Hex SHA-256 of a file's bytes or of a string.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view data);

// A run directory written under a temporary name and renamed into place on
// commit, so a run either leaves a complete directory or none.
class RunDirectory {
 public:
  // Throws ValidationError if `final_dir` exists and `force` is false.
  RunDirectory(std::filesystem::path final_dir, bool force);
  ~RunDirectory();
  RunDirectory(const RunDirectory&) = delete;
  RunDirectory& operator=(const RunDirectory&) = delete;

  const std::filesystem::path& path() const { return staging_; }
  std::filesystem::path file(const std::string& name) const {
    return staging_ / name;
  }
  void commit();

 private:
  std::filesystem::path final_;
  std::filesystem::path staging_;
  bool force_;
  bool committed_ = false;
};

struct ExperimentRow {
  std::string setup;
  std::string variant;
  bool ok = true;
  std::string status = "ok";
  // Index 0: 4-way, index 1: 11-way.
  double f1[2] = {0.0, 0.0};
  double accuracy[2] = {0.0, 0.0};
  std::uint64_t evaluated[2] = {0, 0};
  std::string four_way_source = "separate";
};

struct Improvement {
  Level level = Level::kTop;
  double baseline = 0.0;
  double best = 0.0;
  std::string best_cell;  // "setup/variant"
  double relative = 0.0;  // (best - baseline) / baseline

  std::string to_string() const;
};

// Per level: best f1 over the non-baseline rows against the en_on_target
// row. Levels without a baseline or a positive baseline are omitted.
std::vector<Improvement> relative_improvements(
    const std::vector<ExperimentRow>& rows);

std::string experiment_csv(const std::vector<ExperimentRow>& rows);

}  // namespace disco::cli
