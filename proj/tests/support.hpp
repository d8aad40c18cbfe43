#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "disco/core.hpp"

namespace disco::testing {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("disco-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Random UTF-8 text mixing ASCII, accented Latin, CJK, punctuation and
// assorted whitespace.
inline std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  static const char* kPieces[] = {
      "a", "b", "z", "Q", "7", "é", "ñ", "ọ", "ẹ", "日", "本", "語",
      ".", ",", "!", "?", "'", "\"", "(", ")", "-", "…", "。", "、", "«", "»",
      " ", " ", "  ", "\t", "\n", "\xc2\xa0", "\xe3\x80\x80"};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kPieces) - 1);
  std::string s;
  for (std::size_t n = len(rng); n > 0; --n) s += kPieces[pick(rng)];
  return s;
}

}  // namespace disco::testing
