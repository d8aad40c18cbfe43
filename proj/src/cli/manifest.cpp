#include <unistd.h>

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>

#include "disco/error.hpp"
#include "internal.hpp"

namespace disco::cli {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 initialization failed");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t n) {
    EVP_DigestUpdate(ctx_, data, n);
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 0xF];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path.string() + "'");
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

RunDirectory::RunDirectory(std::filesystem::path final_dir, bool force)
    : final_(std::move(final_dir)), force_(force) {
  if (final_.empty()) throw ValidationError("output directory is required");
  if (std::filesystem::exists(final_) && !force_) {
    throw ValidationError("output directory '" + final_.string() +
                          "' already exists (use --force to replace it)");
  }
  const auto parent = final_.has_parent_path() ? final_.parent_path()
                                               : std::filesystem::path(".");
  std::filesystem::create_directories(parent);
  staging_ = parent / ("." + final_.filename().string() + ".tmp-" +
                       std::to_string(::getpid()));
  std::filesystem::remove_all(staging_);
  std::filesystem::create_directory(staging_);
}

RunDirectory::~RunDirectory() {
  if (!committed_) {
    std::error_code ec;
    std::filesystem::remove_all(staging_, ec);
  }
}

void RunDirectory::commit() {
  if (force_) std::filesystem::remove_all(final_);
  std::filesystem::rename(staging_, final_);
  committed_ = true;
}

Json load_config(const std::filesystem::path& path) {
  require_file(path, "config");
  std::ifstream in(path, std::ios::binary);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("malformed config '" + path.string() + "': " + e.what());
  }
}

void require_file(const std::filesystem::path& path, std::string_view what) {
  if (path.empty()) throw ValidationError(std::string(what) + " path is required");
  if (!std::filesystem::is_regular_file(path)) {
    throw ValidationError(std::string(what) + " '" + path.string() +
                          "' does not exist");
  }
}

void write_manifest(
    const RunDirectory& dir, std::string_view command, const Json& config,
    const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
    const std::vector<std::string>& outputs) {
  Json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config;
  m["config_sha256"] = sha256_hex(config.dump());
  Json in = Json::object();
  for (const auto& [name, path] : inputs) {
    in[name] = {{"path", path.generic_string()}, {"sha256", sha256_file(path)}};
  }
  m["inputs"] = std::move(in);
  std::vector<std::string> sorted = outputs;
  std::sort(sorted.begin(), sorted.end());
  Json out = Json::object();
  for (const auto& name : sorted) out[name] = sha256_file(dir.file(name));
  m["outputs"] = std::move(out);
  std::ofstream f(dir.file("manifest.json"), std::ios::binary);
  f << m.dump(2) << '\n';
}

}  // namespace disco::cli
