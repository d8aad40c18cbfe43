#include <charconv>
#include <fstream>
#include <sstream>

#include "disco/aligner.hpp"
#include "disco/error.hpp"

namespace disco::align {
namespace {

bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

AlignmentSet parse_pharaoh(std::string_view line, std::string pair_id) {
  AlignmentSet out{std::move(pair_id), {}};
  std::size_t pos = 0;
  std::size_t token_no = 0;
  while (true) {
    pos = line.find_first_not_of(" \t\r", pos);
    if (pos == std::string_view::npos) break;
    const std::size_t end = std::min(line.find_first_of(" \t\r", pos), line.size());
    const std::string_view token = line.substr(pos, end - pos);
    ++token_no;
    const std::size_t dash = token.find('-');
    std::size_t src = 0;
    std::size_t tgt = 0;
    if (dash == std::string_view::npos || !parse_index(token.substr(0, dash), src) ||
        !parse_index(token.substr(dash + 1), tgt)) {
      throw ValidationError("malformed alignment pair '" + std::string(token) +
                            "' at token " + std::to_string(token_no));
    }
    out.links.insert({src, tgt});
    pos = end;
  }
  return out;
}

std::string format_pharaoh(const AlignmentSet& set) {
  std::string out;
  for (const auto& l : set.links) {
    if (!out.empty()) out += ' ';
    out += std::to_string(l.src);
    out += '-';
    out += std::to_string(l.tgt);
  }
  return out;
}

std::vector<AlignmentSet> load_external_alignments(
    std::istream& in, const std::string& source_name,
    std::span<const PairShape> expected_pairs) {
  const auto lines = read_lines(in);
  if (lines.size() != expected_pairs.size()) {
    throw ValidationError(source_name + ": expected " +
                          std::to_string(expected_pairs.size()) + ", got " +
                          std::to_string(lines.size()) + " alignment lines");
  }
  std::vector<AlignmentSet> out;
  out.reserve(lines.size());
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const PairShape& shape = expected_pairs[n];
    AlignmentSet set;
    try {
      set = parse_pharaoh(lines[n], shape.pair_id);
    } catch (const ValidationError& e) {
      throw FormatError(source_name, n + 1, e.what());
    }
    for (const auto& l : set.links) {
      if (l.src >= shape.source_size || l.tgt >= shape.target_size) {
        throw FormatError(
            source_name, n + 1,
            "link " + std::to_string(l.src) + "-" + std::to_string(l.tgt) +
                " out of bounds for '" + shape.pair_id + "' (" +
                std::to_string(shape.source_size) + " source, " +
                std::to_string(shape.target_size) + " target tokens)");
      }
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<AlignmentSet> load_external_alignments(
    const std::filesystem::path& path,
    std::span<const PairShape> expected_pairs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open alignments '" + path.string() + "'");
  return load_external_alignments(in, path.string(), expected_pairs);
}

std::vector<AlignmentSet> read_pharaoh_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open alignments '" + path.string() + "'");
  const auto lines = read_lines(in);
  std::vector<AlignmentSet> out;
  out.reserve(lines.size());
  for (std::size_t n = 0; n < lines.size(); ++n) {
    try {
      out.push_back(parse_pharaoh(lines[n], std::to_string(n)));
    } catch (const ValidationError& e) {
      throw FormatError(path.string(), n + 1, e.what());
    }
  }
  return out;
}

void write_pharaoh_file(std::span<const AlignmentSet> sets,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const auto& s : sets) out << format_pharaoh(s) << '\n';
}

}  // namespace disco::align
