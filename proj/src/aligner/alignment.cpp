#include <cmath>
#include <fstream>

#include "disco/aligner.hpp"
#include "disco/error.hpp"
#include "disco/util/parallel.hpp"
#include "json.hpp"

namespace disco::align {

AlignmentSet AlignmentSet::transposed() const {
  AlignmentSet out{pair_id, {}};
  for (const auto& l : links) out.links.insert({l.tgt, l.src});
  return out;
}

double TranslationTable::prob(std::string_view src, std::string_view tgt) const {
  const auto row = rows_.find(src);
  if (row == rows_.end()) return 0.0;
  const auto it = row->second.find(tgt);
  return it == row->second.end() ? 0.0 : it->second;
}

void TranslationTable::set(const std::string& src, const std::string& tgt,
                           double p) {
  rows_[src][tgt] = p;
}

bool TranslationTable::has_null() const { return rows_.count(kNullWord) > 0; }

void TranslationTable::check_stochastic(double tolerance) const {
  for (const auto& [src, row] : rows_) {
    util::CompensatedSum total;
    for (const auto& [tgt, p] : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("t(" + tgt + "|" + src + ") = " +
                              std::to_string(p) + " is not a probability");
      }
      total.add(p);
    }
    if (std::abs(total.value() - 1.0) > tolerance) {
      throw ValidationError("row '" + src + "' sums to " +
                            std::to_string(total.value()));
    }
  }
}

void write_table(const TranslationTable& table, std::ostream& out) {
  for (const auto& [src, row] : table.rows()) {
    for (const auto& [tgt, p] : row) {
      nlohmann::ordered_json j;
      j["src"] = src;
      j["tgt"] = tgt;
      j["p"] = p;
      out << j.dump() << '\n';
    }
  }
}

void write_table(const TranslationTable& table,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_table(table, out);
}

TranslationTable read_table(std::istream& in, const std::string& source_name) {
  TranslationTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      table.set(j.at("src").get<std::string>(), j.at("tgt").get<std::string>(),
                j.at("p").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(source_name, line_no, e.what());
    }
  }
  return table;
}

TranslationTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open table '" + path.string() + "'");
  return read_table(in, path.string());
}

}  // namespace disco::align
