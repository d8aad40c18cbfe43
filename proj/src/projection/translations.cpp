#include <fstream>

#include "disco/projection.hpp"
#include "json.hpp"

namespace disco::projection {
namespace {

Field parse_field(const std::string& name) {
  if (name == "relation") return Field::kRelation;
  if (name == "arg1") return Field::kArg1;
  if (name == "arg2") return Field::kArg2;
  throw ValidationError("unknown translation field '" + name + "'");
}

}  // namespace

std::string_view to_string(Field field) {
  switch (field) {
    case Field::kRelation:
      return "relation";
    case Field::kArg1:
      return "arg1";
    case Field::kArg2:
      return "arg2";
  }
  return "unknown";
}

void TranslationStore::add(const std::string& rel_id, Field field,
                           std::string text) {
  auto key = std::make_pair(rel_id, field);
  if (texts_.count(key)) {
    throw ValidationError("duplicate translation for '" + rel_id + "' (" +
                          std::string(to_string(field)) + ")");
  }
  texts_.emplace(key, std::move(text));
  order_.push_back(std::move(key));
}

const std::string* TranslationStore::find(const std::string& rel_id,
                                          Field field) const {
  const auto it = texts_.find({rel_id, field});
  return it == texts_.end() ? nullptr : &it->second;
}

void TranslationStore::write(std::ostream& out) const {
  for (const auto& key : order_) {
    nlohmann::ordered_json j;
    j["rel_id"] = key.first;
    j["field"] = to_string(key.second);
    j["text"] = texts_.at(key);
    out << j.dump() << '\n';
  }
}

TranslationStore read_translations(std::istream& in,
                                   const std::string& source_name) {
  TranslationStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      store.add(j.at("rel_id").get<std::string>(),
                parse_field(j.at("field").get<std::string>()),
                j.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(source_name, line_no, e.what());
    } catch (const FormatError&) {
      throw;
    } catch (const ValidationError& e) {
      throw FormatError(source_name, line_no, e.what());
    }
  }
  return store;
}

TranslationStore read_translations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open translations '" + path.string() + "'");
  }
  return read_translations(in, path.string());
}

}  // namespace disco::projection
