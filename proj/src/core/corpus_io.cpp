#include "disco/corpus_io.hpp"

#include <fstream>
#include <sstream>

#include "disco/error.hpp"
#include "json.hpp"

namespace disco {
namespace {

using Json = nlohmann::ordered_json;

ArgumentSpan span_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("argument must be an array");
  std::vector<TokenRange> segments;
  for (const auto& seg : j) {
    if (!seg.is_array() || seg.size() != 2 || !seg[0].is_number_unsigned() ||
        !seg[1].is_number_unsigned()) {
      throw ValidationError("argument segment must be [start, end]");
    }
    segments.push_back({seg[0].get<std::size_t>(), seg[1].get<std::size_t>()});
  }
  return ArgumentSpan(std::move(segments));
}

Json span_to_json(const ArgumentSpan& span) {
  Json out = Json::array();
  for (const auto& s : span.segments()) out.push_back({s.begin, s.end});
  return out;
}

const std::string& require_string(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ValidationError(std::string("missing string field '") + key + "'");
  }
  return it->get_ref<const std::string&>();
}

Document document_from_json(const Json& j) {
  std::string doc_id = require_string(j, "doc_id");
  std::string text = require_string(j, "text");
  const auto it = j.find("tokens");
  if (it == j.end()) return Document(std::move(doc_id), std::move(text));
  if (!it->is_array()) throw ValidationError("'tokens' must be an array");
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& r : *it) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_unsigned() ||
        !r[1].is_number_unsigned()) {
      throw ValidationError("token range must be [start, end]");
    }
    ranges.emplace_back(r[0].get<std::size_t>(), r[1].get<std::size_t>());
  }
  return Document(std::move(doc_id), std::move(text), ranges);
}

Relation relation_from_json(const Json& j) {
  if (const auto it = j.find("rel_type");
      it != j.end() && *it != Json(Relation::kType)) {
    throw ValidationError("only implicit relations are supported");
  }
  Relation rel;
  rel.rel_id = require_string(j, "rel_id");
  rel.doc_id = require_string(j, "doc_id");
  if (!j.contains("arg1") || !j.contains("arg2")) {
    throw ValidationError("relation needs 'arg1' and 'arg2'");
  }
  rel.arg1 = span_from_json(j.at("arg1"));
  rel.arg2 = span_from_json(j.at("arg2"));
  rel.sense = parse_sense_lenient(require_string(j, "sense"));
  return rel;
}

}  // namespace

Corpus read_corpus(std::istream& in, const std::string& source_name) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      const std::string& kind = require_string(j, "kind");
      if (kind == "doc") {
        corpus.add_document(document_from_json(j));
      } else if (kind == "rel") {
        corpus.add_relation(relation_from_json(j));
      } else {
        throw ValidationError("unknown record kind '" + kind + "'");
      }
    } catch (const Json::exception& e) {
      throw FormatError(source_name, line_no, e.what());
    } catch (const FormatError&) {
      throw;
    } catch (const ValidationError& e) {
      throw FormatError(source_name, line_no, e.what());
    }
  }
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open corpus '" + path.string() + "'");
  return read_corpus(in, path.string());
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  // All documents first, then relations: every relation follows its document.
  for (const Document& doc : corpus.documents()) {
    Json j;
    j["kind"] = "doc";
    j["doc_id"] = doc.doc_id();
    j["text"] = doc.text();
    if (!doc.has_default_tokens()) {
      Json tokens = Json::array();
      for (const Token& t : doc.tokens()) {
        tokens.push_back({t.char_start, t.char_end});
      }
      j["tokens"] = std::move(tokens);
    }
    out << j.dump() << '\n';
  }
  for (const Relation& rel : corpus.relations()) {
    Json j;
    j["kind"] = "rel";
    j["rel_id"] = rel.rel_id;
    j["doc_id"] = rel.doc_id;
    j["arg1"] = span_to_json(rel.arg1);
    j["arg2"] = span_to_json(rel.arg2);
    j["sense"] = rel.sense.to_string();
    out << j.dump() << '\n';
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_corpus(corpus, out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace disco
