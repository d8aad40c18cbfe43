#include <algorithm>

#include "disco/core.hpp"
#include "disco/error.hpp"

namespace disco {

ArgumentSpan::ArgumentSpan(std::vector<TokenRange> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw ValidationError("argument span has no segments");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].begin >= segments_[i].end) {
      throw ValidationError("argument segment " + std::to_string(i) +
                            " is empty");
    }
    if (i > 0 && segments_[i].begin <= segments_[i - 1].end) {
      throw ValidationError("argument segment " + std::to_string(i) +
                            " is not separated from its predecessor");
    }
  }
}

ArgumentSpan ArgumentSpan::from_tokens(const std::set<std::size_t>& tokens) {
  ArgumentSpan span;
  for (const std::size_t t : tokens) {
    if (!span.segments_.empty() && span.segments_.back().end == t) {
      ++span.segments_.back().end;
    } else {
      span.segments_.push_back({t, t + 1});
    }
  }
  return span;
}

std::size_t ArgumentSpan::token_count() const {
  std::size_t n = 0;
  for (const auto& s : segments_) n += s.size();
  return n;
}

bool ArgumentSpan::contains(std::size_t token) const {
  return std::any_of(segments_.begin(), segments_.end(), [&](const auto& s) {
    return token >= s.begin && token < s.end;
  });
}

std::vector<std::size_t> ArgumentSpan::token_indices() const {
  std::vector<std::size_t> out;
  out.reserve(token_count());
  for (const auto& s : segments_) {
    for (std::size_t t = s.begin; t < s.end; ++t) out.push_back(t);
  }
  return out;
}

ArgumentSpan ArgumentSpan::shifted(std::ptrdiff_t delta) const {
  ArgumentSpan out = *this;
  for (auto& s : out.segments_) {
    if (delta < 0 && s.begin < static_cast<std::size_t>(-delta)) {
      throw ValidationError("shifted span would start before token 0");
    }
    s.begin = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.begin) + delta);
    s.end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.end) + delta);
  }
  return out;
}

void validate_relation(const Relation& rel, const Document& doc) {
  if (rel.doc_id != doc.doc_id()) {
    throw ValidationError("relation '" + rel.rel_id + "' references '" +
                          rel.doc_id + "', not '" + doc.doc_id() + "'");
  }
  const auto check = [&](const ArgumentSpan& span, const char* name) {
    if (span.empty()) {
      throw ValidationError("relation '" + rel.rel_id + "' has empty " + name);
    }
    if (span.last() > doc.size()) {
      throw ValidationError("relation '" + rel.rel_id + "' " + name +
                            " exceeds document '" + doc.doc_id() + "' (" +
                            std::to_string(doc.size()) + " tokens)");
    }
  };
  check(rel.arg1, "arg1");
  check(rel.arg2, "arg2");
  for (const std::size_t t : rel.arg1.token_indices()) {
    if (rel.arg2.contains(t)) {
      throw ValidationError("relation '" + rel.rel_id +
                            "' arguments share token " + std::to_string(t));
    }
  }
}

void Corpus::add_document(Document doc) {
  if (index_.count(doc.doc_id())) {
    throw ValidationError("duplicate document '" + doc.doc_id() + "'");
  }
  index_.emplace(doc.doc_id(), documents_.size());
  documents_.push_back(std::move(doc));
}

void Corpus::add_relation(Relation rel) {
  const Document* doc = find_document(rel.doc_id);
  if (!doc) {
    throw ValidationError("relation '" + rel.rel_id +
                          "' references unknown document '" + rel.doc_id + "'");
  }
  validate_relation(rel, *doc);
  relations_.push_back(std::move(rel));
}

const Document* Corpus::find_document(std::string_view doc_id) const {
  const auto it = index_.find(std::string(doc_id));
  return it == index_.end() ? nullptr : &documents_[it->second];
}

const Document& Corpus::document(std::string_view doc_id) const {
  if (const Document* doc = find_document(doc_id)) return *doc;
  throw ValidationError("unknown document '" + std::string(doc_id) + "'");
}

std::vector<std::string> span_surfaces(const ArgumentSpan& span,
                                       const Document& doc) {
  std::vector<std::string> out;
  out.reserve(span.token_count());
  for (const std::size_t t : span.token_indices()) {
    out.push_back(doc.tokens().at(t).surface);
  }
  return out;
}

}  // namespace disco
