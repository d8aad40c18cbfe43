#pragma once

// JSON-lines corpus files. Each line is a document record
//   {"kind":"doc","doc_id":...,"text":...[,"tokens":[[start,end],...]]}
// or a relation record
//   {"kind":"rel","rel_id":...,"doc_id":...,"arg1":[[s,e],...],
//    "arg2":[[s,e],...],"sense":"Top.Second"}
// Token ranges are character offsets, argument ranges token indices; both
// half-open. Documents precede their relations. The writer omits "tokens"
// when they equal the default tokenization, which makes its output the
// canonical form.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "disco/core.hpp"

namespace disco {

Corpus read_corpus(std::istream& in, const std::string& source_name);
Corpus read_corpus(const std::filesystem::path& path);

void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace disco
