#pragma once

// Domain types shared by every stage of the pipeline: tokenized documents,
// (possibly discontinuous) argument spans, the two-level sense hierarchy and
// implicit relations. All offsets are Unicode code point offsets into the
// document text; all span indices are token indices.

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace disco {

struct Token {
  std::string surface;
  std::size_t char_start = 0;  // inclusive
  std::size_t char_end = 0;    // exclusive

  bool operator==(const Token&) const = default;
};

// Splits on Unicode whitespace; every maximal run of punctuation becomes its
// own token. Throws ValidationError on malformed UTF-8.
std::vector<Token> tokenize(std::string_view text);

// Number of code points in a UTF-8 string. Throws on malformed input.
std::size_t utf8_length(std::string_view text);

class Document {
 public:
  Document() = default;
  // Tokens are computed with tokenize().
  Document(std::string doc_id, std::string text);
  // Tokens given as [char_start, char_end) ranges; surfaces are sliced from
  // the text. Ranges must be non-empty, ordered and non-overlapping.
  Document(std::string doc_id, std::string text,
           std::span<const std::pair<std::size_t, std::size_t>> char_ranges);

  const std::string& doc_id() const { return doc_id_; }
  const std::string& text() const { return text_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  std::size_t char_length() const { return byte_offset_.size() - 1; }

  // Text between two code point offsets.
  std::string_view slice(std::size_t char_start, std::size_t char_end) const;

  // Document covering tokens [begin, end), with offsets rebased so the first
  // token starts at character 0. The original token boundaries are kept.
  Document sub_document(std::string doc_id, std::size_t begin,
                        std::size_t end) const;

  // True when the tokens are exactly what tokenize(text) would produce.
  bool has_default_tokens() const;

  bool operator==(const Document& other) const {
    return doc_id_ == other.doc_id_ && text_ == other.text_ &&
           tokens_ == other.tokens_;
  }

 private:
  void index_text();

  std::string doc_id_;
  std::string text_;
  std::vector<Token> tokens_;
  std::vector<std::size_t> byte_offset_{0};  // code point -> byte, size n+1
};

// Half-open token index range.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const TokenRange&) const = default;
};

// One or more token ranges. Segments are non-empty, strictly increasing and
// separated by at least one token, so the representation of a token set is
// unique.
class ArgumentSpan {
 public:
  ArgumentSpan() = default;
  // Throws ValidationError if the segments break the invariants.
  explicit ArgumentSpan(std::vector<TokenRange> segments);
  ArgumentSpan(std::size_t begin, std::size_t end)
      : ArgumentSpan(std::vector<TokenRange>{{begin, end}}) {}

  // Merges a token index set into maximal contiguous segments. An empty set
  // yields an empty span (which is not a valid argument).
  static ArgumentSpan from_tokens(const std::set<std::size_t>& tokens);

  const std::vector<TokenRange>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  bool is_discontinuous() const { return segments_.size() >= 2; }
  std::size_t token_count() const;
  std::size_t first() const { return segments_.front().begin; }
  std::size_t last() const { return segments_.back().end; }  // exclusive
  bool contains(std::size_t token) const;
  std::vector<std::size_t> token_indices() const;

  ArgumentSpan shifted(std::ptrdiff_t delta) const;

  bool operator==(const ArgumentSpan&) const = default;

 private:
  std::vector<TokenRange> segments_;
};

enum class TopSense { kTemporal, kContingency, kComparison, kExpansion };

enum class SecondSense {
  kAsynchronous,
  kSynchronous,
  kCause,
  kJustification,
  kConcession,
  kContrast,
  kAlternative,
  kConjunction,
  kInstantiation,
  kList,
  kRestatement,
};

std::string_view to_string(TopSense sense);
std::string_view to_string(SecondSense sense);
TopSense parent_of(SecondSense sense);

// Classification granularity: 4 top-level classes or 11 second-level ones.
enum class Level { kTop = 4, kSecond = 11 };

Level level_from_int(int level);

// Label names of a level in canonical order. The 11-way order follows the
// usual confusion-table layout (Comparison, Contingency, Expansion,
// Temporal children); the 4-way order is alphabetical.
const std::vector<std::string>& label_space(Level level);

class SenseLabel {
 public:
  explicit SenseLabel(TopSense top) : top_(top) {}
  explicit SenseLabel(SecondSense second)
      : top_(parent_of(second)), second_(second) {}
  // Throws ValidationError if `second` is not a child of `top`.
  SenseLabel(TopSense top, SecondSense second);

  TopSense top() const { return top_; }
  const std::optional<SecondSense>& second() const { return second_; }

  // "Top" or "Top.Second".
  std::string to_string() const;
  // Name at the given level, or nullopt for a top-only label at 11-way.
  std::optional<std::string> label_at(Level level) const;

  bool operator==(const SenseLabel&) const = default;

 private:
  TopSense top_;
  std::optional<SecondSense> second_;
};

// Accepts exactly "Top" or "Top.Second" over the known hierarchy.
SenseLabel parse_sense(std::string_view label);

// Like parse_sense, but also maps the PDTB2 name "Pragmatic cause" onto
// Justification. Used by the corpus reader.
SenseLabel parse_sense_lenient(std::string_view label);

// SenseLabel for a level label name as found in label_space().
SenseLabel sense_from_level_label(std::string_view name, Level level);

TopSense coarsen(const SenseLabel& sense);

struct Relation {
  std::string rel_id;
  std::string doc_id;
  ArgumentSpan arg1;
  ArgumentSpan arg2;
  SenseLabel sense{TopSense::kExpansion};

  static constexpr std::string_view kType = "implicit";

  bool operator==(const Relation&) const = default;
};

// Documents in insertion order plus relations over them. Additions are
// validated; a Corpus is otherwise a plain value.
class Corpus {
 public:
  // Throws ValidationError on duplicate doc_id.
  void add_document(Document doc);
  // Throws ValidationError on dangling doc_id, out-of-bounds or empty spans,
  // or overlapping arguments.
  void add_relation(Relation rel);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<Relation>& relations() const { return relations_; }
  const Document* find_document(std::string_view doc_id) const;
  const Document& document(std::string_view doc_id) const;
  const Document& document_of(const Relation& rel) const {
    return document(rel.doc_id);
  }

  bool operator==(const Corpus& other) const {
    return documents_ == other.documents_ && relations_ == other.relations_;
  }

 private:
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Relation> relations_;
};

// Checks a relation against a document; throws ValidationError.
void validate_relation(const Relation& rel, const Document& doc);

// Surfaces of the tokens covered by a span, in order.
std::vector<std::string> span_surfaces(const ArgumentSpan& span,
                                       const Document& doc);

}  // namespace disco
