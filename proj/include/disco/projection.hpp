#pragma once

// Annotation projection: carries source-language implicit relations onto
// target-language text, either by translating the whole relation and
// recovering the arguments through word alignment (relation-based, RB), or
// by translating each argument on its own (argument-based, AB), where only
// discontinuous arguments need alignment.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "disco/aligner.hpp"
#include "disco/core.hpp"
#include "disco/error.hpp"

namespace disco::projection {

enum class Method { kRelationBased, kArgumentBased };

Method parse_method(std::string_view name);  // "rb" | "ab"
std::string_view to_string(Method method);

enum class DropReason {
  kUnalignedArg1,
  kUnalignedArg2,
  kOverlappingArgs,
  kMissingTranslation,
};

inline constexpr std::array<DropReason, 4> kAllDropReasons{
    DropReason::kUnalignedArg1, DropReason::kUnalignedArg2,
    DropReason::kOverlappingArgs, DropReason::kMissingTranslation};

std::string_view to_string(DropReason reason);

struct ParallelUnit {
  std::string unit_id;
  Document src_doc;
  Document tgt_doc;
  align::AlignmentSet alignment;
};

// Throws ValidationError if a link falls outside either document.
void validate_unit(const ParallelUnit& unit);

struct ProjectedRelation {
  Relation relation;  // over `document`
  Document document;

  bool operator==(const ProjectedRelation&) const = default;
};

class ProjectionOutcome {
 public:
  static ProjectionOutcome projected(Relation rel, Document doc) {
    return ProjectionOutcome(ProjectedRelation{std::move(rel), std::move(doc)});
  }
  static ProjectionOutcome dropped(DropReason reason) {
    return ProjectionOutcome(reason);
  }

  bool is_projected() const {
    return std::holds_alternative<ProjectedRelation>(value_);
  }
  const ProjectedRelation& result() const {
    return std::get<ProjectedRelation>(value_);
  }
  DropReason reason() const { return std::get<DropReason>(value_); }

 private:
  explicit ProjectionOutcome(std::variant<ProjectedRelation, DropReason> v)
      : value_(std::move(v)) {}

  std::variant<ProjectedRelation, DropReason> value_;
};

struct LossReport {
  std::size_t input_count = 0;
  std::size_t projected_count = 0;
  std::map<DropReason, std::size_t> dropped;  // every reason present

  LossReport();
  void record(const ProjectionOutcome& outcome);
  std::size_t dropped_total() const;
  bool reconciles() const {
    return input_count == projected_count + dropped_total();
  }
  // JSON object with a fixed key order.
  std::string to_json() const;

  bool operator==(const LossReport&) const = default;
};

// Image of the span's tokens under the alignment, merged into maximal
// contiguous segments. Empty when no span token is linked.
ArgumentSpan project_span(const ArgumentSpan& span,
                          const align::AlignmentSet& alignment);

// `rel` must be valid over unit.src_doc. The projected relation lives on
// unit.tgt_doc. When the projected arguments overlap, the larger one gives
// up the shared tokens (arg2 on a tie).
ProjectionOutcome project_relation_rb(const Relation& rel,
                                      const ParallelUnit& unit);

struct ArgumentTranslations {
  std::optional<std::string> arg1;
  std::optional<std::string> arg2;
};

// Cover-span units for the discontinuous arguments of one relation. A unit's
// source document spans the argument's first to last token.
struct CoverUnits {
  const ParallelUnit* arg1 = nullptr;
  const ParallelUnit* arg2 = nullptr;
};

// Builds a target document "<arg1 text>\n<arg2 text>". Continuous arguments
// cover their whole translation; a discontinuous argument keeps the image of
// its own tokens minus the image of the gap tokens inside its cover.
ProjectionOutcome project_relation_ab(const Relation& rel,
                                      const Document& src_doc,
                                      const ArgumentTranslations& translations,
                                      const CoverUnits& units,
                                      const std::string& target_doc_id);

enum class Field { kRelation, kArg1, kArg2 };

std::string_view to_string(Field field);

// Translations keyed by (rel_id, field). JSON-lines records
// {"rel_id":...,"field":"relation"|"arg1"|"arg2","text":...}.
class TranslationStore {
 public:
  // Throws ValidationError on a duplicate key.
  void add(const std::string& rel_id, Field field, std::string text);
  const std::string* find(const std::string& rel_id, Field field) const;
  std::size_t size() const { return texts_.size(); }

  void write(std::ostream& out) const;

 private:
  std::map<std::pair<std::string, Field>, std::string> texts_;
  std::vector<std::pair<std::string, Field>> order_;
};

TranslationStore read_translations(std::istream& in,
                                   const std::string& source_name);
TranslationStore read_translations(const std::filesystem::path& path);

// Raised when translations or alignments do not cover the relations.
class CoverageError : public ValidationError {
 public:
  CoverageError(const std::string& what, std::vector<std::string> rel_ids)
      : ValidationError(what), rel_ids_(std::move(rel_ids)) {}
  const std::vector<std::string>& rel_ids() const { return rel_ids_; }

 private:
  std::vector<std::string> rel_ids_;
};

// One unit that needs a word alignment: RB has one per relation (the
// relation's token cover and its translation); AB has one per discontinuous
// argument (the argument's cover and its translation). Alignment files list
// one Pharaoh line per unit in this order.
struct UnitRequest {
  std::string unit_id;
  std::size_t relation_index = 0;
  Field field = Field::kRelation;
  std::size_t cover_begin = 0;  // source token offset of the cover
  Document source;
  Document target;
};

// Throws CoverageError listing every rel_id with a missing translation.
std::vector<UnitRequest> enumerate_units(const Corpus& source, Method method,
                                         const TranslationStore& translations);

std::vector<align::PairShape> unit_shapes(std::span<const UnitRequest> units);

struct BuildOptions {
  unsigned threads = 1;
};

struct BuildResult {
  Corpus corpus;
  LossReport report;
  std::vector<ProjectionOutcome> outcomes;  // one per source relation
  std::size_t alignment_lookups = 0;        // unit alignments consulted
};

// `alignments` holds one set per enumerate_units() entry. All coverage and
// bounds problems are reported before any relation is projected.
BuildResult build_corpus(const Corpus& source, Method method,
                         const TranslationStore& translations,
                         std::span<const align::AlignmentSet> alignments,
                         const BuildOptions& options = {});

}  // namespace disco::projection
