#include <algorithm>
#include <atomic>
#include <iterator>
#include <sstream>

#include "disco/projection.hpp"
#include "disco/util/parallel.hpp"
#include "json.hpp"

namespace disco::projection {
namespace {

std::set<std::size_t> image_of(const std::vector<std::size_t>& tokens,
                               const align::AlignmentSet& alignment) {
  std::set<std::size_t> out;
  // Links are sorted by source index, so each token's links form a range.
  for (const std::size_t t : tokens) {
    auto it = alignment.links.lower_bound({t, 0});
    for (; it != alignment.links.end() && it->src == t; ++it) out.insert(it->tgt);
  }
  return out;
}

std::set<std::size_t> to_set(const ArgumentSpan& span) {
  const auto v = span.token_indices();
  return {v.begin(), v.end()};
}

// Outcome of resolving one argument under AB.
struct ResolvedArgument {
  std::optional<DropReason> drop;
  Document doc;
  ArgumentSpan span;
};

void check_cover_unit(const ArgumentSpan& span, const Document& src_doc,
                      const ParallelUnit& unit) {
  const std::size_t width = span.last() - span.first();
  if (unit.src_doc.size() != width) {
    throw ValidationError("cover unit '" + unit.unit_id + "' has " +
                          std::to_string(unit.src_doc.size()) +
                          " source tokens, expected " + std::to_string(width));
  }
  for (std::size_t i = 0; i < width; ++i) {
    if (unit.src_doc.tokens()[i].surface !=
        src_doc.tokens()[span.first() + i].surface) {
      throw ValidationError("cover unit '" + unit.unit_id +
                            "' does not match the source tokens");
    }
  }
  validate_unit(unit);
}

ResolvedArgument resolve_ab_argument(const ArgumentSpan& span,
                                     const Document& src_doc,
                                     const std::optional<std::string>& text,
                                     const ParallelUnit* unit,
                                     DropReason unaligned,
                                     const std::string& rel_id,
                                     const char* name) {
  ResolvedArgument out;
  if (!span.is_discontinuous()) {
    if (!text) {
      out.drop = DropReason::kMissingTranslation;
      return out;
    }
    out.doc = Document(rel_id + "#" + name, *text);
    if (out.doc.size() == 0) {
      out.drop = DropReason::kMissingTranslation;
      return out;
    }
    out.span = ArgumentSpan(0, out.doc.size());
    return out;
  }
  if (!unit) {
    throw ValidationError("discontinuous " + std::string(name) + " of '" +
                          rel_id + "' needs a cover-span unit");
  }
  check_cover_unit(span, src_doc, *unit);
  if (unit->tgt_doc.size() == 0) {
    out.drop = DropReason::kMissingTranslation;
    return out;
  }
  const ArgumentSpan local = span.shifted(-static_cast<std::ptrdiff_t>(span.first()));
  std::vector<std::size_t> gap;
  for (std::size_t t = 0; t < local.last(); ++t) {
    if (!local.contains(t)) gap.push_back(t);
  }
  const auto inside = image_of(local.token_indices(), unit->alignment);
  const auto excluded = image_of(gap, unit->alignment);
  std::set<std::size_t> kept;
  std::set_difference(inside.begin(), inside.end(), excluded.begin(),
                      excluded.end(), std::inserter(kept, kept.end()));
  if (kept.empty()) {
    out.drop = unaligned;
    return out;
  }
  out.doc = unit->tgt_doc;
  out.span = ArgumentSpan::from_tokens(kept);
  return out;
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "rb" || name == "RB" || name == "relation") return Method::kRelationBased;
  if (name == "ab" || name == "AB" || name == "argument") return Method::kArgumentBased;
  throw ValidationError("unknown projection method '" + std::string(name) +
                        "' (expected rb or ab)");
}

std::string_view to_string(Method method) {
  return method == Method::kRelationBased ? "rb" : "ab";
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::kUnalignedArg1:
      return "unaligned_arg1";
    case DropReason::kUnalignedArg2:
      return "unaligned_arg2";
    case DropReason::kOverlappingArgs:
      return "overlapping_args";
    case DropReason::kMissingTranslation:
      return "missing_translation";
  }
  return "unknown";
}

LossReport::LossReport() {
  for (const DropReason r : kAllDropReasons) dropped[r] = 0;
}

void LossReport::record(const ProjectionOutcome& outcome) {
  ++input_count;
  if (outcome.is_projected()) {
    ++projected_count;
  } else {
    ++dropped[outcome.reason()];
  }
}

std::size_t LossReport::dropped_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : dropped) n += count;
  return n;
}

std::string LossReport::to_json() const {
  nlohmann::ordered_json j;
  j["input_count"] = input_count;
  j["projected_count"] = projected_count;
  j["dropped_count"] = dropped_total();
  nlohmann::ordered_json reasons;
  for (const DropReason r : kAllDropReasons) {
    reasons[std::string(to_string(r))] = dropped.at(r);
  }
  j["dropped"] = std::move(reasons);
  return j.dump(2) + "\n";
}

void validate_unit(const ParallelUnit& unit) {
  for (const auto& l : unit.alignment.links) {
    if (l.src >= unit.src_doc.size() || l.tgt >= unit.tgt_doc.size()) {
      throw ValidationError("unit '" + unit.unit_id + "' link " +
                            std::to_string(l.src) + "-" + std::to_string(l.tgt) +
                            " is out of bounds");
    }
  }
}

ArgumentSpan project_span(const ArgumentSpan& span,
                          const align::AlignmentSet& alignment) {
  return ArgumentSpan::from_tokens(image_of(span.token_indices(), alignment));
}

ProjectionOutcome project_relation_rb(const Relation& rel,
                                      const ParallelUnit& unit) {
  if (rel.arg1.empty() || rel.arg2.empty() ||
      rel.arg1.last() > unit.src_doc.size() ||
      rel.arg2.last() > unit.src_doc.size()) {
    throw ValidationError("relation '" + rel.rel_id +
                          "' does not fit unit '" + unit.unit_id + "'");
  }
  validate_unit(unit);
  if (unit.tgt_doc.size() == 0) {
    return ProjectionOutcome::dropped(DropReason::kMissingTranslation);
  }
  auto arg1 = to_set(project_span(rel.arg1, unit.alignment));
  auto arg2 = to_set(project_span(rel.arg2, unit.alignment));
  if (arg1.empty()) return ProjectionOutcome::dropped(DropReason::kUnalignedArg1);
  if (arg2.empty()) return ProjectionOutcome::dropped(DropReason::kUnalignedArg2);

  std::vector<std::size_t> shared;
  std::set_intersection(arg1.begin(), arg1.end(), arg2.begin(), arg2.end(),
                        std::back_inserter(shared));
  if (!shared.empty()) {
    auto& larger = arg1.size() > arg2.size() ? arg1 : arg2;
    for (const std::size_t t : shared) larger.erase(t);
    if (larger.empty()) {
      return ProjectionOutcome::dropped(DropReason::kOverlappingArgs);
    }
  }
  Relation out{rel.rel_id, unit.tgt_doc.doc_id(), ArgumentSpan::from_tokens(arg1),
               ArgumentSpan::from_tokens(arg2), rel.sense};
  return ProjectionOutcome::projected(std::move(out), unit.tgt_doc);
}

ProjectionOutcome project_relation_ab(const Relation& rel,
                                      const Document& src_doc,
                                      const ArgumentTranslations& translations,
                                      const CoverUnits& units,
                                      const std::string& target_doc_id) {
  validate_relation(rel, src_doc);
  const auto a1 = resolve_ab_argument(rel.arg1, src_doc, translations.arg1,
                                      units.arg1, DropReason::kUnalignedArg1,
                                      rel.rel_id, "arg1");
  const auto a2 = resolve_ab_argument(rel.arg2, src_doc, translations.arg2,
                                      units.arg2, DropReason::kUnalignedArg2,
                                      rel.rel_id, "arg2");
  for (const auto* a : {&a1, &a2}) {
    if (a->drop == DropReason::kMissingTranslation) {
      return ProjectionOutcome::dropped(DropReason::kMissingTranslation);
    }
  }
  if (a1.drop) return ProjectionOutcome::dropped(*a1.drop);
  if (a2.drop) return ProjectionOutcome::dropped(*a2.drop);

  const Document& d1 = a1.doc;
  const Document& d2 = a2.doc;
  const std::size_t base = d1.char_length() + 1;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  ranges.reserve(d1.size() + d2.size());
  for (const Token& t : d1.tokens()) ranges.emplace_back(t.char_start, t.char_end);
  for (const Token& t : d2.tokens()) {
    ranges.emplace_back(t.char_start + base, t.char_end + base);
  }
  Document doc(target_doc_id, d1.text() + "\n" + d2.text(), ranges);
  Relation out{rel.rel_id, target_doc_id, a1.span,
               a2.span.shifted(static_cast<std::ptrdiff_t>(d1.size())),
               rel.sense};
  return ProjectionOutcome::projected(std::move(out), std::move(doc));
}

std::vector<UnitRequest> enumerate_units(const Corpus& source, Method method,
                                         const TranslationStore& translations) {
  std::vector<UnitRequest> units;
  std::vector<std::string> missing;
  std::vector<std::string> missing_ids;
  const auto& rels = source.relations();
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const Relation& rel = rels[i];
    const Document& doc = source.document_of(rel);
    if (method == Method::kRelationBased) {
      const std::string* text = translations.find(rel.rel_id, Field::kRelation);
      if (!text) {
        missing.push_back(rel.rel_id + " (relation)");
        missing_ids.push_back(rel.rel_id);
        continue;
      }
      const std::size_t begin = std::min(rel.arg1.first(), rel.arg2.first());
      const std::size_t end = std::max(rel.arg1.last(), rel.arg2.last());
      units.push_back({rel.rel_id, i, Field::kRelation, begin,
                       doc.sub_document(rel.rel_id, begin, end),
                       Document(rel.rel_id, *text)});
      continue;
    }
    bool rel_missing = false;
    for (const Field field : {Field::kArg1, Field::kArg2}) {
      const ArgumentSpan& span = field == Field::kArg1 ? rel.arg1 : rel.arg2;
      const std::string* text = translations.find(rel.rel_id, field);
      if (!text) {
        missing.push_back(rel.rel_id + " (" + std::string(to_string(field)) + ")");
        rel_missing = true;
        continue;
      }
      if (!span.is_discontinuous()) continue;
      const std::string unit_id = rel.rel_id + "#" + std::string(to_string(field));
      units.push_back({unit_id, i, field, span.first(),
                       doc.sub_document(unit_id, span.first(), span.last()),
                       Document(unit_id, *text)});
    }
    if (rel_missing) missing_ids.push_back(rel.rel_id);
  }
  if (!missing.empty()) {
    std::string what = "missing translations for " +
                       std::to_string(missing_ids.size()) + " relation(s):";
    for (const auto& m : missing) what += " " + m;
    throw CoverageError(what, std::move(missing_ids));
  }
  return units;
}

std::vector<align::PairShape> unit_shapes(std::span<const UnitRequest> units) {
  std::vector<align::PairShape> out;
  out.reserve(units.size());
  for (const auto& u : units) {
    out.push_back({u.unit_id, u.source.size(), u.target.size()});
  }
  return out;
}

BuildResult build_corpus(const Corpus& source, Method method,
                         const TranslationStore& translations,
                         std::span<const align::AlignmentSet> alignments,
                         const BuildOptions& options) {
  const auto& rels = source.relations();
  {
    std::set<std::string_view> seen;
    for (const auto& rel : rels) {
      if (!seen.insert(rel.rel_id).second) {
        throw ValidationError("duplicate rel_id '" + rel.rel_id + "'");
      }
    }
  }
  auto requests = enumerate_units(source, method, translations);
  if (alignments.size() != requests.size()) {
    throw ValidationError("expected " + std::to_string(requests.size()) +
                          " unit alignments, got " +
                          std::to_string(alignments.size()));
  }
  std::vector<ParallelUnit> units;
  units.reserve(requests.size());
  // Per relation: unit index for RB, or for arg1/arg2 under AB.
  std::vector<std::array<std::optional<std::size_t>, 2>> unit_of(rels.size());
  for (std::size_t k = 0; k < requests.size(); ++k) {
    auto& req = requests[k];
    align::AlignmentSet alignment = alignments[k];
    alignment.pair_id = req.unit_id;
    units.push_back({req.unit_id, std::move(req.source), std::move(req.target),
                     std::move(alignment)});
    validate_unit(units.back());
    unit_of[req.relation_index][req.field == Field::kArg2 ? 1 : 0] = k;
  }

  std::atomic<std::size_t> lookups{0};
  std::vector<std::optional<ProjectionOutcome>> outcomes(rels.size());
  const auto bounds =
      util::shard_bounds(rels.size(), util::resolve_threads(options.threads));
  util::for_each_shard(bounds, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Relation& rel = rels[i];
      if (method == Method::kRelationBased) {
        const ParallelUnit& unit = units[*unit_of[i][0]];
        lookups.fetch_add(1, std::memory_order_relaxed);
        const std::size_t cover = requests[*unit_of[i][0]].cover_begin;
        Relation local = rel;
        local.arg1 = rel.arg1.shifted(-static_cast<std::ptrdiff_t>(cover));
        local.arg2 = rel.arg2.shifted(-static_cast<std::ptrdiff_t>(cover));
        outcomes[i] = project_relation_rb(local, unit);
        continue;
      }
      ArgumentTranslations texts;
      if (const auto* t = translations.find(rel.rel_id, Field::kArg1)) texts.arg1 = *t;
      if (const auto* t = translations.find(rel.rel_id, Field::kArg2)) texts.arg2 = *t;
      CoverUnits cover;
      if (unit_of[i][0]) {
        cover.arg1 = &units[*unit_of[i][0]];
        lookups.fetch_add(1, std::memory_order_relaxed);
      }
      if (unit_of[i][1]) {
        cover.arg2 = &units[*unit_of[i][1]];
        lookups.fetch_add(1, std::memory_order_relaxed);
      }
      outcomes[i] = project_relation_ab(rel, source.document_of(rel), texts,
                                        cover, rel.rel_id);
    }
  });

  BuildResult result;
  result.outcomes.reserve(rels.size());
  for (auto& o : outcomes) {
    result.report.record(*o);
    if (o->is_projected()) {
      result.corpus.add_document(o->result().document);
      result.corpus.add_relation(o->result().relation);
    }
    result.outcomes.push_back(std::move(*o));
  }
  result.alignment_lookups = lookups.load();
  return result;
}

}  // namespace disco::projection
