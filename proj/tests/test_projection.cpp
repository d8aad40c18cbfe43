#include <sstream>

#include "disco/error.hpp"
#include "disco/projection.hpp"
#include "disco/synth.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace disco;
using namespace disco::projection;
using align::AlignmentSet;
using testing::random_alignment;

namespace {

AlignmentSet links(std::initializer_list<align::AlignmentLink> l) {
  return {"", std::set<align::AlignmentLink>(l)};
}

AlignmentSet identity(std::size_t n) {
  AlignmentSet a;
  for (std::size_t i = 0; i < n; ++i) a.links.insert({i, i});
  return a;
}

const SenseLabel kCause = parse_sense("Contingency.Cause");

ParallelUnit unit(const std::string& src, const std::string& tgt, AlignmentSet a) {
  return {"u", Document("s", src), Document("t", tgt), std::move(a)};
}

std::size_t projected_rb(const Relation& rel, const ParallelUnit& u) {
  return project_relation_rb(rel, u).is_projected() ? 1 : 0;
}

}  // namespace

TEST_CASE("project_span keeps the exact image") {
  const ArgumentSpan span(1, 5);
  CHECK(project_span(span, links({{1, 2}, {2, 3}, {3, 5}})) ==
        ArgumentSpan({{2, 4}, {5, 6}}));
  CHECK(project_span(span, identity(8)) == span);
  CHECK(project_span(ArgumentSpan(0, 3), links({{2, 0}, {5, 1}})) == ArgumentSpan(0, 1));
  CHECK(project_span(ArgumentSpan(0, 2), links({{2, 0}, {3, 1}})).empty());
}

TEST_CASE("rb: happy path copies the sense") {
  const auto u = unit("e rain . ground wet", "rain fall . ground wet", identity(5));
  const Relation rel{"r", "s", ArgumentSpan(0, 2), ArgumentSpan(3, 5), kCause};
  const auto out = project_relation_rb(rel, u);
  REQUIRE(out.is_projected());
  CHECK(out.result().relation.arg1 == ArgumentSpan(0, 2));
  CHECK(out.result().relation.arg2 == ArgumentSpan(3, 5));
  CHECK(out.result().relation.sense == kCause);
  CHECK(out.result().relation.doc_id == "t");
}

TEST_CASE("rb: unaligned arguments are dropped with their reason") {
  const Relation rel{"r", "s", ArgumentSpan(0, 2), ArgumentSpan(3, 5), kCause};
  CHECK(project_relation_rb(rel, unit("a b . c d", "w x . y z", links({{0, 0}, {1, 1}})))
            .reason() == DropReason::kUnalignedArg2);
  CHECK(project_relation_rb(rel, unit("a b . c d", "w x . y z", links({{3, 3}})))
            .reason() == DropReason::kUnalignedArg1);
}

TEST_CASE("rb: the larger argument yields shared tokens, arg2 on a tie") {
  const Relation rel{"r", "s", ArgumentSpan(0, 3), ArgumentSpan(3, 5), kCause};
  // arg1 -> {0,1,2}, arg2 -> {2,3}: arg1 is larger and gives up 2.
  auto out = project_relation_rb(
      rel, unit("a b c d e", "v w x y z", links({{0, 0}, {1, 1}, {2, 2}, {3, 2}, {4, 3}})));
  REQUIRE(out.is_projected());
  CHECK(out.result().relation.arg1 == ArgumentSpan(0, 2));
  CHECK(out.result().relation.arg2 == ArgumentSpan(2, 4));
  // arg1 -> {0,1}, arg2 -> {1,2}: tie, arg2 gives up 1.
  out = project_relation_rb(
      rel, unit("a b c d e", "v w x y z", links({{0, 0}, {1, 1}, {3, 1}, {4, 2}})));
  REQUIRE(out.is_projected());
  CHECK(out.result().relation.arg1 == ArgumentSpan(0, 2));
  CHECK(out.result().relation.arg2 == ArgumentSpan(2, 3));
  // Identical images leave the yielding argument empty.
  out = project_relation_rb(rel, unit("a b c d e", "v w", links({{0, 0}, {3, 0}})));
  CHECK(out.reason() == DropReason::kOverlappingArgs);
}

TEST_CASE("rb: spans that do not fit the unit are rejected") {
  const Relation rel{"r", "s", ArgumentSpan(0, 2), ArgumentSpan(3, 9), kCause};
  CHECK_THROWS_AS(project_relation_rb(rel, unit("a b c d", "a b c d", identity(4))),
                  ValidationError);
  const Relation ok{"r", "s", ArgumentSpan(0, 1), ArgumentSpan(2, 3), kCause};
  CHECK_THROWS_AS(project_relation_rb(ok, unit("a b c", "x", links({{0, 4}}))),
                  ValidationError);
}

TEST_CASE("ab: continuous arguments take their whole translation") {
  const Document src("d", "E don vex . dem go house");
  const Relation rel{"r", "d", ArgumentSpan(0, 3), ArgumentSpan(4, 7), kCause};
  const auto out = project_relation_ab(rel, src, {"A den go", "dem bin vex"}, {}, "r");
  REQUIRE(out.is_projected());
  const auto& [prel, doc] = out.result();
  CHECK(doc.text() == "A den go\ndem bin vex");
  CHECK(prel.arg1 == ArgumentSpan(0, 3));
  CHECK(prel.arg2 == ArgumentSpan(3, 6));
  CHECK(span_surfaces(prel.arg2, doc) == std::vector<std::string>{"dem", "bin", "vex"});
  CHECK(prel.sense == kCause);
}

TEST_CASE("ab: missing or empty translations") {
  const Document src("d", "a b . c d");
  const Relation rel{"r", "d", ArgumentSpan(0, 2), ArgumentSpan(3, 5), kCause};
  CHECK(project_relation_ab(rel, src, {"x y", std::nullopt}, {}, "r").reason() ==
        DropReason::kMissingTranslation);
  CHECK(project_relation_ab(rel, src, {"  ", "x"}, {}, "r").reason() ==
        DropReason::kMissingTranslation);
}

TEST_CASE("ab: a discontinuous argument excludes the gap's image") {
  // arg1 = [[2,4),[7,9)], cover [2,9) holds gap tokens 4..6.
  const Document src("d", "s0 s1 a b g1 g2 g3 c d . e f");
  const Relation rel{"r", "d", ArgumentSpan({{2, 4}, {7, 9}}), ArgumentSpan(10, 12), kCause};
  // Cover-local: a b g1 g2 g3 c d -> A B G H C D X. Gap tokens (local 2..4)
  // map to target 2..3 plus the stray 6; in-argument tokens also hit 6.
  ParallelUnit cover{"r#arg1", src.sub_document("r#arg1", 2, 9),
                     Document("r#arg1", "A B G H C D X"),
                     links({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 6}, {5, 4}, {6, 5}, {6, 6}})};
  const auto out =
      project_relation_ab(rel, src, {"A B G H C D X", "E F"}, {&cover, nullptr}, "r");
  REQUIRE(out.is_projected());
  CHECK(out.result().relation.arg1 == ArgumentSpan({{0, 2}, {4, 6}}));
  CHECK(out.result().relation.arg2 == ArgumentSpan(7, 9));

  // Every in-argument image also belongs to the gap.
  ParallelUnit swallowed{"r#arg1", src.sub_document("r#arg1", 2, 9), Document("r#arg1", "Z"),
                         links({{0, 0}, {2, 0}})};
  CHECK(project_relation_ab(rel, src, {"Z", "E F"}, {&swallowed, nullptr}, "r").reason() ==
        DropReason::kUnalignedArg1);
  CHECK_THROWS_AS(project_relation_ab(rel, src, {"Z", "E F"}, {}, "r"), ValidationError);
}

TEST_CASE("build_corpus: empty input") {
  const auto r = build_corpus(Corpus{}, Method::kRelationBased, {}, {});
  CHECK(r.corpus.relations().empty());
  CHECK(r.report.input_count == 0);
  CHECK(r.report.dropped_total() == 0);
  CHECK(r.report.reconciles());
}

TEST_CASE("build_corpus: one unalignable relation out of three") {
  Corpus c;
  TranslationStore t;
  for (int i = 0; i < 3; ++i) {
    const std::string id = "r" + std::to_string(i);
    c.add_document(Document(id, "a b . c d"));
    c.add_relation({id, id, ArgumentSpan(0, 2), ArgumentSpan(3, 5), kCause});
    t.add(id, Field::kRelation, "w x . y z");
  }
  std::vector<AlignmentSet> a{identity(5), identity(5), links({{0, 0}, {1, 1}})};
  const auto r = build_corpus(c, Method::kRelationBased, t, a);
  CHECK(r.report.projected_count == 2);
  CHECK(r.report.dropped.at(DropReason::kUnalignedArg2) == 1);
  CHECK(r.report.reconciles());
  CHECK(r.corpus.relations()[1].rel_id == "r1");
  CHECK(r.report.to_json() ==
        "{\n  \"input_count\": 3,\n  \"projected_count\": 2,\n  \"dropped_count\": 1,\n"
        "  \"dropped\": {\n    \"unaligned_arg1\": 0,\n    \"unaligned_arg2\": 1,\n"
        "    \"overlapping_args\": 0,\n    \"missing_translation\": 0\n  }\n}\n");
}

TEST_CASE("build_corpus: coverage gaps are listed before projecting") {
  Corpus c;
  for (const char* id : {"r1", "r2", "r3"}) {
    c.add_document(Document(id, "a b . c d"));
    c.add_relation({id, id, ArgumentSpan(0, 2), ArgumentSpan(3, 5), kCause});
  }
  TranslationStore t;
  t.add("r2", Field::kArg1, "x");
  t.add("r2", Field::kArg2, "y");
  try {
    build_corpus(c, Method::kArgumentBased, t, {});
    FAIL("coverage gap not reported");
  } catch (const CoverageError& e) {
    CHECK(e.rel_ids() == std::vector<std::string>{"r1", "r3"});
  }
  t.add("r1", Field::kRelation, "x");
  CHECK_THROWS_AS(t.add("r1", Field::kRelation, "again"), ValidationError);
  const auto units = enumerate_units(c, Method::kArgumentBased, [&] {
    TranslationStore all = synth::identity_translations(c);
    return all;
  }());
  CHECK(units.empty());
  CHECK_THROWS_AS(build_corpus(c, Method::kRelationBased, synth::identity_translations(c),
                               std::vector<AlignmentSet>(2)),
                  ValidationError);
}

TEST_CASE("translations file round trip") {
  TranslationStore t;
  t.add("r1", Field::kRelation, "x y");
  t.add("r1", Field::kArg1, "x \"quoted\"");
  t.add("r0", Field::kArg2, "é");
  std::ostringstream out;
  t.write(out);
  std::istringstream in(out.str());
  const auto back = read_translations(in, "mem");
  CHECK(back.size() == 3);
  CHECK(*back.find("r1", Field::kArg1) == "x \"quoted\"");
  std::ostringstream again;
  back.write(again);
  CHECK(again.str() == out.str());
  std::istringstream bad(R"({"rel_id":"r","field":"arg3","text":"x"})" "\n");
  CHECK_THROWS_AS(read_translations(bad, "mem"), FormatError);
}

TEST_CASE("property: identity projection reproduces every span") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Corpus c = synth::random_corpus(rng, {});
    const auto t = synth::identity_translations(c);
    for (const Method m : {Method::kRelationBased, Method::kArgumentBased}) {
      const auto r = build_corpus(c, m, t, synth::identity_alignments(c, m, t));
      REQUIRE(r.report.dropped_total() == 0);
      REQUIRE(r.corpus.relations().size() == c.relations().size());
      for (std::size_t i = 0; i < c.relations().size(); ++i) {
        const Relation& in = c.relations()[i];
        const Relation& out = r.corpus.relations()[i];
        const Document& src = c.document_of(in);
        const Document& tgt = r.corpus.document_of(out);
        REQUIRE(out.rel_id == in.rel_id);
        REQUIRE(out.sense == in.sense);
        REQUIRE(span_surfaces(out.arg1, tgt) == span_surfaces(in.arg1, src));
        REQUIRE(span_surfaces(out.arg2, tgt) == span_surfaces(in.arg2, src));
        REQUIRE(out.arg1.segments().size() == in.arg1.segments().size());
        if (m == Method::kRelationBased) {
          const auto cover = static_cast<std::ptrdiff_t>(std::min(in.arg1.first(), in.arg2.first()));
          REQUIRE(out.arg1 == in.arg1.shifted(-cover));
          REQUIRE(out.arg2 == in.arg2.shifted(-cover));
        }
      }
    }
  }
}

TEST_CASE("property: AB over continuous arguments never reads an alignment") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    synth::RandomCorpusOptions opt;
    opt.discontinuous_rate = 0.0;
    const Corpus c = synth::random_corpus(rng, opt);
    const auto t = synth::identity_translations(c);
    const auto units = enumerate_units(c, Method::kArgumentBased, t);
    REQUIRE(units.empty());
    const auto r = build_corpus(c, Method::kArgumentBased, t, {});
    REQUIRE(r.alignment_lookups == 0);
    REQUIRE(r.report.projected_count == c.relations().size());
  }
}

TEST_CASE("property: loss reports reconcile and senses are preserved") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 1000; ++trial) {
    const Corpus c = synth::random_corpus(rng, {});
    const Method m = trial % 2 ? Method::kRelationBased : Method::kArgumentBased;
    TranslationStore t;
    const auto base = synth::identity_translations(c);
    for (const auto& rel : c.relations()) {
      for (const Field f : {Field::kRelation, Field::kArg1, Field::kArg2}) {
        t.add(rel.rel_id, f, rng() % 20 == 0 ? std::string(" ") : *base.find(rel.rel_id, f));
      }
    }
    std::vector<AlignmentSet> a;
    for (const auto& u : enumerate_units(c, m, t)) {
      a.push_back(random_alignment(rng, u.source.size(), u.target.size(), 0.15));
    }
    const auto r = build_corpus(c, m, t, a, {static_cast<unsigned>(1 + trial % 3)});
    REQUIRE(r.report.reconciles());
    REQUIRE(r.report.input_count == c.relations().size());
    REQUIRE(r.corpus.relations().size() == r.report.projected_count);
    std::size_t k = 0;
    for (std::size_t i = 0; i < c.relations().size(); ++i) {
      if (!r.outcomes[i].is_projected()) continue;
      REQUIRE(r.corpus.relations()[k].rel_id == c.relations()[i].rel_id);
      REQUIRE(r.corpus.relations()[k].sense == c.relations()[i].sense);
      ++k;
    }
  }
}

TEST_CASE("property: removing links never turns a drop into a projection, "
          "except identical-image overlap drops") {
  std::mt19937_64 rng(27);
  std::size_t checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 4 + rng() % 6, m = 1 + rng() % 8;
    std::string src, tgt;
    for (std::size_t i = 0; i < n; ++i) src += "s" + std::to_string(i) + " ";
    for (std::size_t j = 0; j < m; ++j) tgt += "t" + std::to_string(j) + " ";
    const std::size_t split = 1 + rng() % (n - 1);
    const Relation rel{"r", "s", ArgumentSpan(0, split), ArgumentSpan(split, n), kCause};
    auto full = unit(src, tgt, random_alignment(rng, n, m, 0.3));
    const auto before = project_relation_rb(rel, full);
    auto reduced = full;
    for (auto it = reduced.alignment.links.begin(); it != reduced.alignment.links.end();) {
      it = rng() % 3 == 0 ? reduced.alignment.links.erase(it) : std::next(it);
    }
    if (!before.is_projected() && before.reason() == DropReason::kOverlappingArgs) continue;
    ++checked;
    REQUIRE(projected_rb(rel, reduced) <= (before.is_projected() ? 1u : 0u));
  }
  CHECK(checked > 2000);
}

TEST_CASE("removing a link can rescue an identical-image overlap drop") {
  const Relation rel{"r", "s", ArgumentSpan(0, 2), ArgumentSpan(2, 4), kCause};
  auto u = unit("a b c d", "x y", links({{0, 0}, {1, 1}, {2, 0}, {3, 1}}));
  CHECK(project_relation_rb(rel, u).reason() == DropReason::kOverlappingArgs);
  u.alignment.links.erase({3, 1});
  const auto out = project_relation_rb(rel, u);
  REQUIRE(out.is_projected());
  CHECK(out.result().relation.arg1 == ArgumentSpan(1, 2));
  CHECK(out.result().relation.arg2 == ArgumentSpan(0, 1));
}

TEST_CASE("property: build_corpus output does not depend on thread count") {
  std::mt19937_64 rng(29);
  synth::RandomCorpusOptions opt;
  opt.documents = 64;
  const Corpus c = synth::random_corpus(rng, opt);
  const auto t = synth::identity_translations(c);
  std::vector<AlignmentSet> a;
  for (const auto& u : enumerate_units(c, Method::kRelationBased, t)) {
    a.push_back(random_alignment(rng, u.source.size(), u.target.size(), 0.2));
  }
  const auto serial = build_corpus(c, Method::kRelationBased, t, a, {1});
  const auto parallel = build_corpus(c, Method::kRelationBased, t, a, {8});
  CHECK(serial.corpus == parallel.corpus);
  CHECK(serial.report == parallel.report);
}
