#include <algorithm>
#include <set>

#include "disco/core.hpp"
#include "disco/error.hpp"
#include "disco/synth.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace disco;

namespace {

std::vector<std::tuple<std::string, std::size_t, std::size_t>> triples(
    std::string_view text) {
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
  for (const auto& t : tokenize(text)) out.emplace_back(t.surface, t.char_start, t.char_end);
  return out;
}

using Triple = std::tuple<std::string, std::size_t, std::size_t>;

}  // namespace

TEST_CASE("tokenize splits whitespace and punctuation runs") {
  CHECK(triples("We dey go.") ==
        std::vector<Triple>{{"We", 0, 2}, {"dey", 3, 6}, {"go", 7, 9}, {".", 9, 10}});
  CHECK(tokenize("").empty());
  CHECK(triples("a  b") == std::vector<Triple>{{"a", 0, 1}, {"b", 3, 4}});
  CHECK(triples("wait...what?!") ==
        std::vector<Triple>{{"wait", 0, 4}, {"...", 4, 7}, {"what", 7, 11}, {"?!", 11, 13}});
}

TEST_CASE("tokenize counts code points, not bytes") {
  CHECK(triples("né wá.") ==
        std::vector<Triple>{{"né", 0, 2}, {"wá", 3, 5}, {".", 5, 6}});
  CHECK(triples("日本。語") ==
        std::vector<Triple>{{"日本", 0, 2}, {"。", 2, 3}, {"語", 3, 4}});
}

TEST_CASE("tokenize rejects malformed UTF-8") {
  CHECK_THROWS_AS(tokenize("ab\xff"), ValidationError);
  CHECK_THROWS_AS(tokenize("\xc3"), ValidationError);
}

TEST_CASE("property: token slices equal surfaces and tokens are ordered") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::string text = testing::random_text(rng, 40);
    const Document doc("d", text);
    std::size_t prev_end = 0;
    for (const auto& t : doc.tokens()) {
      REQUIRE(t.char_start < t.char_end);
      REQUIRE(t.char_start >= prev_end);
      REQUIRE(t.char_end <= doc.char_length());
      REQUIRE(doc.slice(t.char_start, t.char_end) == t.surface);
      prev_end = t.char_end;
    }
    // Everything between tokens is whitespace, so tokens plus separators
    // rebuild the text.
    std::string rebuilt;
    std::size_t at = 0;
    for (const auto& t : doc.tokens()) {
      rebuilt += doc.slice(at, t.char_start);
      rebuilt += t.surface;
      at = t.char_end;
    }
    rebuilt += doc.slice(at, doc.char_length());
    REQUIRE(rebuilt == text);
    REQUIRE(tokenize(text) == doc.tokens());
  }
}

TEST_CASE("explicit token ranges are validated") {
  const std::vector<std::pair<std::size_t, std::size_t>> ok{{0, 3}, {4, 7}};
  const Document doc("d", "abc def", ok);
  CHECK(doc.tokens()[1].surface == "def");
  const std::vector<std::pair<std::size_t, std::size_t>> overlap{{0, 3}, {2, 5}};
  CHECK_THROWS_AS(Document("d", "abc def", overlap), ValidationError);
  const std::vector<std::pair<std::size_t, std::size_t>> empty{{1, 1}};
  CHECK_THROWS_AS(Document("d", "abc", empty), ValidationError);
  const std::vector<std::pair<std::size_t, std::size_t>> past{{0, 9}};
  CHECK_THROWS_AS(Document("d", "abc", past), ValidationError);
}

TEST_CASE("sub_document rebases offsets") {
  const Document doc("d", "one two, three");
  const Document sub = doc.sub_document("s", 1, 3);
  REQUIRE(sub.size() == 2);
  CHECK(sub.text() == "two,");
  CHECK(sub.tokens()[0].char_start == 0);
  CHECK(sub.tokens()[1].surface == ",");
}

TEST_CASE("argument spans keep the segment invariants") {
  const ArgumentSpan s({{1, 3}, {5, 6}});
  CHECK(s.is_discontinuous());
  CHECK(s.token_count() == 3);
  CHECK(s.token_indices() == std::vector<std::size_t>{1, 2, 5});
  CHECK_FALSE(ArgumentSpan(0, 4).is_discontinuous());
  CHECK_THROWS_AS(ArgumentSpan(std::vector<TokenRange>{}), ValidationError);
  CHECK_THROWS_AS(ArgumentSpan({{1, 3}, {3, 5}}), ValidationError);  // adjacent
  CHECK_THROWS_AS(ArgumentSpan({{4, 6}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(ArgumentSpan(2, 2), ValidationError);
  CHECK(ArgumentSpan::from_tokens({1, 2, 5}) == s);
  CHECK(ArgumentSpan::from_tokens({}).empty());
}

TEST_CASE("parse_sense") {
  CHECK(parse_sense("Expansion.Restatement") ==
        SenseLabel(TopSense::kExpansion, SecondSense::kRestatement));
  CHECK(parse_sense("Comparison") == SenseLabel(TopSense::kComparison));
  try {
    parse_sense("Expansion.Cause");
    FAIL("accepted a child of the wrong parent");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Cause") != std::string::npos);
  }
  try {
    parse_sense("Expansion.Foo");
    FAIL("accepted an unknown second level");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Foo") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_sense("Contingency.Pragmatic cause"), ValidationError);
  CHECK(parse_sense_lenient("Contingency.Pragmatic cause") ==
        SenseLabel(TopSense::kContingency, SecondSense::kJustification));
}

TEST_CASE("property: parse_sense accepts exactly the 15 hierarchy labels") {
  const std::vector<std::string> tops = {"Temporal", "Contingency", "Comparison",
                                         "Expansion"};
  const std::vector<std::string> seconds = {
      "Asynchronous", "Synchronous", "Cause", "Justification", "Concession", "Contrast",
      "Alternative", "Conjunction", "Instantiation", "List", "Restatement"};
  std::set<std::string> accepted;
  std::vector<std::string> candidates = tops;
  candidates.insert(candidates.end(), seconds.begin(), seconds.end());
  for (const auto& t : tops) {
    for (const auto& s : seconds) candidates.push_back(t + "." + s);
    for (const auto& t2 : tops) candidates.push_back(t + "." + t2);
    candidates.push_back(t + ".");
    candidates.push_back(t + ".Cause.Reason");
  }
  for (const auto& t : tops) {
    std::string lower = t;
    lower[0] = static_cast<char>(lower[0] - 'A' + 'a');
    candidates.push_back(lower);
    candidates.push_back(" " + t);
  }
  candidates.push_back("");
  candidates.push_back(".");
  for (const auto& c : candidates) {
    try {
      const SenseLabel s = parse_sense(c);
      CHECK(s.to_string() == c);
      accepted.insert(c);
    } catch (const ValidationError&) {
    }
  }
  CHECK(accepted.size() == 15);
  const auto all = synth::all_sense_strings();
  CHECK(std::set<std::string>(all.begin(), all.end()) == accepted);
}

TEST_CASE("coarsen drops the second level") {
  CHECK(coarsen(parse_sense("Contingency.Cause")) == TopSense::kContingency);
  CHECK(coarsen(parse_sense("Expansion")) == TopSense::kExpansion);
  CHECK(coarsen(parse_sense("Temporal.Synchronous")) == TopSense::kTemporal);
  for (const auto& label : label_space(Level::kSecond)) {
    const SenseLabel s = sense_from_level_label(label, Level::kSecond);
    const auto top = s.label_at(Level::kTop);
    REQUIRE(top);
    CHECK(std::count(label_space(Level::kTop).begin(), label_space(Level::kTop).end(),
                     *top) == 1);
  }
}

TEST_CASE("label spaces") {
  CHECK(label_space(Level::kTop).size() == 4);
  CHECK(label_space(Level::kSecond).size() == 11);
  CHECK(parse_sense("Comparison").label_at(Level::kSecond) == std::nullopt);
  CHECK_THROWS_AS(level_from_int(7), ValidationError);
}

TEST_CASE("corpus validation") {
  Corpus c;
  c.add_document(Document("d1", "a b c d e f"));
  CHECK_THROWS_AS(c.add_document(Document("d1", "x")), ValidationError);
  const SenseLabel sense = parse_sense("Expansion.List");
  c.add_relation({"r1", "d1", ArgumentSpan(0, 2), ArgumentSpan(3, 6), sense});
  CHECK_THROWS_AS(c.add_relation({"r2", "nope", ArgumentSpan(0, 1), ArgumentSpan(2, 3), sense}),
                  ValidationError);
  CHECK_THROWS_AS(c.add_relation({"r3", "d1", ArgumentSpan(0, 2), ArgumentSpan(5, 7), sense}),
                  ValidationError);
  CHECK_THROWS_AS(c.add_relation({"r4", "d1", ArgumentSpan(0, 3), ArgumentSpan(2, 4), sense}),
                  ValidationError);
  CHECK(c.relations().size() == 1);
  CHECK(span_surfaces(c.relations()[0].arg2, c.document("d1")) ==
        std::vector<std::string>{"d", "e", "f"});
}
