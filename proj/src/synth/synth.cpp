#include "disco/synth.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace disco::synth {
namespace {

using projection::Field;
using projection::Method;

constexpr std::array<std::pair<SecondSense, double>, 11> kSenseWeights{{
    {SecondSense::kCause, 0.25},
    {SecondSense::kConjunction, 0.20},
    {SecondSense::kRestatement, 0.18},
    {SecondSense::kInstantiation, 0.08},
    {SecondSense::kContrast, 0.07},
    {SecondSense::kAsynchronous, 0.06},
    {SecondSense::kList, 0.04},
    {SecondSense::kJustification, 0.03},
    {SecondSense::kConcession, 0.03},
    {SecondSense::kSynchronous, 0.03},
    {SecondSense::kAlternative, 0.03},
}};

constexpr std::size_t kFillerWords = 300;
constexpr std::size_t kFunctionWords = 6;
constexpr std::size_t kCuesPerSense = 3;

bool is_punct_token(const std::string& w) {
  return w == "." || w == ",";
}

// Joins tokens with spaces, attaching punctuation to the preceding word.
std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty() && !is_punct_token(t)) out += ' ';
    out += t;
  }
  return out;
}

std::string make_word(std::mt19937_64& rng) {
  static constexpr std::string_view kConsonants = "bdfgklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  std::uniform_int_distribution<int> syllables(1, 3);
  std::string w;
  for (int s = syllables(rng); s > 0; --s) {
    w += kConsonants[rng() % kConsonants.size()];
    w += kVowels[rng() % kVowels.size()];
  }
  return w;
}

// Source vocabulary and a word-by-word translation into the target language.
class Language {
 public:
  explicit Language(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::unordered_set<std::string> used;
    const auto fresh = [&] {
      std::string w;
      do {
        w = make_word(rng);
      } while (!used.insert(w).second);
      return w;
    };
    for (std::size_t i = 0; i < kFunctionWords; ++i) function_.push_back(fresh());
    for (std::size_t i = 0; i < kFillerWords; ++i) filler_.push_back(fresh());
    for (const auto& [sense, weight] : kSenseWeights) {
      auto& cues = cues_[sense];
      for (std::size_t i = 0; i < kCuesPerSense; ++i) cues.push_back(fresh());
    }
    for (const auto& w : used) {
      const std::string t = to_target(w);
      forward_[w] = t;
      backward_[t] = w;
    }
    dropped_.insert(function_.begin(), function_.end());
  }

  const std::vector<std::string>& cues(SecondSense s) const { return cues_.at(s); }

  std::string filler(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    return filler_[static_cast<std::size_t>(x * x * kFillerWords) % kFillerWords];
  }
  std::string function_word(std::mt19937_64& rng) const {
    return function_[rng() % function_.size()];
  }

  struct Translation {
    std::vector<std::string> tokens;
    align::AlignmentSet alignment;
  };

  // Function words vanish; punctuation is copied.
  Translation translate(const std::vector<std::string>& tokens) const {
    Translation out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string& w = tokens[i];
      if (dropped_.count(w)) continue;
      out.alignment.links.insert({i, out.tokens.size()});
      if (is_punct_token(w)) {
        out.tokens.push_back(w);
      } else {
        const auto it = forward_.find(w);
        out.tokens.push_back(it == forward_.end() ? w : it->second);
      }
    }
    return out;
  }

  std::string back_translate(const std::string& w) const {
    const auto it = backward_.find(w);
    return it == backward_.end() ? w : it->second;
  }

  bool is_cue(const std::string& w) const {
    for (const auto& [s, cues] : cues_) {
      if (std::find(cues.begin(), cues.end(), w) != cues.end()) return true;
    }
    return false;
  }

 private:
  static std::string to_target(const std::string& w) {
    std::string t;
    for (const char c : w) {
      switch (c) {
        case 'a': t += 'o'; break;
        case 'e': t += 'a'; break;
        case 'i': t += 'e'; break;
        case 'o': t += 'u'; break;
        case 'u': t += 'i'; break;
        default: t += c;
      }
    }
    return t + "n";
  }

  std::vector<std::string> function_;
  std::vector<std::string> filler_;
  std::map<SecondSense, std::vector<std::string>> cues_;
  std::unordered_map<std::string, std::string> forward_;
  std::unordered_map<std::string, std::string> backward_;
  std::unordered_set<std::string> dropped_;
};

struct Draft {
  std::vector<std::string> tokens;
  ArgumentSpan arg1;
  ArgumentSpan arg2;
  SenseLabel sense{TopSense::kExpansion};
};

SenseLabel sample_sense(std::mt19937_64& rng, double top_only_rate) {
  std::vector<double> weights;
  for (const auto& [s, w] : kSenseWeights) weights.push_back(w);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  const SecondSense second = kSenseWeights[pick(rng)].first;
  std::bernoulli_distribution top_only(top_only_rate);
  return top_only(rng) ? SenseLabel(parent_of(second)) : SenseLabel(second);
}

SecondSense cue_sense(const SenseLabel& sense, std::mt19937_64& rng) {
  if (sense.second()) return *sense.second();
  std::vector<SecondSense> children;
  for (const auto& [s, w] : kSenseWeights) {
    if (parent_of(s) == sense.top()) children.push_back(s);
  }
  return children[rng() % children.size()];
}

std::vector<std::string> argument_words(const Language& lang,
                                        std::mt19937_64& rng,
                                        const std::vector<std::string>* cues,
                                        double cue_rate) {
  std::uniform_int_distribution<std::size_t> length(4, 9);
  std::vector<std::string> words;
  // The first word is always a content word so no argument vanishes in
  // translation.
  words.push_back(lang.filler(rng));
  const std::size_t n = length(rng);
  std::bernoulli_distribution function(0.2);
  while (words.size() < n) {
    words.push_back(function(rng) ? lang.function_word(rng) : lang.filler(rng));
  }
  std::bernoulli_distribution with_cue(cue_rate);
  if (cues && with_cue(rng)) {
    const std::size_t pos = 1 + rng() % (words.size() - 1);
    words[pos] = (*cues)[rng() % cues->size()];
  }
  return words;
}

Draft make_draft(const Language& lang, std::mt19937_64& rng,
                 const BilingualOptions& options) {
  Draft d;
  d.sense = sample_sense(rng, options.top_only_rate);
  const auto& cues = lang.cues(cue_sense(d.sense, rng));
  auto w1 = argument_words(lang, rng, &cues, 0.3);
  auto w2 = argument_words(lang, rng, &cues, options.cue_rate);
  std::bernoulli_distribution split(options.discontinuous_rate);
  if (split(rng) && w1.size() >= 4) {
    // arg1 interrupted by an attribution-like ", x y ," insert.
    const std::size_t at = 2 + rng() % (w1.size() - 3);
    d.tokens.assign(w1.begin(), w1.begin() + static_cast<std::ptrdiff_t>(at));
    d.tokens.insert(d.tokens.end(),
                    {",", lang.filler(rng), lang.filler(rng), ","});
    d.tokens.insert(d.tokens.end(), w1.begin() + static_cast<std::ptrdiff_t>(at),
                    w1.end());
    d.arg1 = ArgumentSpan({{0, at}, {at + 4, w1.size() + 4}});
  } else {
    d.tokens = w1;
    d.arg1 = ArgumentSpan(0, w1.size());
  }
  d.tokens.push_back(".");
  const std::size_t start2 = d.tokens.size();
  d.tokens.insert(d.tokens.end(), w2.begin(), w2.end());
  d.arg2 = ArgumentSpan(start2, start2 + w2.size());
  d.tokens.push_back(".");
  return d;
}

std::vector<std::string> surfaces(const Document& doc) {
  std::vector<std::string> out;
  for (const auto& t : doc.tokens()) out.push_back(t.surface);
  return out;
}

std::vector<std::string> cover_surfaces(const Document& doc, std::size_t begin,
                                        std::size_t end) {
  std::vector<std::string> out;
  for (std::size_t i = begin; i < end; ++i) out.push_back(doc.tokens()[i].surface);
  return out;
}

std::string relation_id(std::string_view prefix, std::size_t i) {
  std::string n = std::to_string(i);
  return std::string(prefix) + std::string(n.size() < 5 ? 5 - n.size() : 0, '0') + n;
}

}  // namespace

BilingualFixture generate_bilingual(const BilingualOptions& options) {
  const Language lang(options.seed);
  BilingualFixture fx;
  std::mt19937_64 rng(options.seed);

  for (std::size_t i = 0; i < options.relations; ++i) {
    const Draft d = make_draft(lang, rng, options);
    const std::string id = relation_id("src", i);
    fx.source.add_document(Document(id, join(d.tokens)));
    fx.source.add_relation({id, id, d.arg1, d.arg2, d.sense});
  }
  for (const auto& rel : fx.source.relations()) {
    const Document& doc = fx.source.document_of(rel);
    const std::size_t cover_begin = std::min(rel.arg1.first(), rel.arg2.first());
    const std::size_t cover_end = std::max(rel.arg1.last(), rel.arg2.last());
    fx.translations.add(
        rel.rel_id, Field::kRelation,
        join(lang.translate(cover_surfaces(doc, cover_begin, cover_end)).tokens));
    for (const Field f : {Field::kArg1, Field::kArg2}) {
      const ArgumentSpan& span = f == Field::kArg1 ? rel.arg1 : rel.arg2;
      fx.translations.add(
          rel.rel_id, f,
          join(lang.translate(cover_surfaces(doc, span.first(), span.last())).tokens));
    }
  }
  for (const Method m : {Method::kRelationBased, Method::kArgumentBased}) {
    auto& out = m == Method::kRelationBased ? fx.rb_alignments : fx.ab_alignments;
    for (const auto& unit : projection::enumerate_units(fx.source, m, fx.translations)) {
      auto a = lang.translate(surfaces(unit.source)).alignment;
      a.pair_id = unit.unit_id;
      out.push_back(std::move(a));
    }
  }

  std::mt19937_64 eval_rng(options.seed * 7919 + 17);
  std::bernoulli_distribution lose_cue(options.back_translation_cue_loss);
  for (std::size_t i = 0; i < options.eval_relations; ++i) {
    const Draft d = make_draft(lang, eval_rng, options);
    const auto tr = lang.translate(d.tokens);
    const std::string id = relation_id("tgt", i);
    fx.target_gold.add_document(Document(id, join(tr.tokens)));
    const Relation rel{id, id, projection::project_span(d.arg1, tr.alignment),
                       projection::project_span(d.arg2, tr.alignment), d.sense};
    fx.target_gold.add_relation(rel);

    std::vector<std::string> back;
    for (const auto& t : tr.tokens) {
      std::string w = lang.back_translate(t);
      if (lang.is_cue(w) && lose_cue(eval_rng)) w = lang.filler(eval_rng);
      back.push_back(std::move(w));
    }
    fx.target_gold_translated.add_document(Document(id, join(back)));
    fx.target_gold_translated.add_relation(rel);
  }
  return fx;
}

projection::TranslationStore identity_translations(const Corpus& corpus) {
  projection::TranslationStore store;
  const auto text_of = [](const Document& doc, std::size_t begin, std::size_t end) {
    return std::string(doc.slice(doc.tokens()[begin].char_start,
                                 doc.tokens()[end - 1].char_end));
  };
  for (const auto& rel : corpus.relations()) {
    const Document& doc = corpus.document_of(rel);
    store.add(rel.rel_id, Field::kRelation,
              text_of(doc, std::min(rel.arg1.first(), rel.arg2.first()),
                      std::max(rel.arg1.last(), rel.arg2.last())));
    store.add(rel.rel_id, Field::kArg1, text_of(doc, rel.arg1.first(), rel.arg1.last()));
    store.add(rel.rel_id, Field::kArg2, text_of(doc, rel.arg2.first(), rel.arg2.last()));
  }
  return store;
}

std::vector<align::AlignmentSet> identity_alignments(
    const Corpus& corpus, projection::Method method,
    const projection::TranslationStore& translations) {
  std::vector<align::AlignmentSet> out;
  for (const auto& unit : projection::enumerate_units(corpus, method, translations)) {
    align::AlignmentSet a{unit.unit_id, {}};
    const std::size_t n = std::min(unit.source.size(), unit.target.size());
    for (std::size_t i = 0; i < n; ++i) a.links.insert({i, i});
    out.push_back(std::move(a));
  }
  return out;
}

Corpus random_corpus(std::mt19937_64& rng, const RandomCorpusOptions& options) {
  static const std::vector<std::string> kWords = {
      "a", "we", "dey", "go", "market", "e", "rain", "ground", "wet", "dem",
      "bin", "vex", "una", "chop", "house", "book", "small", "big", ",", ".",
      "?", "don't", "\xC3\xA9kp\xC3\xA9", "na", "wetin"};
  const auto senses = all_sense_strings();
  std::uniform_int_distribution<std::size_t> length(
      std::max<std::size_t>(options.min_tokens, 4), options.max_tokens);
  std::bernoulli_distribution discontinuous(options.discontinuous_rate);
  Corpus corpus;
  for (std::size_t d = 0; d < options.documents; ++d) {
    std::string text;
    const std::size_t n = length(rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) text += (rng() % 5 == 0) ? "  " : " ";
      text += kWords[rng() % kWords.size()];
    }
    const std::string id = relation_id("doc", d);
    Document doc(id, text);
    const std::size_t tokens = doc.size();
    corpus.add_document(std::move(doc));

    // arg1 inside [0, split), arg2 inside [split, tokens).
    const std::size_t split = 2 + rng() % (tokens - 3);
    const auto pick = [&](std::size_t lo, std::size_t hi) {
      const std::size_t b = lo + rng() % (hi - lo);
      const std::size_t e = b + 1 + rng() % (hi - b);
      if (e - b >= 3 && discontinuous(rng)) {
        const std::size_t gap = b + 1 + rng() % (e - b - 2);
        return ArgumentSpan({{b, gap}, {gap + 1, e}});
      }
      return ArgumentSpan(b, e);
    };
    ArgumentSpan a = pick(0, split);
    ArgumentSpan b = pick(split, tokens);
    if (rng() % 10 == 0) std::swap(a, b);  // arg2 before arg1
    corpus.add_relation({"rel" + id.substr(3), id, a, b,
                         parse_sense(senses[rng() % senses.size()])});
  }
  return corpus;
}

std::vector<std::string> all_sense_strings() {
  std::vector<std::string> out;
  for (const TopSense top : {TopSense::kTemporal, TopSense::kContingency,
                             TopSense::kComparison, TopSense::kExpansion}) {
    out.emplace_back(to_string(top));
  }
  for (const auto& name : label_space(Level::kSecond)) {
    out.push_back(sense_from_level_label(name, Level::kSecond).to_string());
  }
  return out;
}

}  // namespace disco::synth
