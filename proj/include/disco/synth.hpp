#pragma once

// Deterministic synthetic data: a bilingual discourse fixture with
// label-correlated cue words, identity translations/alignments, and random
// corpora for property tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "disco/aligner.hpp"
#include "disco/core.hpp"
#include "disco/projection.hpp"

namespace disco::synth {

struct BilingualOptions {
  std::size_t relations = 200;       // source-language training relations
  std::size_t eval_relations = 120;  // gold target-language relations
  double discontinuous_rate = 0.0;   // share of relations with a split arg1
  double top_only_rate = 0.0;        // share of senses without a second level
  double cue_rate = 0.85;            // chance arg2 carries a cue word
  double back_translation_cue_loss = 0.4;
  std::uint64_t seed = 42;
};

struct BilingualFixture {
  Corpus source;                           // source-language training corpus
  projection::TranslationStore translations;  // relation, arg1, arg2 fields
  // Word alignments of every projection unit, in enumerate_units() order.
  std::vector<align::AlignmentSet> rb_alignments;
  std::vector<align::AlignmentSet> ab_alignments;
  Corpus target_gold;             // target-language evaluation corpus
  Corpus target_gold_translated;  // the same relations translated back
};

BilingualFixture generate_bilingual(const BilingualOptions& options);

// Source-side text of every relation, argument and relation cover: what an
// exact "translation" into the same language would return. All three fields
// are filled for every relation.
projection::TranslationStore identity_translations(const Corpus& corpus);

// i-i links for each unit that enumerate_units() yields.
std::vector<align::AlignmentSet> identity_alignments(
    const Corpus& corpus, projection::Method method,
    const projection::TranslationStore& translations);

struct RandomCorpusOptions {
  std::size_t documents = 10;
  std::size_t min_tokens = 4;
  std::size_t max_tokens = 30;
  double discontinuous_rate = 0.3;
};

// Random documents over a small vocabulary, one relation per document, with
// disjoint (sometimes discontinuous) arguments and random senses.
Corpus random_corpus(std::mt19937_64& rng, const RandomCorpusOptions& options);

// Every sense label string accepted by parse_sense (4 + 11).
std::vector<std::string> all_sense_strings();

}  // namespace disco::synth
