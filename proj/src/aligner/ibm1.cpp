#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>

#include "disco/aligner.hpp"
#include "disco/error.hpp"
#include "disco/util/parallel.hpp"

namespace disco::align {
namespace {

constexpr double kCountFloor = 1e-12;

using WordId = std::uint32_t;

class Vocabulary {
 public:
  WordId intern(const std::string& word) {
    const auto [it, inserted] =
        ids_.emplace(word, static_cast<WordId>(words_.size()));
    if (inserted) words_.push_back(word);
    return it->second;
  }
  const std::string& word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, WordId> ids_;
  std::vector<std::string> words_;
};

struct EncodedPair {
  std::vector<WordId> source;  // NULL (id 0) first when enabled
  std::vector<WordId> target;
};

// Sparse t(f|e) over co-occurring pairs in CSR layout.
struct SparseTable {
  std::vector<std::size_t> row_begin;  // size |E| + 1
  std::vector<WordId> cols;
  std::vector<double> probs;

  std::size_t index(WordId e, WordId f) const {
    const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_begin[e]);
    const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_begin[e + 1]);
    return static_cast<std::size_t>(std::lower_bound(first, last, f) -
                                    cols.begin());
  }
};

struct EStepResult {
  std::vector<util::CompensatedSum> counts;
  util::CompensatedSum log_likelihood;
};

// Expected counts and log-likelihood over pairs [begin, end).
void accumulate(const SparseTable& table, std::span<const EncodedPair> pairs,
                std::size_t begin, std::size_t end, bool with_counts,
                EStepResult& out) {
  std::vector<std::size_t> idx;
  std::vector<double> t;
  for (std::size_t n = begin; n < end; ++n) {
    const EncodedPair& pair = pairs[n];
    idx.resize(pair.source.size());
    t.resize(pair.source.size());
    for (const WordId f : pair.target) {
      double denom = 0.0;
      for (std::size_t i = 0; i < pair.source.size(); ++i) {
        idx[i] = table.index(pair.source[i], f);
        t[i] = table.probs[idx[i]];
        denom += t[i];
      }
      out.log_likelihood.add(std::log(denom));
      if (!with_counts) continue;
      for (std::size_t i = 0; i < pair.source.size(); ++i) {
        out.counts[idx[i]].add(t[i] / denom);
      }
    }
  }
}

EStepResult expectation(const SparseTable& table,
                        std::span<const EncodedPair> pairs, unsigned threads,
                        bool with_counts) {
  const auto bounds = util::shard_bounds(pairs.size(), threads);
  std::vector<EStepResult> shards(bounds.size() - 1);
  for (auto& s : shards) {
    if (with_counts) s.counts.resize(table.probs.size());
  }
  util::for_each_shard(bounds, [&](std::size_t s, std::size_t b, std::size_t e) {
    accumulate(table, pairs, b, e, with_counts, shards[s]);
  });
  EStepResult merged = std::move(shards.front());
  for (std::size_t s = 1; s < shards.size(); ++s) {
    merged.log_likelihood.add(shards[s].log_likelihood);
    for (std::size_t k = 0; k < merged.counts.size(); ++k) {
      merged.counts[k].add(shards[s].counts[k]);
    }
  }
  return merged;
}

void maximization(SparseTable& table,
                  const std::vector<util::CompensatedSum>& counts) {
  const std::size_t rows = table.row_begin.size() - 1;
  for (std::size_t e = 0; e < rows; ++e) {
    util::CompensatedSum total;
    for (std::size_t k = table.row_begin[e]; k < table.row_begin[e + 1]; ++k) {
      table.probs[k] = std::max(counts[k].value(), kCountFloor);
      total.add(table.probs[k]);
    }
    const double z = total.value();
    for (std::size_t k = table.row_begin[e]; k < table.row_begin[e + 1]; ++k) {
      table.probs[k] /= z;
    }
  }
}

}  // namespace

Ibm1Result train_ibm1(std::span<const SentencePair> pairs,
                      const Ibm1Options& options) {
  if (options.iterations < 1) {
    throw ValidationError("IBM Model 1 needs at least one iteration");
  }
  if (pairs.empty()) throw ValidationError("no sentence pairs to train on");

  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
  if (options.null_word) src_vocab.intern(std::string(TranslationTable::kNullWord));
  std::vector<EncodedPair> encoded;
  encoded.reserve(pairs.size());
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    if (pairs[n].source.empty() || pairs[n].target.empty()) {
      throw ValidationError("sentence pair " + std::to_string(n + 1) +
                            " has an empty side");
    }
    EncodedPair p;
    if (options.null_word) p.source.push_back(0);
    for (const auto& w : pairs[n].source) p.source.push_back(src_vocab.intern(w));
    for (const auto& w : pairs[n].target) p.target.push_back(tgt_vocab.intern(w));
    encoded.push_back(std::move(p));
  }

  // Co-occurrence structure, then uniform initialization per source word.
  std::vector<std::vector<WordId>> cooc(src_vocab.size());
  for (const auto& p : encoded) {
    for (const WordId e : p.source) {
      cooc[e].insert(cooc[e].end(), p.target.begin(), p.target.end());
    }
  }
  SparseTable table;
  table.row_begin.reserve(src_vocab.size() + 1);
  table.row_begin.push_back(0);
  for (auto& row : cooc) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    const double uniform = 1.0 / static_cast<double>(row.size());
    for (const WordId f : row) {
      table.cols.push_back(f);
      table.probs.push_back(uniform);
    }
    table.row_begin.push_back(table.cols.size());
    row.clear();
    row.shrink_to_fit();
  }

  const unsigned threads = util::resolve_threads(options.threads);
  Ibm1Result result;
  for (int it = 0; it < options.iterations; ++it) {
    EStepResult e = expectation(table, encoded, threads, true);
    result.log_likelihood.push_back(e.log_likelihood.value());
    maximization(table, e.counts);
  }
  result.log_likelihood.push_back(
      expectation(table, encoded, threads, false).log_likelihood.value());

  for (std::size_t e = 0; e + 1 < table.row_begin.size(); ++e) {
    for (std::size_t k = table.row_begin[e]; k < table.row_begin[e + 1]; ++k) {
      result.table.set(src_vocab.word(static_cast<WordId>(e)),
                       tgt_vocab.word(table.cols[k]), table.probs[k]);
    }
  }
  return result;
}

AlignmentSet viterbi_align(const TranslationTable& table,
                           std::span<const std::string> source,
                           std::span<const std::string> target,
                           std::string pair_id) {
  AlignmentSet out{std::move(pair_id), {}};
  const bool with_null = table.has_null();
  for (std::size_t j = 0; j < target.size(); ++j) {
    // NULL is position "-1": it wins all ties it takes part in.
    double best = with_null ? table.prob(TranslationTable::kNullWord, target[j])
                            : -1.0;
    std::optional<std::size_t> best_i;
    for (std::size_t i = 0; i < source.size(); ++i) {
      const double p = table.prob(source[i], target[j]);
      if (p > best) {
        best = p;
        best_i = i;
      }
    }
    if (best_i) out.links.insert({*best_i, j});
  }
  return out;
}

}  // namespace disco::align
