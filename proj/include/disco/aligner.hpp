#pragma once

// Word alignment: an IBM Model 1 EM trainer with Viterbi decoding,
// bidirectional symmetrization, and Pharaoh ("i-j") interchange for
// alignments produced by external tools.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace disco::align {

struct AlignmentLink {
  std::size_t src = 0;
  std::size_t tgt = 0;

  auto operator<=>(const AlignmentLink&) const = default;
};

struct AlignmentSet {
  std::string pair_id;
  std::set<AlignmentLink> links;  // ordered by (src, tgt)

  bool contains(std::size_t src, std::size_t tgt) const {
    return links.count({src, tgt}) > 0;
  }
  AlignmentSet transposed() const;

  bool operator==(const AlignmentSet&) const = default;
};

// Lexical translation probabilities t(tgt | src). The source vocabulary may
// contain kNullWord.
class TranslationTable {
 public:
  static constexpr std::string_view kNullWord = "<NULL>";

  using Row = std::map<std::string, double, std::less<>>;

  double prob(std::string_view src, std::string_view tgt) const;
  void set(const std::string& src, const std::string& tgt, double p);
  bool has_null() const;
  const std::map<std::string, Row, std::less<>>& rows() const { return rows_; }

  // Throws ValidationError if some row does not sum to 1 within `tolerance`
  // or a probability lies outside [0, 1].
  void check_stochastic(double tolerance = 1e-9) const;

  bool operator==(const TranslationTable&) const = default;

 private:
  std::map<std::string, Row, std::less<>> rows_;
};

// JSON-lines, one {"src":...,"tgt":...,"p":...} per entry, sorted by (src, tgt).
void write_table(const TranslationTable& table, std::ostream& out);
void write_table(const TranslationTable& table,
                 const std::filesystem::path& path);
TranslationTable read_table(std::istream& in, const std::string& source_name);
TranslationTable read_table(const std::filesystem::path& path);

struct SentencePair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

struct Ibm1Options {
  int iterations = 5;
  bool null_word = true;
  // Workers for the E-step; counts are merged in shard order.
  unsigned threads = 1;
};

struct Ibm1Result {
  TranslationTable table;
  // log_likelihood[k] is the corpus log-likelihood under the table after k
  // iterations (k = 0 is the uniform initialization). Constant terms of
  // Model 1 that do not depend on t are omitted.
  std::vector<double> log_likelihood;
};

// Exact EM for IBM Model 1. Initialization is uniform over target words that
// co-occur with each source word. Throws ValidationError on empty input or
// iterations < 1.
Ibm1Result train_ibm1(std::span<const SentencePair> pairs,
                      const Ibm1Options& options);

// Links each target token to argmax_i t(tgt_j | src_i). When the table has a
// NULL row, NULL competes as a virtual position before index 0 and a target
// token it wins stays unlinked. Ties go to the smallest source position.
// Entries missing from the table count as probability 0.
AlignmentSet viterbi_align(const TranslationTable& table,
                           std::span<const std::string> source,
                           std::span<const std::string> target,
                           std::string pair_id = {});

enum class Heuristic { kIntersection, kUnion, kGrowDiagFinalAnd };

Heuristic parse_heuristic(std::string_view name);

// `backward` must already be in src->tgt orientation. Throws ValidationError
// when the pair ids differ.
AlignmentSet symmetrize(const AlignmentSet& forward,
                        const AlignmentSet& backward, Heuristic heuristic);

// Whitespace-separated "i-j" tokens. Throws ValidationError naming the
// offending 1-based token position.
AlignmentSet parse_pharaoh(std::string_view line, std::string pair_id = {});
std::string format_pharaoh(const AlignmentSet& set);

// Source and target token counts of one aligned unit.
struct PairShape {
  std::string pair_id;
  std::size_t source_size = 0;
  std::size_t target_size = 0;
};

// One Pharaoh line per expected pair, in order. Throws FormatError on a count
// mismatch or an index outside its pair's bounds.
std::vector<AlignmentSet> load_external_alignments(
    std::istream& in, const std::string& source_name,
    std::span<const PairShape> expected_pairs);
std::vector<AlignmentSet> load_external_alignments(
    const std::filesystem::path& path,
    std::span<const PairShape> expected_pairs);

// Lines of a Pharaoh file with no bounds information.
std::vector<AlignmentSet> read_pharaoh_file(const std::filesystem::path& path);
void write_pharaoh_file(std::span<const AlignmentSet> sets,
                        const std::filesystem::path& path);

}  // namespace disco::align
