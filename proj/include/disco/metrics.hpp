#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "disco/core.hpp"

namespace disco::metrics {

// counts[gold][pred] over a fixed label order.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> labels);

  // Throws ValidationError for a label outside the space.
  void add(std::string_view gold, std::string_view pred, std::uint64_t n = 1);

  const std::vector<std::string>& labels() const { return labels_; }
  std::uint64_t count(std::size_t gold, std::size_t pred) const {
    return counts_[gold][pred];
  }
  std::uint64_t total() const;
  std::uint64_t diagonal() const;
  std::uint64_t row_sum(std::size_t gold) const;
  std::uint64_t col_sum(std::size_t pred) const;
  std::size_t index_of(std::string_view label) const;

  // Header row "gold\pred,<labels...>", then one row per gold label.
  std::string to_csv() const;
  static ConfusionMatrix from_csv(std::istream& in);

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

ConfusionMatrix confusion(
    std::span<const std::pair<std::string, std::string>> gold_pred,
    std::vector<std::string> labels);

struct ClassScores {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;    // gold count
  std::uint64_t predicted = 0;  // prediction count
  bool averaged = false;        // member of the macro-averaging population
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassScores> per_class;
  std::uint64_t evaluated_count = 0;
  std::size_t averaging_population = 0;

  std::string to_json() const;
};

// Precision and recall with an empty denominator count as 0. Macro-f1
// averages over the classes that occur in gold or in predictions. Throws
// ValidationError on an empty matrix.
MetricsReport score(const ConfusionMatrix& matrix);

// Label counts at a level; relations without a label at that level (top-only
// senses at 11-way) are skipped.
std::map<std::string, std::size_t> distribution(const Corpus& corpus,
                                                Level level);

}  // namespace disco::metrics
