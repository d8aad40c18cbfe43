#pragma once

// Training objective of the linear classifier, exposed for gradient checks.

#include <cstddef>
#include <utility>
#include <vector>

#include "disco/relclass.hpp"

namespace disco::relclass {

struct Example {
  std::vector<std::pair<std::size_t, double>> x;  // sparse, sorted by id
  std::size_t label = 0;
};

struct Dataset {
  std::vector<Example> examples;
  std::size_t num_labels = 0;
  std::size_t num_features = 0;
};

// Mean softmax cross-entropy plus (l2 / 2) * ||w||^2. `weights` is
// label-major. When `gradient` is non-null it is overwritten with the
// gradient. With threads > 1 the examples are sharded and partial gradients
// are summed in shard order.
double objective(const std::vector<double>& weights, const Dataset& data,
                 double l2, std::vector<double>* gradient,
                 unsigned threads = 1);

// Encodes the corpus relations that have a label at the model's level.
Dataset encode_corpus(const ClassifierModel& model, const Corpus& corpus,
                      std::size_t* dropped = nullptr);

}  // namespace disco::relclass
