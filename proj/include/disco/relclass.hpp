#pragma once

// Linear implicit-relation classifier: sparse lexical features, multinomial
// logistic regression trained by full-batch gradient descent, and the four
// experimental set-ups (English model on target text, English model on
// translated text, target model from scratch, continued training).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "disco/core.hpp"
#include "disco/metrics.hpp"

namespace disco::relclass {

// Feature name -> term frequency. Ordered so iteration is deterministic.
using FeatureVector = std::map<std::string, double>;

// Emits, per argument k in {1, 2}: lowercased unigrams and bigrams
// ("ak:w", "ak:w1_w2"), first/last tokens ("ak_first:w", "ak_last:w"), and
// word-pair features "x:w1|w2" for arg1/arg2 words among the most frequent
// training words of each argument position.
class Featurizer {
 public:
  static constexpr std::size_t kDefaultTopK = 50;

  Featurizer() = default;
  Featurizer(std::size_t top_k, std::vector<std::string> arg1_top,
             std::vector<std::string> arg2_top);

  // Counts argument words over the corpus; keeps the top_k per position,
  // ties broken alphabetically.
  static Featurizer fit(const Corpus& corpus, std::size_t top_k = kDefaultTopK);

  FeatureVector featurize(const Relation& rel, const Document& doc) const;

  std::size_t top_k() const { return top_k_; }
  const std::vector<std::string>& arg1_top() const { return arg1_top_; }
  const std::vector<std::string>& arg2_top() const { return arg2_top_; }

  bool operator==(const Featurizer&) const = default;

 private:
  std::size_t top_k_ = kDefaultTopK;
  std::vector<std::string> arg1_top_;  // sorted
  std::vector<std::string> arg2_top_;  // sorted
};

struct Hyperparams {
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int epochs = 30;
  std::uint64_t seed = 42;
  double decay = 0.1;  // lr_epoch = lr / (1 + decay * epoch)
  unsigned threads = 1;

  bool operator==(const Hyperparams&) const = default;
};

class ClassifierModel {
 public:
  static constexpr std::string_view kFormat = "disco-relclass-model";
  static constexpr int kVersion = 1;
  static constexpr std::string_view kBiasFeature = "__bias__";
  // Norm of the encoded lexical part. With the unit bias, ||x||^2 = 17, so the
  // loss is 8.5-smooth and any learning rate below 2/8.5 descends.
  static constexpr double kFeatureNorm = 4.0;

  ClassifierModel() = default;
  ClassifierModel(Level level, Featurizer featurizer,
                  std::vector<std::string> features, Hyperparams hyperparams);

  Level level() const { return level_; }
  const std::vector<std::string>& labels() const { return label_space(level_); }
  const Featurizer& featurizer() const { return featurizer_; }
  const std::vector<std::string>& features() const { return features_; }
  std::optional<std::size_t> feature_id(const std::string& name) const;
  std::size_t num_features() const { return features_.size(); }

  // Label-major, num_labels x num_features.
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& mutable_weights() { return weights_; }
  double weight(std::size_t label, std::size_t feature) const {
    return weights_[label * features_.size() + feature];
  }

  const Hyperparams& hyperparams() const { return hyperparams_; }
  void set_hyperparams(const Hyperparams& hp) { hyperparams_ = hp; }
  int epochs_trained() const { return epochs_trained_; }
  void add_epochs(int n) { epochs_trained_ += n; }
  const std::vector<std::string>& provenance() const { return provenance_; }
  void append_provenance(std::string corpus_id) {
    provenance_.push_back(std::move(corpus_id));
  }

  // Appends unseen features with zero weights.
  void extend_vocabulary(const std::vector<std::string>& names);

  // Sparse input: in-vocabulary features scaled to kFeatureNorm, plus a
  // unit bias.
  std::vector<std::pair<std::size_t, double>> encode(
      const FeatureVector& features) const;
  std::vector<double> scores(const FeatureVector& features) const;

  std::string to_json() const;
  static ClassifierModel from_json(const std::string& text);

  bool operator==(const ClassifierModel&) const = default;

 private:
  Level level_ = Level::kTop;
  Featurizer featurizer_;
  std::vector<std::string> features_;
  std::unordered_map<std::string, std::size_t> feature_index_;
  std::vector<double> weights_;
  Hyperparams hyperparams_;
  int epochs_trained_ = 0;
  std::vector<std::string> provenance_;
};

void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

struct TrainResult {
  ClassifierModel model;
  // Training objective before each epoch, plus the final value.
  std::vector<double> loss_history;
  std::size_t used_count = 0;
  // Relations without a label at the requested level (11-way, top-only).
  std::size_t dropped_count = 0;
};

// Throws ValidationError with fewer than two distinct labels, or when an
// 11-way model is requested on a corpus without second-level labels.
TrainResult train(const Corpus& corpus, Level level, const Hyperparams& hp,
                  const std::string& corpus_id);

// Continues gradient descent from `model`. The vocabulary is extended with
// the corpus' new features (zero weights); the featurizer is kept. Throws
// ValidationError when the corpus has no labels in the model's space.
TrainResult continue_train(const ClassifierModel& model, const Corpus& corpus,
                           const Hyperparams& hp, const std::string& corpus_id);

// Argmax over labels; ties go to the alphabetically first label name. An
// 11-way prediction carries its parent as the top-level sense.
SenseLabel predict(const ClassifierModel& model, const Relation& rel,
                   const Document& doc);

enum class SetupKind { kEnOnTarget, kEnOnTranslation, kScratch, kCaft };

SetupKind parse_setup_kind(std::string_view name);
std::string_view to_string(SetupKind kind);

struct CorpusRef {
  std::string id;
  const Corpus* corpus = nullptr;
};

// `training` holds one corpus, or for kCaft the source-language corpus
// followed by the target-language one. `evaluation` is the gold target
// corpus, or its translation for kEnOnTranslation.
struct SetupSpec {
  SetupKind kind = SetupKind::kScratch;
  std::vector<CorpusRef> training;
  CorpusRef evaluation;
  Level level = Level::kTop;
  Hyperparams hyperparams;

  // Throws ValidationError on a missing or empty corpus or a wrong number of
  // training corpora.
  void validate() const;
};

struct PredictionRecord {
  std::string rel_id;
  std::string gold;      // at the set-up level
  std::string pred;      // at the set-up level
  std::string gold_top;
  std::string pred_top;
};

struct SetupResult {
  ClassifierModel model;
  std::vector<PredictionRecord> predictions;  // evaluable relations only
  metrics::ConfusionMatrix confusion{std::vector<std::string>{}};
  metrics::MetricsReport report;
  // 4-way view of an 11-way run: every evaluation relation, gold top sense
  // against the predicted parent.
  std::optional<metrics::ConfusionMatrix> coarsened;
  std::vector<double> loss_history;        // last training stage
  std::optional<double> target_initial_loss;  // first value on the target corpus
  std::size_t skipped_eval = 0;
};

SetupResult run_setup(const SetupSpec& spec);

// JSON-lines {"rel_id":...,"gold":...,"pred":...}; 11-way records also carry
// "pred_top".
void write_predictions(const std::vector<PredictionRecord>& records,
                       Level level, std::ostream& out);
std::vector<PredictionRecord> read_predictions(std::istream& in,
                                               const std::string& source_name);

}  // namespace disco::relclass
