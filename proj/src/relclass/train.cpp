#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "disco/error.hpp"
#include "disco/relclass_objective.hpp"
#include "disco/util/parallel.hpp"

namespace disco::relclass {
namespace {

std::size_t label_index(const ClassifierModel& model, const std::string& name) {
  const auto& labels = model.labels();
  return static_cast<std::size_t>(
      std::find(labels.begin(), labels.end(), name) - labels.begin());
}

// One pass of per-example updates w <- (1 - lr*l2) w - lr * grad_i, in
// `order`. Weights are kept as scale * v so the L2 shrink is O(1) per step.
void sgd_pass(std::vector<double>& w, const Dataset& data,
              const std::vector<std::size_t>& order, double lr, double l2) {
  const std::size_t nf = data.num_features;
  const std::size_t nl = data.num_labels;
  std::vector<double> v = w;
  double scale = 1.0;
  const double shrink = 1.0 - lr * l2;
  std::vector<double> score(nl);
  for (const std::size_t n : order) {
    const Example& ex = data.examples[n];
    double best = -INFINITY;
    for (std::size_t y = 0; y < nl; ++y) {
      double s = 0.0;
      for (const auto& [id, x] : ex.x) s += v[y * nf + id] * x;
      score[y] = s * scale;
      best = std::max(best, score[y]);
    }
    double z = 0.0;
    for (std::size_t y = 0; y < nl; ++y) z += std::exp(score[y] - best);
    const double lse = best + std::log(z);
    scale *= shrink;
    if (scale < 1e-6) {
      for (double& x : v) x *= scale;
      scale = 1.0;
    }
    for (std::size_t y = 0; y < nl; ++y) {
      const double coef = std::exp(score[y] - lse) - (y == ex.label ? 1.0 : 0.0);
      const double step = lr * coef / scale;
      for (const auto& [id, x] : ex.x) v[y * nf + id] -= step * x;
    }
  }
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = v[k] * scale;
}

// Epochs of shuffled SGD with lr / (1 + decay * epoch). An epoch that raises
// the objective is retried from its start with half the step; after
// kRetries it falls back to one full-batch step, or to no change.
std::vector<double> descend(ClassifierModel& model, const Dataset& data,
                            const Hyperparams& hp) {
  constexpr int kRetries = 6;
  std::vector<double> history;
  std::vector<double>& w = model.mutable_weights();
  const unsigned threads = util::resolve_threads(hp.threads);
  std::mt19937_64 rng(hp.seed);
  std::vector<std::size_t> order(data.examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double current = objective(w, data, hp.l2, nullptr, threads);
  std::vector<double> trial;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    history.push_back(current);
    std::shuffle(order.begin(), order.end(), rng);
    double lr = hp.learning_rate / (1.0 + hp.decay * epoch);
    bool accepted = false;
    for (int attempt = 0; attempt <= kRetries && !accepted; ++attempt, lr *= 0.5) {
      trial = w;
      sgd_pass(trial, data, order, lr, hp.l2);
      const double f = objective(trial, data, hp.l2, nullptr, threads);
      if (f <= current) {
        w.swap(trial);
        current = f;
        accepted = true;
      }
    }
    if (!accepted) {
      std::vector<double> grad;
      objective(w, data, hp.l2, &grad, threads);
      trial = w;
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] -= lr * grad[k];
      const double f = objective(trial, data, hp.l2, nullptr, threads);
      if (f <= current) {
        w.swap(trial);
        current = f;
      }
    }
  }
  history.push_back(current);
  return history;
}

std::vector<std::string> corpus_features(const Featurizer& featurizer,
                                         const Corpus& corpus, Level level) {
  std::set<std::string> names;
  for (const auto& rel : corpus.relations()) {
    if (!rel.sense.label_at(level)) continue;
    for (auto& [name, v] : featurizer.featurize(rel, corpus.document_of(rel))) {
      names.insert(name);
    }
  }
  return {names.begin(), names.end()};
}

void check_epochs(const Hyperparams& hp) {
  if (hp.epochs < 0) throw ValidationError("epochs must be non-negative");
  if (hp.learning_rate < 0.0) {
    throw ValidationError("learning rate must be non-negative");
  }
}

}  // namespace

double objective(const std::vector<double>& weights, const Dataset& data,
                 double l2, std::vector<double>* gradient, unsigned threads) {
  const std::size_t nf = data.num_features;
  const std::size_t nl = data.num_labels;
  const auto bounds = util::shard_bounds(data.examples.size(), threads);
  const std::size_t shards = bounds.size() - 1;
  std::vector<double> shard_loss(shards, 0.0);
  std::vector<std::vector<double>> shard_grad(shards);
  util::for_each_shard(bounds, [&](std::size_t s, std::size_t b, std::size_t e) {
    std::vector<double>& g = shard_grad[s];
    if (gradient) g.assign(nl * nf, 0.0);
    std::vector<double> score(nl);
    double loss = 0.0;
    for (std::size_t n = b; n < e; ++n) {
      const Example& ex = data.examples[n];
      double best = -INFINITY;
      for (std::size_t y = 0; y < nl; ++y) {
        double v = 0.0;
        for (const auto& [id, x] : ex.x) v += weights[y * nf + id] * x;
        score[y] = v;
        best = std::max(best, v);
      }
      double z = 0.0;
      for (std::size_t y = 0; y < nl; ++y) z += std::exp(score[y] - best);
      const double lse = best + std::log(z);
      loss += lse - score[ex.label];
      if (!gradient) continue;
      for (std::size_t y = 0; y < nl; ++y) {
        const double coef =
            std::exp(score[y] - lse) - (y == ex.label ? 1.0 : 0.0);
        for (const auto& [id, x] : ex.x) g[y * nf + id] += coef * x;
      }
    }
    shard_loss[s] = loss;
  });

  const double inv_n =
      data.examples.empty() ? 0.0 : 1.0 / static_cast<double>(data.examples.size());
  double loss = 0.0;
  for (const double l : shard_loss) loss += l;
  loss *= inv_n;
  double norm2 = 0.0;
  for (const double w : weights) norm2 += w * w;
  loss += 0.5 * l2 * norm2;
  if (gradient) {
    gradient->assign(nl * nf, 0.0);
    for (const auto& g : shard_grad) {
      for (std::size_t k = 0; k < g.size(); ++k) (*gradient)[k] += g[k];
    }
    for (std::size_t k = 0; k < gradient->size(); ++k) {
      (*gradient)[k] = (*gradient)[k] * inv_n + l2 * weights[k];
    }
  }
  return loss;
}

Dataset encode_corpus(const ClassifierModel& model, const Corpus& corpus,
                      std::size_t* dropped) {
  Dataset data;
  data.num_labels = model.labels().size();
  data.num_features = model.num_features();
  std::size_t skipped = 0;
  for (const auto& rel : corpus.relations()) {
    const auto label = rel.sense.label_at(model.level());
    if (!label) {
      ++skipped;
      continue;
    }
    data.examples.push_back(
        {model.encode(model.featurizer().featurize(rel, corpus.document_of(rel))),
         label_index(model, *label)});
  }
  if (dropped) *dropped = skipped;
  return data;
}

TrainResult train(const Corpus& corpus, Level level, const Hyperparams& hp,
                  const std::string& corpus_id) {
  check_epochs(hp);
  std::set<std::string> distinct;
  std::size_t usable = 0;
  for (const auto& rel : corpus.relations()) {
    if (const auto label = rel.sense.label_at(level)) {
      distinct.insert(*label);
      ++usable;
    }
  }
  if (level == Level::kSecond && usable == 0 && !corpus.relations().empty()) {
    throw ValidationError("11-way training needs second-level labels; corpus '" +
                          corpus_id + "' has only top-level senses");
  }
  if (distinct.size() < 2) {
    throw ValidationError("corpus '" + corpus_id + "' has " +
                          std::to_string(distinct.size()) +
                          " distinct label(s); training needs at least 2");
  }
  Featurizer featurizer = Featurizer::fit(corpus);
  auto features = corpus_features(featurizer, corpus, level);
  TrainResult result;
  result.model = ClassifierModel(level, std::move(featurizer), features, hp);
  result.model.append_provenance(corpus_id);
  const Dataset data = encode_corpus(result.model, corpus, &result.dropped_count);
  result.used_count = data.examples.size();
  result.loss_history = descend(result.model, data, hp);
  result.model.add_epochs(hp.epochs);
  return result;
}

TrainResult continue_train(const ClassifierModel& model, const Corpus& corpus,
                           const Hyperparams& hp, const std::string& corpus_id) {
  check_epochs(hp);
  TrainResult result;
  result.model = model;
  if (hp.epochs > 0) {
    result.model.extend_vocabulary(
        corpus_features(model.featurizer(), corpus, model.level()));
    result.model.set_hyperparams(hp);
  }
  const Dataset data = encode_corpus(result.model, corpus, &result.dropped_count);
  if (data.examples.empty()) {
    throw ValidationError("corpus '" + corpus_id + "' has no labels in the " +
                          std::to_string(static_cast<int>(model.level())) +
                          "-way label space of the model");
  }
  result.used_count = data.examples.size();
  result.loss_history = descend(result.model, data, hp);
  result.model.add_epochs(hp.epochs);
  result.model.append_provenance(corpus_id);
  return result;
}

SenseLabel predict(const ClassifierModel& model, const Relation& rel,
                   const Document& doc) {
  const auto scores = model.scores(model.featurizer().featurize(rel, doc));
  const auto& labels = model.labels();
  std::vector<std::size_t> order(labels.size());
  for (std::size_t y = 0; y < order.size(); ++y) order[y] = y;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  std::size_t best = order.front();
  for (const std::size_t y : order) {
    if (scores[y] > scores[best]) best = y;
  }
  return sense_from_level_label(labels[best], model.level());
}

}  // namespace disco::relclass
