#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "disco/error.hpp"
#include "disco/relclass.hpp"
#include "json.hpp"

namespace disco::relclass {

using Json = nlohmann::ordered_json;

ClassifierModel::ClassifierModel(Level level, Featurizer featurizer,
                                 std::vector<std::string> features,
                                 Hyperparams hyperparams)
    : level_(level),
      featurizer_(std::move(featurizer)),
      hyperparams_(hyperparams) {
  features_.emplace_back(kBiasFeature);
  feature_index_.emplace(kBiasFeature, 0);
  weights_.assign(labels().size(), 0.0);
  extend_vocabulary(features);
}

std::optional<std::size_t> ClassifierModel::feature_id(
    const std::string& name) const {
  const auto it = feature_index_.find(name);
  if (it == feature_index_.end()) return std::nullopt;
  return it->second;
}

void ClassifierModel::extend_vocabulary(const std::vector<std::string>& names) {
  std::vector<std::string> fresh;
  for (const auto& n : names) {
    if (!feature_index_.count(n)) fresh.push_back(n);
  }
  std::sort(fresh.begin(), fresh.end());
  fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
  if (fresh.empty()) return;
  const std::size_t old_f = features_.size();
  const std::size_t new_f = old_f + fresh.size();
  std::vector<double> w(labels().size() * new_f, 0.0);
  for (std::size_t y = 0; y < labels().size(); ++y) {
    std::copy_n(weights_.begin() + static_cast<std::ptrdiff_t>(y * old_f), old_f,
                w.begin() + static_cast<std::ptrdiff_t>(y * new_f));
  }
  weights_ = std::move(w);
  for (auto& n : fresh) {
    feature_index_.emplace(n, features_.size());
    features_.push_back(std::move(n));
  }
}

std::vector<std::pair<std::size_t, double>> ClassifierModel::encode(
    const FeatureVector& features) const {
  std::vector<std::pair<std::size_t, double>> x;
  double norm2 = 0.0;
  for (const auto& [name, value] : features) {
    if (const auto id = feature_id(name)) {
      x.emplace_back(*id, value);
      norm2 += value * value;
    }
  }
  if (norm2 > 0.0) {
    const double inv = kFeatureNorm / std::sqrt(norm2);
    for (auto& [id, v] : x) v *= inv;
  }
  x.emplace_back(0, 1.0);  // bias
  std::sort(x.begin(), x.end());
  return x;
}

std::vector<double> ClassifierModel::scores(const FeatureVector& features) const {
  const auto x = encode(features);
  std::vector<double> s(labels().size(), 0.0);
  for (std::size_t y = 0; y < s.size(); ++y) {
    for (const auto& [id, v] : x) s[y] += weight(y, id) * v;
  }
  return s;
}

std::string ClassifierModel::to_json() const {
  Json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["level"] = static_cast<int>(level_);
  j["labels"] = labels();
  Json hp;
  hp["learning_rate"] = hyperparams_.learning_rate;
  hp["l2"] = hyperparams_.l2;
  hp["epochs"] = hyperparams_.epochs;
  hp["seed"] = hyperparams_.seed;
  hp["decay"] = hyperparams_.decay;
  j["hyperparams"] = std::move(hp);
  j["epochs_trained"] = epochs_trained_;
  j["provenance"] = provenance_;
  Json fz;
  fz["top_k"] = featurizer_.top_k();
  fz["arg1_top"] = featurizer_.arg1_top();
  fz["arg2_top"] = featurizer_.arg2_top();
  j["featurizer"] = std::move(fz);
  j["features"] = features_;
  Json weights;
  for (std::size_t y = 0; y < labels().size(); ++y) {
    Json row = Json::array();
    for (std::size_t f = 0; f < features_.size(); ++f) {
      const double w = weight(y, f);
      if (w != 0.0) row.push_back(Json::array({f, w}));
    }
    weights[labels()[y]] = std::move(row);
  }
  j["weights"] = std::move(weights);
  return j.dump() + "\n";
}

ClassifierModel ClassifierModel::from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) {
      throw ValidationError("not a classifier model file");
    }
    if (j.at("version").get<int>() != kVersion) {
      throw ValidationError("unsupported model version " +
                            std::to_string(j.at("version").get<int>()));
    }
    const Level level = level_from_int(j.at("level").get<int>());
    if (j.at("labels").get<std::vector<std::string>>() != label_space(level)) {
      throw ValidationError("model labels do not match the " +
                            std::to_string(static_cast<int>(level)) +
                            "-way label space");
    }
    const Json& hpj = j.at("hyperparams");
    Hyperparams hp;
    hp.learning_rate = hpj.at("learning_rate").get<double>();
    hp.l2 = hpj.at("l2").get<double>();
    hp.epochs = hpj.at("epochs").get<int>();
    hp.seed = hpj.at("seed").get<std::uint64_t>();
    hp.decay = hpj.at("decay").get<double>();
    const Json& fz = j.at("featurizer");
    Featurizer featurizer(fz.at("top_k").get<std::size_t>(),
                          fz.at("arg1_top").get<std::vector<std::string>>(),
                          fz.at("arg2_top").get<std::vector<std::string>>());
    auto features = j.at("features").get<std::vector<std::string>>();
    if (features.empty() || features.front() != kBiasFeature) {
      throw ValidationError("model vocabulary must start with the bias feature");
    }
    ClassifierModel model(level, std::move(featurizer), {}, hp);
    // Keep the stored feature order; ids index the weight rows.
    model.features_ = std::move(features);
    model.feature_index_.clear();
    for (std::size_t f = 0; f < model.features_.size(); ++f) {
      if (!model.feature_index_.emplace(model.features_[f], f).second) {
        throw ValidationError("duplicate feature '" + model.features_[f] + "'");
      }
    }
    model.weights_.assign(model.labels().size() * model.features_.size(), 0.0);
    const Json& weights = j.at("weights");
    for (std::size_t y = 0; y < model.labels().size(); ++y) {
      for (const auto& entry : weights.at(model.labels()[y])) {
        const auto f = entry.at(0).get<std::size_t>();
        if (f >= model.features_.size()) {
          throw ValidationError("weight refers to unknown feature id " +
                                std::to_string(f));
        }
        model.weights_[y * model.features_.size() + f] = entry.at(1).get<double>();
      }
    }
    model.epochs_trained_ = j.at("epochs_trained").get<int>();
    model.provenance_ = j.at("provenance").get<std::vector<std::string>>();
    return model;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const ClassifierModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << model.to_json();
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ClassifierModel::from_json(buf.str());
}

}  // namespace disco::relclass
