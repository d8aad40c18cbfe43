#include "disco/error.hpp"
#include "internal.hpp"

namespace disco::cli {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(std::string("config field '") + key +
                          "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j,
                                             const std::filesystem::path& base) {
  if (!j.is_object()) throw ValidationError("experiment config must be an object");
  ExperimentConfig c;
  c.source_corpus = resolve(base, get_or<std::string>(j, "source_corpus", ""));
  c.source_id = get_or<std::string>(j, "source_id", c.source_id);
  c.eval_corpus = resolve(base, get_or<std::string>(j, "eval_corpus", ""));
  if (const auto t = get_or<std::string>(j, "eval_translated_corpus", ""); !t.empty()) {
    c.eval_translated_corpus = resolve(base, t);
  }
  if (const auto it = j.find("variants"); it != j.end()) {
    if (!it->is_array()) throw ValidationError("'variants' must be an array");
    for (const auto& v : *it) {
      c.variants.push_back({get_or<std::string>(v, "name", ""),
                            resolve(base, get_or<std::string>(v, "corpus", ""))});
      if (c.variants.back().name.empty()) {
        throw ValidationError("every variant needs a name");
      }
    }
  }
  const auto setups = get_or<std::vector<std::string>>(
      j, "setups", {"en_on_target", "en_on_translation", "scratch", "caft"});
  for (const auto& s : setups) c.setups.push_back(relclass::parse_setup_kind(s));
  const auto four_way = get_or<std::string>(j, "four_way", "separate");
  if (four_way != "separate" && four_way != "coarsened") {
    throw ValidationError("'four_way' must be 'separate' or 'coarsened'");
  }
  c.coarsened_four_way = four_way == "coarsened";
  if (const auto it = j.find("hyperparams"); it != j.end()) {
    c.hyperparams.learning_rate =
        get_or(*it, "learning_rate", c.hyperparams.learning_rate);
    c.hyperparams.l2 = get_or(*it, "l2", c.hyperparams.l2);
    c.hyperparams.epochs = get_or(*it, "epochs", c.hyperparams.epochs);
    c.hyperparams.decay = get_or(*it, "decay", c.hyperparams.decay);
  }
  c.hyperparams.seed = get_or<std::uint64_t>(j, "seed", c.hyperparams.seed);
  c.threads = get_or<unsigned>(j, "threads", c.threads);
  if (const auto out = get_or<std::string>(j, "output_dir", ""); !out.empty()) {
    c.output_dir = resolve(base, out);
  }
  return c;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["source_corpus"] = source_corpus.generic_string();
  j["source_id"] = source_id;
  j["eval_corpus"] = eval_corpus.generic_string();
  if (eval_translated_corpus) {
    j["eval_translated_corpus"] = eval_translated_corpus->generic_string();
  }
  Json vs = Json::array();
  for (const auto& v : variants) {
    vs.push_back({{"name", v.name}, {"corpus", v.corpus.generic_string()}});
  }
  j["variants"] = std::move(vs);
  Json ss = Json::array();
  for (const auto s : setups) ss.push_back(relclass::to_string(s));
  j["setups"] = std::move(ss);
  j["four_way"] = coarsened_four_way ? "coarsened" : "separate";
  j["hyperparams"] = {{"learning_rate", hyperparams.learning_rate},
                      {"l2", hyperparams.l2},
                      {"epochs", hyperparams.epochs},
                      {"decay", hyperparams.decay}};
  j["seed"] = hyperparams.seed;
  return j;
}

}  // namespace disco::cli
