#include <istream>
#include <ostream>

#include "disco/error.hpp"
#include "disco/relclass.hpp"
#include "disco/relclass_objective.hpp"
#include "json.hpp"

namespace disco::relclass {

SetupKind parse_setup_kind(std::string_view name) {
  if (name == "en_on_target") return SetupKind::kEnOnTarget;
  if (name == "en_on_translation") return SetupKind::kEnOnTranslation;
  if (name == "scratch") return SetupKind::kScratch;
  if (name == "caft") return SetupKind::kCaft;
  throw ValidationError("unknown set-up '" + std::string(name) + "'");
}

std::string_view to_string(SetupKind kind) {
  switch (kind) {
    case SetupKind::kEnOnTarget:
      return "en_on_target";
    case SetupKind::kEnOnTranslation:
      return "en_on_translation";
    case SetupKind::kScratch:
      return "scratch";
    case SetupKind::kCaft:
      return "caft";
  }
  return "unknown";
}

void SetupSpec::validate() const {
  const std::size_t expected = kind == SetupKind::kCaft ? 2 : 1;
  const std::string name(to_string(kind));
  if (training.size() != expected) {
    throw ValidationError(name + " needs " + std::to_string(expected) +
                          " training corpus/corpora, got " +
                          std::to_string(training.size()));
  }
  for (const auto& ref : training) {
    if (!ref.corpus) {
      throw ValidationError(name + ": training corpus '" + ref.id + "' is missing");
    }
    if (ref.corpus->relations().empty()) {
      throw ValidationError(name + ": training corpus '" + ref.id +
                            "' has no relations");
    }
  }
  if (!evaluation.corpus) {
    throw ValidationError(name + ": evaluation corpus '" + evaluation.id +
                          "' is missing");
  }
}

SetupResult run_setup(const SetupSpec& spec) {
  spec.validate();
  SetupResult result;
  const auto& first = spec.training.front();
  TrainResult trained = train(*first.corpus, spec.level, spec.hyperparams, first.id);
  if (spec.kind == SetupKind::kScratch) {
    result.target_initial_loss = trained.loss_history.front();
  }
  if (spec.kind == SetupKind::kCaft) {
    const auto& target = spec.training[1];
    trained = continue_train(trained.model, *target.corpus, spec.hyperparams,
                             target.id);
    result.target_initial_loss = trained.loss_history.front();
  }
  result.model = std::move(trained.model);
  result.loss_history = std::move(trained.loss_history);

  const Corpus& eval = *spec.evaluation.corpus;
  const auto& labels = result.model.labels();
  result.confusion = metrics::ConfusionMatrix(labels);
  if (spec.level == Level::kSecond) {
    result.coarsened.emplace(label_space(Level::kTop));
  }
  for (const auto& rel : eval.relations()) {
    const SenseLabel pred = predict(result.model, rel, eval.document_of(rel));
    const std::string gold_top(to_string(rel.sense.top()));
    const std::string pred_top(to_string(pred.top()));
    if (result.coarsened) result.coarsened->add(gold_top, pred_top);
    const auto gold = rel.sense.label_at(spec.level);
    if (!gold) {
      ++result.skipped_eval;
      continue;
    }
    const std::string pred_name = *pred.label_at(spec.level);
    result.confusion.add(*gold, pred_name);
    result.predictions.push_back({rel.rel_id, *gold, pred_name, gold_top, pred_top});
  }
  if (result.confusion.total() > 0) result.report = metrics::score(result.confusion);
  return result;
}

void write_predictions(const std::vector<PredictionRecord>& records,
                       Level level, std::ostream& out) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["rel_id"] = r.rel_id;
    j["gold"] = r.gold;
    j["pred"] = r.pred;
    if (level == Level::kSecond) j["pred_top"] = r.pred_top;
    out << j.dump() << '\n';
  }
}

std::vector<PredictionRecord> read_predictions(std::istream& in,
                                               const std::string& source_name) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      PredictionRecord r;
      r.rel_id = j.at("rel_id").get<std::string>();
      r.gold = j.at("gold").get<std::string>();
      r.pred = j.at("pred").get<std::string>();
      r.pred_top = j.value("pred_top", std::string());
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(source_name, line_no, e.what());
    }
  }
  return out;
}

}  // namespace disco::relclass
