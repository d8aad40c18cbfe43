#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "disco/corpus_io.hpp"
#include "disco/error.hpp"
#include "disco/util/parallel.hpp"
#include "internal.hpp"

namespace disco::cli {
namespace {

using relclass::SetupKind;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
}

struct LoadedInputs {
  Corpus source;
  Corpus eval;
  std::optional<Corpus> eval_translated;
  std::vector<Corpus> variants;
};

struct Cell {
  SetupKind setup;
  std::size_t variant = 0;
  std::string dir;  // relative to the run directory
  ExperimentRow row;
  std::vector<std::string> files;  // relative to the run directory
};

bool uses_variant(SetupKind kind) {
  return kind == SetupKind::kScratch || kind == SetupKind::kCaft;
}

relclass::SetupSpec make_spec(const ExperimentConfig& config,
                              const LoadedInputs& in, const Cell& cell,
                              Level level) {
  relclass::SetupSpec spec;
  spec.kind = cell.setup;
  spec.level = level;
  spec.hyperparams = config.hyperparams;
  spec.hyperparams.threads = 1;
  const relclass::CorpusRef source{config.source_id, &in.source};
  const auto& variant = config.variants.at(cell.variant);
  const relclass::CorpusRef target{variant.name,
                                   uses_variant(cell.setup)
                                       ? &in.variants.at(cell.variant)
                                       : nullptr};
  spec.evaluation = {"eval", &in.eval};
  switch (cell.setup) {
    case SetupKind::kEnOnTarget:
      spec.training = {source};
      break;
    case SetupKind::kEnOnTranslation:
      spec.training = {source};
      if (!in.eval_translated) {
        throw ValidationError(
            "en_on_translation needs 'eval_translated_corpus' in the config");
      }
      spec.evaluation = {"eval_translated", &*in.eval_translated};
      break;
    case SetupKind::kScratch:
      spec.training = {target};
      break;
    case SetupKind::kCaft:
      spec.training = {source, target};
      break;
  }
  return spec;
}

Json loss_json(const relclass::SetupResult& r) {
  Json j;
  j["loss_history"] = r.loss_history;
  j["final_loss"] = r.loss_history.empty() ? 0.0 : r.loss_history.back();
  if (r.target_initial_loss) j["target_initial_loss"] = *r.target_initial_loss;
  j["provenance"] = r.model.provenance();
  return j;
}

void record_level(const relclass::SetupResult& r, Level level,
                  const std::filesystem::path& root, Cell& cell, Json& training) {
  const std::string tag = level == Level::kTop ? "4" : "11";
  const std::size_t slot = level == Level::kTop ? 0 : 1;
  const auto add = [&](const std::string& name, const std::string& text) {
    write_text(root / cell.dir / name, text);
    cell.files.push_back(cell.dir + "/" + name);
  };

  std::ostringstream preds;
  relclass::write_predictions(r.predictions, level, preds);
  add("predictions_" + tag + ".jsonl", preds.str());
  add("confusion_" + tag + ".csv", r.confusion.to_csv());
  add("model_" + tag + ".json", r.model.to_json());
  if (r.confusion.total() > 0) {
    add("metrics_" + tag + ".json", r.report.to_json());
    cell.row.f1[slot] = r.report.macro_f1;
    cell.row.accuracy[slot] = r.report.accuracy;
    cell.row.evaluated[slot] = r.report.evaluated_count;
  }
  Json lj = loss_json(r);
  lj["skipped_eval"] = r.skipped_eval;
  training[tag + "-way"] = std::move(lj);

  if (level == Level::kSecond && r.coarsened && r.coarsened->total() > 0) {
    add("confusion_4_coarsened.csv", r.coarsened->to_csv());
  }
}

void run_cell(const ExperimentConfig& config, const LoadedInputs& in,
              const std::filesystem::path& root, Cell& cell) {
  std::filesystem::create_directories(root / cell.dir);
  Json training = Json::object();
  const auto second = relclass::run_setup(make_spec(config, in, cell, Level::kSecond));
  if (config.coarsened_four_way) {
    if (second.coarsened && second.coarsened->total() > 0) {
      const auto coarse = metrics::score(*second.coarsened);
      cell.row.f1[0] = coarse.macro_f1;
      cell.row.accuracy[0] = coarse.accuracy;
      cell.row.evaluated[0] = coarse.evaluated_count;
      write_text(root / cell.dir / "metrics_4.json", coarse.to_json());
      cell.files.push_back(cell.dir + "/metrics_4.json");
    }
    cell.row.four_way_source = "coarsened";
  } else {
    const auto top = relclass::run_setup(make_spec(config, in, cell, Level::kTop));
    record_level(top, Level::kTop, root, cell, training);
  }
  record_level(second, Level::kSecond, root, cell, training);
  write_text(root / cell.dir / "training.json", training.dump(2) + "\n");
  cell.files.push_back(cell.dir + "/training.json");
}

}  // namespace

std::string Improvement::to_string() const {
  const double pct = relative * 100.0;
  return std::string(level == Level::kTop ? "4-way" : "11-way") +
         ": best " + fixed(best, 3) + " (" + best_cell + ") vs baseline " +
         fixed(baseline, 3) + " (en_on_target): " + (pct >= 0 ? "+" : "") +
         fixed(pct, 2) + "%";
}

std::vector<Improvement> relative_improvements(
    const std::vector<ExperimentRow>& rows) {
  std::vector<Improvement> out;
  for (const std::size_t slot : {std::size_t{0}, std::size_t{1}}) {
    const ExperimentRow* baseline = nullptr;
    const ExperimentRow* best = nullptr;
    for (const auto& r : rows) {
      if (!r.ok || r.evaluated[slot] == 0) continue;
      if (r.setup == "en_on_target") {
        if (!baseline) baseline = &r;
      } else if (!best || r.f1[slot] > best->f1[slot]) {
        best = &r;
      }
    }
    if (!baseline || !best || baseline->f1[slot] <= 0.0) continue;
    Improvement imp;
    imp.level = slot == 0 ? Level::kTop : Level::kSecond;
    imp.baseline = baseline->f1[slot];
    imp.best = best->f1[slot];
    imp.best_cell = best->setup + "/" + best->variant;
    imp.relative = (imp.best - imp.baseline) / imp.baseline;
    out.push_back(imp);
  }
  return out;
}

std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = "setup,variant,status,f1_4,acc_4,n_4,f1_11,acc_11,n_11,four_way_source\n";
  for (const auto& r : rows) {
    out += r.setup + "," + r.variant + "," + r.status;
    for (const std::size_t slot : {std::size_t{0}, std::size_t{1}}) {
      if (r.ok) {
        out += "," + fixed(r.f1[slot], 6) + "," + fixed(r.accuracy[slot], 6) +
               "," + std::to_string(r.evaluated[slot]);
      } else {
        out += ",,,";
      }
    }
    out += "," + r.four_way_source + "\n";
  }
  return out;
}

int run_experiment(const ExperimentConfig& config, bool force,
                   std::ostream& out, std::ostream& err) {
  require_file(config.source_corpus, "source corpus");
  require_file(config.eval_corpus, "evaluation corpus");
  if (config.eval_translated_corpus) {
    require_file(*config.eval_translated_corpus, "translated evaluation corpus");
  }
  if (config.variants.empty()) throw ValidationError("config lists no variants");
  if (config.setups.empty()) throw ValidationError("config lists no setups");
  for (const auto& v : config.variants) require_file(v.corpus, "variant corpus");

  LoadedInputs in;
  in.source = read_corpus(config.source_corpus);
  in.eval = read_corpus(config.eval_corpus);
  if (config.eval_translated_corpus) {
    in.eval_translated = read_corpus(*config.eval_translated_corpus);
  }
  for (const auto& v : config.variants) in.variants.push_back(read_corpus(v.corpus));

  RunDirectory dir(config.output_dir, force);
  std::vector<Cell> cells;
  for (const auto setup : config.setups) {
    for (std::size_t v = 0; v < config.variants.size(); ++v) {
      Cell c{setup, v, {}, {}, {}};
      c.row.setup = relclass::to_string(setup);
      c.row.variant = config.variants[v].name;
      c.dir = "cells/" + c.row.setup + "__" + c.row.variant;
      cells.push_back(std::move(c));
    }
  }

  const unsigned workers = util::resolve_threads(config.threads);
  std::mutex log_mu;
  util::for_each_shard(util::shard_bounds(cells.size(), workers),
                       [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Cell& cell = cells[i];
      try {
        run_cell(config, in, dir.path(), cell);
      } catch (const std::exception& e) {
        cell.row.ok = false;
        cell.row.status = "failed";
        cell.files.clear();
        std::lock_guard lock(log_mu);
        err << "cell " << cell.row.setup << "/" << cell.row.variant
            << " failed: " << e.what() << '\n';
      }
    }
  });

  std::vector<ExperimentRow> rows;
  std::vector<std::string> outputs = {"results.csv", "improvements.txt"};
  for (const auto& c : cells) {
    rows.push_back(c.row);
    outputs.insert(outputs.end(), c.files.begin(), c.files.end());
  }
  const std::string csv = experiment_csv(rows);
  write_text(dir.file("results.csv"), csv);
  std::string improvements;
  for (const auto& imp : relative_improvements(rows)) {
    improvements += imp.to_string() + "\n";
  }
  write_text(dir.file("improvements.txt"), improvements);

  std::vector<std::pair<std::string, std::filesystem::path>> inputs = {
      {"source_corpus", config.source_corpus}, {"eval_corpus", config.eval_corpus}};
  if (config.eval_translated_corpus) {
    inputs.emplace_back("eval_translated_corpus", *config.eval_translated_corpus);
  }
  for (const auto& v : config.variants) inputs.emplace_back("variant:" + v.name, v.corpus);
  write_manifest(dir, "experiment", config.to_json(), inputs, outputs);
  dir.commit();

  out << csv << improvements;
  const bool any_failed =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.ok; });
  return any_failed ? 1 : 0;
}

}  // namespace disco::cli
