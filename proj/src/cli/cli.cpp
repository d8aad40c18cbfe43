#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "disco/corpus_io.hpp"
#include "disco/error.hpp"
#include "disco/metrics.hpp"
#include "disco/projection.hpp"
#include "disco/synth.hpp"
#include "disco/util/parallel.hpp"
#include "internal.hpp"

namespace disco::cli {
namespace {

namespace fs = std::filesystem;
using projection::Method;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}

std::vector<std::string> surfaces(const Document& doc) {
  std::vector<std::string> out;
  out.reserve(doc.size());
  for (const auto& t : doc.tokens()) out.push_back(t.surface);
  return out;
}

// Tab-separated "source<TAB>target" lines, tokenized like documents.
std::vector<align::SentencePair> read_pairs(const fs::path& path, bool reverse) {
  require_file(path, "pairs file");
  std::ifstream in(path, std::ios::binary);
  std::vector<align::SentencePair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError(path.string(), line_no, "expected source<TAB>target");
    }
    align::SentencePair p{surfaces(Document("", line.substr(0, tab))),
                          surfaces(Document("", line.substr(tab + 1)))};
    if (reverse) std::swap(p.source, p.target);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<align::AlignmentSet> align_native(
    std::span<const projection::UnitRequest> units, int iterations,
    align::Heuristic heuristic, unsigned threads) {
  std::vector<align::AlignmentSet> out;
  if (units.empty()) return out;
  std::vector<align::SentencePair> fwd, bwd;
  for (const auto& u : units) {
    fwd.push_back({surfaces(u.source), surfaces(u.target)});
    bwd.push_back({fwd.back().target, fwd.back().source});
  }
  align::Ibm1Options opt;
  opt.iterations = iterations;
  opt.threads = threads;
  const auto f = align::train_ibm1(fwd, opt);
  const auto b = align::train_ibm1(bwd, opt);
  for (std::size_t i = 0; i < units.size(); ++i) {
    auto forward = align::viterbi_align(f.table, fwd[i].source, fwd[i].target,
                                        units[i].unit_id);
    auto backward = align::viterbi_align(b.table, bwd[i].source, bwd[i].target,
                                         units[i].unit_id)
                        .transposed();
    out.push_back(align::symmetrize(forward, backward, heuristic));
  }
  return out;
}

struct ProjectOptions {
  std::string config;
  std::string corpus;
  std::string translations;
  std::string method;
  std::string aligner;
  std::string alignments;
  std::string heuristic;
  int iterations = 0;
  std::string out_dir;
  bool force = false;
  unsigned threads = 0;
  bool threads_set = false;
};

// Config values first, then flags that were given.
Json project_config(const ProjectOptions& o, fs::path* out_dir) {
  Json file = Json::object();
  fs::path base;
  if (!o.config.empty()) {
    file = load_config(o.config);
    base = fs::path(o.config).parent_path();
  }
  const auto path_of = [&](const char* key, const std::string& flag) -> std::string {
    if (!flag.empty()) return flag;
    const auto v = file.value(key, std::string());
    if (v.empty()) return v;
    const fs::path p(v);
    return (p.is_absolute() || base.empty() ? p : base / p).generic_string();
  };
  const auto value_of = [&](const char* key, const std::string& flag,
                            const char* fallback) -> std::string {
    if (!flag.empty()) return flag;
    return file.value(key, std::string(fallback));
  };
  Json c;
  c["corpus"] = path_of("corpus", o.corpus);
  c["translations"] = path_of("translations", o.translations);
  c["method"] = value_of("method", o.method, "");
  std::string aligner = value_of("aligner", o.aligner, "");
  const std::string alignments = path_of("alignments", o.alignments);
  if (aligner.empty()) aligner = alignments.empty() ? "native-ibm1" : "external";
  c["aligner"] = aligner;
  if (aligner == "external") {
    c["alignments"] = alignments;
  } else if (aligner == "native-ibm1") {
    c["iterations"] = o.iterations > 0 ? o.iterations : file.value("iterations", 5);
    c["heuristic"] = value_of("heuristic", o.heuristic, "gdfa");
  } else {
    throw ValidationError("unknown aligner '" + aligner +
                          "' (expected native-ibm1 or external)");
  }
  c["threads"] = o.threads_set ? o.threads : file.value("threads", 1u);
  *out_dir = path_of("output_dir", o.out_dir);
  return c;
}

int cmd_project(const ProjectOptions& o, std::ostream& out) {
  fs::path out_dir;
  const Json c = project_config(o, &out_dir);
  const fs::path corpus_path = c["corpus"].get<std::string>();
  const fs::path trans_path = c["translations"].get<std::string>();
  require_file(corpus_path, "corpus");
  require_file(trans_path, "translations");
  const Method method = projection::parse_method(c["method"].get<std::string>());
  const bool external = c["aligner"] == "external";
  if (external) require_file(c["alignments"].get<std::string>(), "alignments");
  std::optional<align::Heuristic> heuristic;
  if (!external) heuristic = align::parse_heuristic(c["heuristic"].get<std::string>());
  if (out_dir.empty()) throw ValidationError("--out-dir is required");

  const Corpus source = read_corpus(corpus_path);
  const auto translations = projection::read_translations(trans_path);
  const auto units = projection::enumerate_units(source, method, translations);
  const unsigned threads = util::resolve_threads(c["threads"].get<unsigned>());
  std::vector<align::AlignmentSet> alignments;
  if (external) {
    const auto shapes = projection::unit_shapes(units);
    alignments = align::load_external_alignments(
        fs::path(c["alignments"].get<std::string>()), shapes);
  } else {
    alignments = align_native(units, c["iterations"].get<int>(), *heuristic, threads);
  }
  const auto result = projection::build_corpus(source, method, translations,
                                               alignments, {threads});

  RunDirectory dir(out_dir, o.force);
  write_corpus(result.corpus, dir.file("corpus.jsonl"));
  {
    auto f = open_out(dir.file("loss_report.json"));
    f << result.report.to_json() << '\n';
  }
  align::write_pharaoh_file(alignments, dir.file("alignments.txt"));
  std::vector<std::pair<std::string, fs::path>> inputs = {
      {"corpus", corpus_path}, {"translations", trans_path}};
  if (external) inputs.emplace_back("alignments", c["alignments"].get<std::string>());
  write_manifest(dir, "project", c, inputs,
                 {"corpus.jsonl", "loss_report.json", "alignments.txt"});
  dir.commit();
  out << result.report.to_json() << '\n';
  return 0;
}

relclass::Hyperparams hyperparams_from(double lr, double l2, int epochs,
                                       std::uint64_t seed, unsigned threads) {
  relclass::Hyperparams hp;
  hp.learning_rate = lr;
  hp.l2 = l2;
  hp.epochs = epochs;
  hp.seed = seed;
  hp.threads = util::resolve_threads(threads);
  if (lr < 0 || l2 < 0 || epochs < 0) {
    throw ValidationError("hyperparameters must be non-negative");
  }
  return hp;
}

std::string corpus_id_or(const std::string& id, const std::string& path) {
  return id.empty() ? fs::path(path).stem().string() : id;
}

void print_loss(const relclass::TrainResult& r, std::ostream& out) {
  out << "relations used: " << r.used_count << ", dropped: " << r.dropped_count
      << "\nloss: " << r.loss_history.front() << " -> " << r.loss_history.back()
      << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Cross-lingual discourse relation projection and classification",
               std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  std::function<int()> action;

  // align
  auto* align_cmd = app.add_subcommand("align", "IBM Model 1 word alignment");
  align_cmd->require_subcommand(1);
  std::string pairs, table_path, out_path, forward, backward, heuristic = "gdfa";
  int iters = 5;
  bool no_null = false, reverse = false, transpose_backward = false;
  unsigned threads = 1;

  auto* a_train = align_cmd->add_subcommand("train", "Train a translation table");
  a_train->add_option("--pairs", pairs, "source<TAB>target lines")->required();
  a_train->add_option("--iters", iters, "EM iterations")->check(CLI::PositiveNumber);
  a_train->add_flag("--no-null", no_null, "Omit the NULL source word");
  a_train->add_flag("--reverse", reverse, "Swap source and target");
  a_train->add_option("--threads", threads);
  a_train->add_option("--out", out_path, "Table file (JSONL)")->required();
  a_train->callback([&] {
    action = [&] {
      const auto data = read_pairs(pairs, reverse);
      align::Ibm1Options opt;
      opt.iterations = iters;
      opt.null_word = !no_null;
      opt.threads = util::resolve_threads(threads);
      const auto r = align::train_ibm1(data, opt);
      align::write_table(r.table, fs::path(out_path));
      out << "log-likelihood: " << r.log_likelihood.front() << " -> "
          << r.log_likelihood.back() << '\n';
      return 0;
    };
  });

  auto* a_apply = align_cmd->add_subcommand("apply", "Viterbi-align sentence pairs");
  a_apply->add_option("--table", table_path)->required();
  a_apply->add_option("--pairs", pairs)->required();
  a_apply->add_flag("--reverse", reverse, "Swap source and target");
  a_apply->add_option("--out", out_path, "Pharaoh file")->required();
  a_apply->callback([&] {
    action = [&] {
      require_file(table_path, "table");
      const auto table = align::read_table(fs::path(table_path));
      const auto data = read_pairs(pairs, reverse);
      std::vector<align::AlignmentSet> sets;
      for (const auto& p : data) {
        sets.push_back(align::viterbi_align(table, p.source, p.target));
      }
      align::write_pharaoh_file(sets, out_path);
      return 0;
    };
  });

  auto* a_sym = align_cmd->add_subcommand("symmetrize", "Merge two directional alignments");
  a_sym->add_option("--forward", forward)->required();
  a_sym->add_option("--backward", backward)->required();
  a_sym->add_flag("--transpose-backward", transpose_backward,
                  "Backward file is in target-source orientation");
  a_sym->add_option("--heuristic", heuristic, "intersection|union|gdfa");
  a_sym->add_option("--out", out_path)->required();
  a_sym->callback([&] {
    action = [&] {
      require_file(forward, "forward alignments");
      require_file(backward, "backward alignments");
      const auto h = align::parse_heuristic(heuristic);
      const auto f = align::read_pharaoh_file(forward);
      auto b = align::read_pharaoh_file(backward);
      if (f.size() != b.size()) {
        throw ValidationError("expected " + std::to_string(f.size()) + ", got " +
                              std::to_string(b.size()) + " alignment lines");
      }
      std::vector<align::AlignmentSet> merged;
      for (std::size_t i = 0; i < f.size(); ++i) {
        merged.push_back(align::symmetrize(
            f[i], transpose_backward ? b[i].transposed() : b[i], h));
      }
      align::write_pharaoh_file(merged, out_path);
      return 0;
    };
  });

  // project
  ProjectOptions po;
  auto* project_cmd = app.add_subcommand("project", "Build a synthetic target corpus");
  project_cmd->require_subcommand(0, 1);
  project_cmd->add_option("--config", po.config, "JSON run config");
  project_cmd->add_option("--corpus", po.corpus);
  project_cmd->add_option("--translations", po.translations);
  project_cmd->add_option("--method", po.method, "rb|ab");
  project_cmd->add_option("--aligner", po.aligner, "native-ibm1|external");
  project_cmd->add_option("--alignments", po.alignments, "Pharaoh file, one line per unit");
  project_cmd->add_option("--iters", po.iterations);
  project_cmd->add_option("--heuristic", po.heuristic);
  project_cmd->add_option("--out-dir", po.out_dir);
  project_cmd->add_flag("--force", po.force);
  project_cmd->add_option("--threads", po.threads);
  project_cmd->callback([&] {
    if (!action) {
      po.threads_set = project_cmd->count("--threads") > 0;
      action = [&] { return cmd_project(po, out); };
    }
  });
  auto* p_units = project_cmd->add_subcommand(
      "units", "List the units that need alignment as source<TAB>target");
  std::string units_out;
  p_units->fallthrough();
  p_units->add_option("--out", units_out)->required();
  p_units->callback([&] {
    action = [&] {
      fs::path unused;
      po.aligner = "external";
      const Json c = project_config(po, &unused);
      require_file(c["corpus"].get<std::string>(), "corpus");
      require_file(c["translations"].get<std::string>(), "translations");
      const auto units = projection::enumerate_units(
          read_corpus(fs::path(c["corpus"].get<std::string>())),
          projection::parse_method(c["method"].get<std::string>()),
          projection::read_translations(fs::path(c["translations"].get<std::string>())));
      auto f = open_out(units_out);
      for (const auto& u : units) {
        const auto join = [](const Document& d) {
          std::string s;
          for (const auto& t : d.tokens()) s += (s.empty() ? "" : " ") + t.surface;
          return s;
        };
        f << join(u.source) << '\t' << join(u.target) << '\n';
      }
      return 0;
    };
  });

  // classify
  auto* classify = app.add_subcommand("classify", "Relation sense classifier");
  classify->require_subcommand(1);
  std::string corpus_path, model_path, corpus_id;
  int level_n = 11;
  double lr = 0.1, l2 = 1e-4;
  int epochs = 30;
  std::uint64_t seed = 42;
  const auto add_hp = [&](CLI::App* c) {
    c->add_option("--lr", lr);
    c->add_option("--l2", l2);
    c->add_option("--epochs", epochs);
    c->add_option("--seed", seed);
    c->add_option("--threads", threads);
    c->add_option("--corpus-id", corpus_id, "Provenance name (default: file stem)");
  };
  auto* c_train = classify->add_subcommand("train", "Train from scratch");
  c_train->add_option("--corpus", corpus_path)->required();
  c_train->add_option("--level", level_n, "4 or 11");
  c_train->add_option("--out", out_path)->required();
  add_hp(c_train);
  c_train->callback([&] {
    action = [&] {
      require_file(corpus_path, "corpus");
      const auto r = relclass::train(read_corpus(fs::path(corpus_path)),
                                     level_from_int(level_n),
                                     hyperparams_from(lr, l2, epochs, seed, threads),
                                     corpus_id_or(corpus_id, corpus_path));
      relclass::save_model(r.model, out_path);
      print_loss(r, out);
      return 0;
    };
  });
  auto* c_cont = classify->add_subcommand("continue", "Continue training a model");
  c_cont->add_option("--model", model_path)->required();
  c_cont->add_option("--corpus", corpus_path)->required();
  c_cont->add_option("--out", out_path)->required();
  add_hp(c_cont);
  c_cont->callback([&] {
    action = [&] {
      require_file(model_path, "model");
      require_file(corpus_path, "corpus");
      const auto model = relclass::load_model(model_path);
      const auto r = relclass::continue_train(
          model, read_corpus(fs::path(corpus_path)),
          hyperparams_from(lr, l2, epochs, seed, threads),
          corpus_id_or(corpus_id, corpus_path));
      relclass::save_model(r.model, out_path);
      print_loss(r, out);
      return 0;
    };
  });
  auto* c_pred = classify->add_subcommand("predict", "Predict senses");
  c_pred->add_option("--model", model_path)->required();
  c_pred->add_option("--corpus", corpus_path)->required();
  c_pred->add_option("--out", out_path, "Predictions (JSONL)")->required();
  c_pred->callback([&] {
    action = [&] {
      require_file(model_path, "model");
      require_file(corpus_path, "corpus");
      const auto model = relclass::load_model(model_path);
      const Corpus corpus = read_corpus(fs::path(corpus_path));
      std::vector<relclass::PredictionRecord> records;
      std::size_t skipped = 0;
      for (const auto& rel : corpus.relations()) {
        const auto gold = rel.sense.label_at(model.level());
        if (!gold) {
          ++skipped;
          continue;
        }
        const SenseLabel pred = relclass::predict(model, rel, corpus.document_of(rel));
        records.push_back({rel.rel_id, *gold, *pred.label_at(model.level()),
                           std::string(to_string(rel.sense.top())),
                           std::string(to_string(pred.top()))});
      }
      auto f = open_out(out_path);
      relclass::write_predictions(records, model.level(), f);
      out << records.size() << " predictions";
      if (skipped > 0) out << ", " << skipped << " relations without a gold label at this level";
      out << '\n';
      return 0;
    };
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Score predictions");
  eval->require_subcommand(0, 1);
  std::string preds_path, confusion_csv;
  eval->add_option("--predictions", preds_path);
  eval->add_option("--level", level_n, "4 or 11");
  eval->add_option("--out", out_path, "Metrics JSON (default: stdout)");
  eval->add_option("--confusion-csv", confusion_csv);
  eval->callback([&] {
    if (action) return;
    action = [&] {
      require_file(preds_path, "predictions");
      std::ifstream in(preds_path, std::ios::binary);
      const auto records = relclass::read_predictions(in, preds_path);
      metrics::ConfusionMatrix m(label_space(level_from_int(level_n)));
      for (const auto& r : records) m.add(r.gold, r.pred);
      const auto report = metrics::score(m);
      if (out_path.empty()) {
        out << report.to_json() << '\n';
      } else {
        open_out(out_path) << report.to_json() << '\n';
      }
      if (!confusion_csv.empty()) open_out(confusion_csv) << m.to_csv();
      return 0;
    };
  });
  auto* e_dist = eval->add_subcommand("distribution", "Sense distribution of a corpus");
  e_dist->add_option("--corpus", corpus_path)->required();
  e_dist->add_option("--level", level_n, "4 or 11");
  e_dist->callback([&] {
    action = [&] {
      require_file(corpus_path, "corpus");
      const auto d = metrics::distribution(read_corpus(fs::path(corpus_path)),
                                           level_from_int(level_n));
      Json j = Json::object();
      std::size_t total = 0;
      for (const auto& [label, n] : d) {
        j[label] = n;
        total += n;
      }
      out << Json{{"level", level_n}, {"total", total}, {"counts", j}}.dump(2) << '\n';
      return 0;
    };
  });

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run the set-up x variant matrix");
  std::string config_path, out_dir;
  bool force = false;
  experiment->add_option("--config", config_path)->required();
  experiment->add_option("--out-dir", out_dir, "Overrides output_dir");
  experiment->add_flag("--force", force);
  experiment->callback([&] {
    action = [&] {
      const Json j = load_config(config_path);
      auto config = ExperimentConfig::from_json(j, fs::path(config_path).parent_path());
      if (!out_dir.empty()) config.output_dir = out_dir;
      return run_experiment(config, force, out, err);
    };
  });

  // synth
  auto* synth_cmd = app.add_subcommand(
      "synth", "Write a synthetic bilingual fixture with a ready experiment config");
  synth::BilingualOptions so;
  synth_cmd->add_option("--out-dir", out_dir)->required();
  synth_cmd->add_option("--relations", so.relations);
  synth_cmd->add_option("--eval-relations", so.eval_relations);
  synth_cmd->add_option("--discontinuous-rate", so.discontinuous_rate);
  synth_cmd->add_option("--seed", so.seed);
  synth_cmd->add_flag("--force", force);
  synth_cmd->callback([&] {
    action = [&] {
      const auto fx = synth::generate_bilingual(so);
      RunDirectory dir(out_dir, force);
      write_corpus(fx.source, dir.file("source.jsonl"));
      write_corpus(fx.target_gold, dir.file("eval.jsonl"));
      write_corpus(fx.target_gold_translated, dir.file("eval_translated.jsonl"));
      {
        auto f = open_out(dir.file("translations.jsonl"));
        fx.translations.write(f);
      }
      align::write_pharaoh_file(fx.rb_alignments, dir.file("rb_alignments.txt"));
      align::write_pharaoh_file(fx.ab_alignments, dir.file("ab_alignments.txt"));
      Json variants = Json::array();
      for (const Method m : {Method::kRelationBased, Method::kArgumentBased}) {
        const auto& sets = m == Method::kRelationBased ? fx.rb_alignments : fx.ab_alignments;
        const auto r = projection::build_corpus(fx.source, m, fx.translations, sets);
        const std::string name(projection::to_string(m));
        write_corpus(r.corpus, dir.file(name + ".jsonl"));
        variants.push_back({{"name", name}, {"corpus", name + ".jsonl"}});
      }
      const Json config = {{"source_corpus", "source.jsonl"},
                           {"source_id", "source"},
                           {"eval_corpus", "eval.jsonl"},
                           {"eval_translated_corpus", "eval_translated.jsonl"},
                           {"variants", variants},
                           {"output_dir", "run"}};
      open_out(dir.file("experiment.json")) << config.dump(2) << '\n';
      dir.commit();
      out << "wrote fixture to " << out_dir << '\n';
      return 0;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    return action ? action() : 0;
  } catch (const projection::CoverageError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& id : e.rel_ids()) err << "  " << id << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace disco::cli
