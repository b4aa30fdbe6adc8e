#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fixgraph/alpha_ast.hpp"
#include "fixgraph/alpha_export.hpp"
#include "fixgraph/ast_json.hpp"
#include "fixgraph/checkpoint.hpp"
#include "fixgraph/dataset.hpp"
#include "fixgraph/embedding.hpp"
#include "fixgraph/errors.hpp"
#include "fixgraph/metrics.hpp"
#include "fixgraph/parser.hpp"
#include "fixgraph/pipeline.hpp"
#include "fixgraph/sensitivity.hpp"
#include "fixgraph/synth.hpp"
#include "fixgraph/train.hpp"

namespace fixgraph::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool quiet = false;
};

struct EmbedFlags {
  int dim = 64;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  std::size_t min_count = 2;
  double lr = 0.025;
};

struct TrainFlags {
  double train_fraction = 0.8;
  int epochs = 50;
  int batch_size = 32;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  std::string optimizer = "adam";
  double validation_fraction = 0.1;
  double threshold = 0.5;
  int layers = 2;
  int hidden = 64;
  int mlp_hidden = 64;
  EmbedFlags embed;
};

int ExitCode(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Input:
      return 2;
    case ErrorCategory::Data:
      return 3;
    case ErrorCategory::VersionMismatch:
      return 4;
    case ErrorCategory::Logic:
      break;
  }
  return 1;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Writes to the file when a path is given, else to `out`.
void Emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    WriteFile(path, content);
  }
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Ast LoadTree(const std::string& path) {
  const std::string text = ReadFile(path);
  if (EndsWith(path, ".json")) return ingest_ast_json(text);
  return parse_source(text, path);
}

std::vector<std::string> ConfigValues(const nlohmann::json& v) {
  std::vector<std::string> out;
  auto scalar = [](const nlohmann::json& s) {
    if (s.is_string()) return s.get<std::string>();
    if (s.is_boolean()) return std::string(s.get<bool>() ? "true" : "false");
    if (s.is_number()) return s.dump();
    throw BadConfig("config values must be scalars or arrays of scalars");
  };
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(scalar(e));
  } else {
    out.push_back(scalar(v));
  }
  return out;
}

// Flat JSON object keyed by long flag names. Flags given on the command line
// take precedence; keys that name no flag of the command are rejected.
void ApplyConfig(CLI::App& app, CLI::App* sub, const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw BadConfig("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw BadConfig("config '" + path + "' must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
    if (!opt) opt = app.get_option_no_throw(flag);
    if (!opt || key == "config" || key == "help") {
      throw BadConfig("unknown config key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    try {
      for (const auto& s : ConfigValues(value)) opt->add_result(s);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw BadConfig("config key '" + key + "': " + e.what());
    }
  }
}

void AddEmbedOptions(CLI::App* cmd, EmbedFlags& f, const std::string& epochs_flag) {
  cmd->add_option("--dim", f.dim, "Embedding width")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--window", f.window, "Skip-gram context window")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--negatives", f.negatives, "Negative samples per pair")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option(epochs_flag, f.epochs, "Skip-gram passes over the corpus")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--min-count", f.min_count, "Minimum token frequency")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--embed-lr", f.lr, "Initial skip-gram learning rate")->capture_default_str()->check(CLI::PositiveNumber);
}

void AddTrainOptions(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--train-fraction", f.train_fraction, "Share of projects used for training")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--epochs", f.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", f.batch_size, "Graphs per optimizer step")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.lr, "Learning rate")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--weight-decay", f.weight_decay, "L2 penalty")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--optimizer", f.optimizer, "adam or sgd-momentum")
      ->capture_default_str()->check(CLI::IsMember({"adam", "sgd-momentum"}));
  cmd->add_option("--validation-fraction", f.validation_fraction,
                  "Share of training projects held out for checkpoint selection")
      ->capture_default_str()->check(CLI::Range(0.0, 0.99));
  cmd->add_option("--threshold", f.threshold, "Decision threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--layers", f.layers, "Attention layers")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--hidden", f.hidden, "Attention layer width")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--mlp-hidden", f.mlp_hidden, "Classifier hidden width")->capture_default_str()->check(CLI::PositiveNumber);
  AddEmbedOptions(cmd, f.embed, "--embed-epochs");
}

SkipGramConfig ToSkipGram(const EmbedFlags& f, std::uint64_t seed) {
  SkipGramConfig c;
  c.dim = f.dim;
  c.window = f.window;
  c.negatives = f.negatives;
  c.epochs = f.epochs;
  c.min_count = f.min_count;
  c.learning_rate = f.lr;
  c.seed = seed;
  return c;
}

SystemConfig ToSystem(const TrainFlags& f, const Globals& g) {
  SystemConfig c;
  c.embedding = ToSkipGram(f.embed, g.seed);
  c.model.layers = f.layers;
  c.model.hidden_dim = f.hidden;
  c.model.mlp_hidden = f.mlp_hidden;
  c.model.input_dim = f.embed.dim + 3;
  c.train.epochs = f.epochs;
  c.train.batch_size = f.batch_size;
  c.train.learning_rate = f.lr;
  c.train.weight_decay = f.weight_decay;
  c.train.seed = g.seed;
  c.train.optimizer = optimizer_from_string(f.optimizer);
  c.train.validation_fraction = f.validation_fraction;
  c.train.threshold = f.threshold;
  c.train.jobs = g.jobs;
  c.train.validate();
  return c;
}

// Uses the samples' own split tags when present, else a cross-project split.
std::pair<Dataset, Dataset> SplitDataset(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (ds.has_split_tags()) return {ds.with_split(SplitTag::Train), ds.with_split(SplitTag::Test)};
  return cross_project_split(ds, fraction, seed);
}

// Training part of a dataset for corpus-level commands.
Dataset TrainingPart(const Dataset& ds) {
  return ds.has_split_tags() ? ds.with_split(SplitTag::Train) : ds;
}

std::string DatasetText(const Dataset& ds) {
  std::ostringstream os;
  write_dataset(os, ds);
  return os.str();
}

// --- commands ----------------------------------------------------------------

int CmdParse(const std::string& file, int indent, const std::string& out_path, std::ostream& out) {
  const Ast ast = LoadTree(file);
  std::string text = export_ast_json(ast, indent);
  text += '\n';
  Emit(out_path, text, out);
  return 0;
}

int CmdDiff(const std::string& old_file, const std::string& new_file, const std::string& format,
            const std::string& out_path, const Globals& g, std::ostream& out, std::ostream& err) {
  const Ast old_ast = LoadTree(old_file);
  const Ast new_ast = LoadTree(new_file);
  const AlphaAst graph = diff_asts(old_ast, new_ast);
  std::string text = format == "dot" ? alpha_ast_to_dot(graph) : alpha_ast_to_json(graph, 2) + "\n";
  Emit(out_path, text, out);
  const auto counts = graph.node_counts();
  if (!g.quiet) err << "added=" << counts.added << " deleted=" << counts.deleted << "\n";
  return 0;
}

int CmdCorpus(const std::string& dataset, std::size_t min_count, const std::string& out_path,
              const Globals& g, std::ostream& out, std::ostream& err) {
  const Dataset ds = TrainingPart(load_dataset(dataset));
  const auto commits = prepare_commits(ds, g.jobs);
  const TokenCorpus corpus = build_corpus(graphs_of(commits), min_count);
  std::ostringstream os;
  for (std::size_t i = 0; i < corpus.tokens.size(); ++i) {
    os << corpus.tokens[i] << '\t' << corpus.counts[i] << '\n';
  }
  Emit(out_path, os.str(), out);
  if (!g.quiet) {
    err << "sentences=" << corpus.sentences.size() << " vocab=" << corpus.vocab_size() << "\n";
  }
  return 0;
}

int CmdTrainEmbed(const std::string& dataset, const EmbedFlags& flags, const std::string& out_path,
                  const Globals& g, std::ostream& err) {
  if (out_path.empty()) throw BadConfig("train-embed needs --out");
  const Dataset ds = TrainingPart(load_dataset(dataset));
  const auto commits = prepare_commits(ds, g.jobs);
  const SkipGramConfig cfg = ToSkipGram(flags, g.seed);
  const TokenCorpus corpus = build_corpus(graphs_of(commits), cfg.min_count);
  const EmbeddingTable table = train_skipgram(corpus, cfg);
  table.save_file(out_path);
  if (!g.quiet) err << "vocab=" << table.vocab_size() << " dim=" << table.dim() << "\n";
  return 0;
}

int CmdTrain(const std::string& dataset, const TrainFlags& flags, const std::string& out_dir,
             const Globals& g, std::ostream& err) {
  if (out_dir.empty()) throw BadConfig("train needs --out-dir");
  const SystemConfig config = ToSystem(flags, g);
  const Dataset ds = load_dataset(dataset);
  auto [train, test] = SplitDataset(ds, flags.train_fraction, g.seed);
  if (train.empty()) throw DataError("no training samples");
  if (train.count_label(1) == 0 || train.count_label(0) == 0) throw SingleClassDataset();
  const auto commits = prepare_commits(train, g.jobs);
  const TrainedSystem sys = train_system(commits, config);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  const fs::path dir(out_dir);
  save_checkpoint_file((dir / "model.ckpt").string(), sys.result.model, sys.result.info);
  sys.embeddings.save_file((dir / "embeddings.bin").string());
  WriteFile((dir / "history.csv").string(), history_csv(sys.result.history));
  WriteFile((dir / "train.jsonl").string(), DatasetText(train));
  WriteFile((dir / "test.jsonl").string(), DatasetText(test));
  if (!g.quiet) {
    err << "train=" << train.size() << " test=" << test.size()
        << " best_epoch=" << sys.result.best_epoch << "\n";
  }
  return 0;
}

int CmdPredict(const std::string& dataset, const std::string& checkpoint,
               const std::string& embeddings, const std::string& out_path, const Globals& g,
               std::ostream& out) {
  if (checkpoint.empty() || embeddings.empty()) {
    throw BadConfig("predict needs --checkpoint and --embeddings");
  }
  const Checkpoint ckpt = load_checkpoint_file(checkpoint);
  const EmbeddingTable table = EmbeddingTable::load_file(embeddings);
  if (table.dim() + 3 != ckpt.model.config.input_dim) {
    throw VersionMismatch("embedding width " + std::to_string(table.dim()) +
                          " does not fit checkpoint input " +
                          std::to_string(ckpt.model.config.input_dim));
  }
  const Dataset ds = load_dataset(dataset);
  const auto commits = prepare_commits(ds, g.jobs);
  const auto scored = score_commits(ckpt.model, table, commits, g.jobs);
  std::ostringstream os;
  write_scores_csv(os, scored);
  Emit(out_path, os.str(), out);
  return 0;
}

int CmdEvaluate(const std::string& scores_path, const std::vector<double>& effort, double threshold,
                const std::string& format, const std::string& out_path, const Globals& g,
                std::ostream& out, std::ostream& err) {
  std::ifstream in(scores_path);
  if (!in) throw IoError("cannot open '" + scores_path + "'");
  const auto scored = read_scores_csv(in);
  for (double l : effort) {
    if (!(l > 0.0 && l <= 100.0)) throw BadConfig("effort levels must lie in (0, 100]");
  }
  const MetricsReport report = evaluate(scored, threshold, effort);
  const std::string text =
      format == "json" ? report_to_json(report, 2) + "\n" : report_to_table(report);
  Emit(out_path, text, out);
  if (!report.auc) {
    if (!g.quiet) err << "warning: " << SingleClass().what() << "; AUC omitted\n";
    return ExitCode(ErrorCategory::Data);
  }
  return 0;
}

int CmdSynth(std::size_t n, const std::string& signal, const std::string& out_path, const Globals& g,
             std::ostream& out) {
  const Dataset ds = synthesize(n, fix_signal_from_string(signal), g.seed);
  Emit(out_path, DatasetText(ds), out);
  return 0;
}

int CmdReport(const std::string& dataset, const TrainFlags& flags, int folds,
              const std::vector<std::size_t>& bins, const std::vector<double>& effort,
              const std::string& out_path, const Globals& g, std::ostream& out) {
  SensitivityConfig config;
  config.system = ToSystem(flags, g);
  config.folds = folds;
  config.bin_edges = bins;
  config.effort_percents = effort;
  config.jobs = g.jobs;
  const Dataset ds = load_dataset(dataset);
  auto [train, test] = SplitDataset(ds, flags.train_fraction, g.seed);
  const SensitivityReport report = run_sensitivity(train, test, config);
  Emit(out_path, sensitivity_to_json(report, 2) + "\n", out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-based classifier for vulnerability-fixing commits", "fixgraph"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "JSON file of flag values (command-line flags win)");
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for preprocessing and scoring")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress summaries on the error stream");

  std::string out_path;
  int indent = 2;
  auto* parse = app.add_subcommand("parse", "Print the AST of a source or AST-JSON file as AST-JSON");
  std::string parse_file;
  parse->add_option("file", parse_file, "C source or AST-JSON (.json) file")->required();
  parse->add_option("--indent", indent, "JSON indentation (-1 for one line)")->capture_default_str();
  parse->add_option("--out", out_path, "Output file (default stdout)");

  auto* diff = app.add_subcommand("diff", "Print the annotated AST of a before/after pair");
  std::string old_file, new_file, format = "json";
  diff->add_option("old", old_file, "Old version")->required();
  diff->add_option("new", new_file, "New version")->required();
  diff->add_option("--format", format, "json or dot")->capture_default_str()->check(CLI::IsMember({"json", "dot"}));
  diff->add_option("--out", out_path, "Output file (default stdout)");

  auto* corpus = app.add_subcommand("corpus", "Print the token vocabulary of a dataset");
  std::string dataset;
  std::size_t min_count = 2;
  corpus->add_option("dataset", dataset, "Dataset JSONL")->required();
  corpus->add_option("--min-count", min_count, "Minimum token frequency")->capture_default_str()->check(CLI::PositiveNumber);
  corpus->add_option("--out", out_path, "Output file (default stdout)");

  auto* train_embed = app.add_subcommand("train-embed", "Train skip-gram token embeddings");
  EmbedFlags embed_flags;
  train_embed->add_option("dataset", dataset, "Dataset JSONL")->required();
  AddEmbedOptions(train_embed, embed_flags, "--epochs");
  train_embed->add_option("--out", out_path, "Embedding table file");

  auto* train = app.add_subcommand("train", "Split, embed and train; writes model.ckpt, embeddings.bin, history.csv, train.jsonl, test.jsonl");
  TrainFlags train_flags;
  std::string out_dir;
  train->add_option("dataset", dataset, "Dataset JSONL")->required();
  AddTrainOptions(train, train_flags);
  train->add_option("--out-dir", out_dir, "Output directory");

  auto* predict = app.add_subcommand("predict", "Score a dataset; writes CSV id,score,label,changed_loc");
  std::string checkpoint, embeddings;
  predict->add_option("dataset", dataset, "Dataset JSONL")->required();
  predict->add_option("--checkpoint", checkpoint, "Model checkpoint");
  predict->add_option("--embeddings", embeddings, "Embedding table");
  predict->add_option("--out", out_path, "Output file (default stdout)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute metrics from a scores CSV");
  std::string scores;
  std::vector<double> effort{5.0};
  double threshold = 0.5;
  std::string report_format = "table";
  evaluate_cmd->add_option("scores", scores, "Scores CSV")->required();
  evaluate_cmd->add_option("--effort", effort, "Effort levels L in percent for CE@L")
      ->capture_default_str()->delimiter(',');
  evaluate_cmd->add_option("--threshold", threshold, "Decision threshold")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  evaluate_cmd->add_option("--format", report_format, "table or json")
      ->capture_default_str()->check(CLI::IsMember({"table", "json"}));
  evaluate_cmd->add_option("--out", out_path, "Output file (default stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic labelled dataset");
  std::size_t n = 100;
  std::string signal = "mixed";
  synth->add_option("--n", n, "Number of samples (>= 2)")->capture_default_str()->check(CLI::Range(2, 1000000));
  synth->add_option("--signal", signal, "bounds-check, off-by-one or mixed")
      ->capture_default_str()->check(CLI::IsMember({"bounds-check", "off-by-one", "mixed"}));
  synth->add_option("--out", out_path, "Output file (default stdout)");

  auto* report = app.add_subcommand("report", "Training-size and change-size sensitivity experiment");
  TrainFlags report_flags;
  int folds = 5;
  std::vector<std::size_t> bins{10, 30, 100};
  std::vector<double> report_effort{5.0};
  report->add_option("dataset", dataset, "Dataset JSONL")->required();
  AddTrainOptions(report, report_flags);
  report->add_option("--folds", folds, "Cumulative training folds")->capture_default_str()->check(CLI::Range(2, 1000));
  report->add_option("--bins", bins, "Changed-LOC bin edges")->capture_default_str()->delimiter(',');
  report->add_option("--effort", report_effort, "Effort levels L in percent")
      ->capture_default_str()->delimiter(',');
  report->add_option("--out", out_path, "Output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    CLI::App* active = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    if (!g.config.empty()) ApplyConfig(app, active, g.config);

    if (active == parse) return CmdParse(parse_file, indent, out_path, out);
    if (active == diff) return CmdDiff(old_file, new_file, format, out_path, g, out, err);
    if (active == corpus) return CmdCorpus(dataset, min_count, out_path, g, out, err);
    if (active == train_embed) return CmdTrainEmbed(dataset, embed_flags, out_path, g, err);
    if (active == train) return CmdTrain(dataset, train_flags, out_dir, g, err);
    if (active == predict) return CmdPredict(dataset, checkpoint, embeddings, out_path, g, out);
    if (active == evaluate_cmd) {
      return CmdEvaluate(scores, effort, threshold, report_format, out_path, g, out, err);
    }
    if (active == synth) return CmdSynth(n, signal, out_path, g, out);
    if (active == report) {
      return CmdReport(dataset, report_flags, folds, bins, report_effort, out_path, g, out);
    }
    return 1;
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "fixgraph 0.1.0\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode(e.category());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fixgraph::cli
