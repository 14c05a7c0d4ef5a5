#include "micol/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "micol/corpus.hpp"
#include "micol/diagnostics.hpp"
#include "micol/encoder.hpp"
#include "micol/error.hpp"
#include "micol/evaluation.hpp"
#include "micol/hin.hpp"
#include "micol/inference.hpp"
#include "micol/jsonl.hpp"
#include "micol/retrieval.hpp"
#include "micol/synth.hpp"
#include "micol/training.hpp"

namespace micol::cli {
namespace {

namespace fs = std::filesystem;

struct SynthArgs {
  fs::path out_dir;
  SynthConfig cfg;
};

struct IngestArgs {
  fs::path corpus;
  fs::path labels;
  fs::path out;
};

struct BuildHinArgs {
  fs::path corpus;
  fs::path out;
};

struct SamplePairsArgs {
  fs::path hin;
  std::string patterns;
  std::size_t n_train = kDefaultTrainPairs;
  std::size_t n_val = kDefaultValPairs;
  std::uint64_t seed = 0;
  fs::path out_train;
  fs::path out_val;
};

struct TrainArgs {
  fs::path corpus;
  fs::path labels;
  fs::path train_pairs;
  fs::path val_pairs;
  std::string patterns;
  std::size_t n_train = kDefaultTrainPairs;
  std::size_t n_val = kDefaultValPairs;
  std::string arch = "bi";
  TrainConfig cfg;
  fs::path out;
  fs::path report;
};

struct PredictArgs {
  fs::path ckpt;
  std::string arch = "bi";
  fs::path labels;
  fs::path docs;
  fs::path corpus;
  std::size_t topk = 0;
  double eta = kDefaultEta;
  std::size_t threads = 1;
  fs::path out;
  fs::path candidates_out;
};

struct EvaluateArgs {
  fs::path pred;
  fs::path truth;
  fs::path train_truth;
  std::vector<std::size_t> ks = {1, 3, 5};
  std::string propensity_log = "e";
  std::string dcg_log = "2";
  fs::path out;
};

struct DiagnoseArgs {
  fs::path hin;
  std::string patterns;
  fs::path truth;
  std::size_t threads = 1;
  fs::path out;
};

Hin load_hin(const fs::path& path) { return Hin::from_json(read_json_file(path)); }

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

void run_synth(const SynthArgs& a) {
  const auto corpus = generate_synthetic(a.cfg);
  write_synthetic(corpus, a.out_dir);
  print_json({{"out_dir", a.out_dir.string()},
              {"labels", corpus.labels.size()},
              {"train_docs", corpus.train.size()},
              {"test_docs", corpus.test.size()}});
}

void run_ingest(const IngestArgs& a) {
  const auto docs = load_documents(a.corpus);
  json report = {{"documents", docs.report.documents},
                 {"self_citations_dropped", docs.report.self_citations_dropped},
                 {"dangling_references", docs.report.dangling_references},
                 {"labeled_documents", docs.report.labeled_documents}};
  if (!a.labels.empty()) {
    const auto labels = load_labels(a.labels);
    report["labels"] = labels.size();
    report["empty_descriptions"] = labels.empty_descriptions;
  }
  if (!a.out.empty()) write_json_file(a.out, report);
  print_json(report);
}

void run_build_hin(const BuildHinArgs& a) {
  const auto docs = load_documents(a.corpus);
  const auto h = Hin::build(docs.documents);
  write_json_file(a.out, h.to_json());
  print_json(h.stats());
}

void run_sample_pairs(const SamplePairsArgs& a) {
  const auto h = load_hin(a.hin);
  const auto split = sample_pairs(h, parse_pattern_list(a.patterns), a.n_train, a.n_val, a.seed);
  save_pairs(a.out_train, h, split.train);
  save_pairs(a.out_val, h, split.val);
  print_json({{"train", split.train.size()}, {"val", split.val.size()}});
}

void run_train(TrainArgs& a) {
  const auto docs = load_documents(a.corpus);
  const auto labels = load_labels(a.labels);
  a.cfg.arch = parse_arch(a.arch);
  a.cfg.validate();

  const auto h = Hin::build(docs.documents);
  PairSplit split;
  if (!a.patterns.empty()) {
    if (!a.train_pairs.empty() || !a.val_pairs.empty()) {
      throw ValidationError("--pattern and --train-pairs/--val-pairs are mutually exclusive");
    }
    split = sample_pairs(h, parse_pattern_list(a.patterns), a.n_train, a.n_val, a.cfg.seed);
  } else {
    if (a.train_pairs.empty()) throw ValidationError("either --pattern or --train-pairs is required");
    split.train = load_pairs(a.train_pairs, h);
    if (!a.val_pairs.empty()) split.val = load_pairs(a.val_pairs, h);
  }

  const auto vocab = build_vocabulary(docs.documents, labels);
  auto result = train(docs.documents, vocab, split.train, split.val, a.cfg);
  save_checkpoint(result.params, a.out);
  result.report.checkpoint = a.out.string();
  const auto report = result.report.to_json();
  if (!a.report.empty()) write_json_file(a.report, report);
  print_json(report);
}

void run_predict(const PredictArgs& a) {
  if (a.topk == 0) throw ValidationError("--topk must be positive");
  const auto labels = load_labels(a.labels);
  const auto docs = load_documents(a.docs);
  const auto arch = a.arch;
  Retriever retriever(labels);

  std::optional<EncoderParams> params;
  std::unique_ptr<Reranker> reranker;
  if (arch == "bm25") {
    reranker = std::make_unique<Bm25Reranker>(retriever.index());
  } else {
    if (a.ckpt.empty()) throw ValidationError("--ckpt is required for arch " + arch);
    params = load_checkpoint(a.ckpt);
    if (!a.corpus.empty()) {
      check_vocabulary(*params, build_vocabulary(load_documents(a.corpus).documents, labels));
    }
    reranker = make_reranker(parse_arch(arch), *params, labels);
  }

  Predictor predictor(retriever, *reranker, {.k = a.topk, .eta = a.eta, .threads = a.threads});
  const auto preds = predictor.predict_batch(docs.documents);
  save_predictions(a.out, preds);

  if (!a.candidates_out.empty()) {
    auto out = open_output(a.candidates_out);
    for (const auto& d : docs.documents) {
      out << candidates_to_json(retriever.retrieve(d, a.eta), labels).dump() << '\n';
    }
    if (!out) throw IoError("failed writing " + a.candidates_out.string());
  }

  std::size_t shortfall = 0;
  for (const auto& p : preds) shortfall += p.shortfall > 0 ? 1 : 0;
  print_json({{"documents", preds.size()}, {"short_rankings", shortfall}});
}

LogBase parse_log_base(const std::string& s) {
  if (s == "e") return LogBase::kNatural;
  if (s == "2") return LogBase::kTwo;
  if (s == "10") return LogBase::kTen;
  throw ValidationError("unknown log base \"" + s + "\" (expected e, 2 or 10)");
}

DcgBase parse_dcg_base(const std::string& s) {
  if (s == "2") return DcgBase::kTwo;
  if (s == "e") return DcgBase::kNatural;
  throw ValidationError("unknown DCG log base \"" + s + "\" (expected 2 or e)");
}

void run_evaluate(const EvaluateArgs& a) {
  const auto preds = load_predictions(a.pred);
  const auto truth = GroundTruth::load(a.truth);
  GroundTruth train_truth;
  if (a.train_truth.empty()) {
    std::cerr << "warning: no --train-truth; propensities use label counts of --truth\n";
  } else {
    train_truth = GroundTruth::load(a.train_truth);
  }
  const auto& counts_from = a.train_truth.empty() ? truth : train_truth;
  const auto pm = PropensityModel::fit(counts_from.label_counts(), counts_from.size(),
                                       parse_log_base(a.propensity_log));
  const auto report = evaluate(preds, truth, pm, a.ks, {.dcg_base = parse_dcg_base(a.dcg_log)});
  const auto j = report.to_json();
  if (!a.out.empty()) write_json_file(a.out, j);
  print_json(j);
}

void run_diagnose(const DiagnoseArgs& a) {
  const auto h = load_hin(a.hin);
  const auto truth = GroundTruth::load(a.truth);
  const auto patterns = a.patterns.empty() ? std::vector<MetaPattern>(kAllPatterns.begin(), kAllPatterns.end())
                                           : parse_pattern_list(a.patterns);
  const auto report = diagnose(h, truth, patterns, a.threads);
  const auto j = report.to_json();
  if (!a.out.empty()) write_json_file(a.out, j);
  json summary = json::array();
  for (const auto& p : j["patterns"]) {
    summary.push_back({{"pattern", p["pattern"]}, {"mean_js", p["mean_js"]}, {"skipped", p["skipped"]}});
  }
  print_json({{"subset_size", report.subset_size}, {"patterns", summary}});
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Metadata-induced contrastive learning for zero-shot multi-label text classification",
               "micol"};
  app.set_config("--config", "", "TOML/INI file; options go under a [subcommand] section");
  app.allow_config_extras(false);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a planted-cluster synthetic corpus");
  s->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  s->add_option("--docs", synth.cfg.train_docs, "Corpus documents");
  s->add_option("--test-docs", synth.cfg.test_docs, "Held-out documents");
  s->add_option("--labels", synth.cfg.labels, "Number of labels");
  s->add_option("--clusters", synth.cfg.clusters, "Number of label clusters");
  s->add_option("--seed", synth.cfg.seed, "Generator seed")->envname("MICOL_SEED");

  IngestArgs ingest;
  auto* in = app.add_subcommand("ingest", "Validate a corpus and label space");
  in->add_option("--corpus", ingest.corpus, "Document JSONL")->required();
  in->add_option("--labels", ingest.labels, "Label JSONL");
  in->add_option("--out", ingest.out, "Load report JSON");

  BuildHinArgs build;
  auto* bh = app.add_subcommand("build-hin", "Build the heterogeneous network");
  bh->add_option("--corpus", build.corpus, "Document JSONL")->required();
  bh->add_option("--out", build.out, "Network JSON")->required();

  SamplePairsArgs pairs;
  auto* sp = app.add_subcommand("sample-pairs", "Sample contrastive document pairs");
  sp->add_option("--hin", pairs.hin, "Network JSON")->required();
  sp->add_option("--pattern", pairs.patterns, "Comma-separated meta-patterns, e.g. P<P>P,PAP")->required();
  sp->add_option("--n-train", pairs.n_train, "Training pairs");
  sp->add_option("--n-val", pairs.n_val, "Validation pairs");
  sp->add_option("--seed", pairs.seed, "Sampling seed")->envname("MICOL_SEED");
  sp->add_option("--out-train", pairs.out_train, "Training pairs JSONL")->required();
  sp->add_option("--out-val", pairs.out_val, "Validation pairs JSONL")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a relevance scorer");
  t->add_option("--corpus", tr.corpus, "Unlabeled document JSONL")->required();
  t->add_option("--labels", tr.labels, "Label JSONL (for the vocabulary)")->required();
  t->add_option("--train-pairs", tr.train_pairs, "Training pairs JSONL");
  t->add_option("--val-pairs", tr.val_pairs, "Validation pairs JSONL");
  t->add_option("--pattern", tr.patterns, "Sample pairs in-process with these meta-patterns");
  t->add_option("--n-train", tr.n_train, "Training pairs when sampling in-process");
  t->add_option("--n-val", tr.n_val, "Validation pairs when sampling in-process");
  t->add_option("--arch", tr.arch, "bi or cross")->check(CLI::IsMember({"bi", "cross"}));
  t->add_option("--epochs", tr.cfg.epochs, "Epochs");
  t->add_option("--batch", tr.cfg.batch, "Batch size (0: 8 for bi, 4 for cross)");
  t->add_option("--tau", tr.cfg.tau, "InfoNCE temperature");
  t->add_option("--lr", tr.cfg.lr, "Adam learning rate");
  t->add_option("--seed", tr.cfg.seed, "Training seed")->envname("MICOL_SEED");
  t->add_option("--dim", tr.cfg.encoder.dim, "Embedding dimension");
  t->add_option("--max-len", tr.cfg.encoder.max_len, "Maximum tokens per input");
  t->add_option("--init-scale", tr.cfg.encoder.init_scale, "Uniform init half-width");
  t->add_option("--out", tr.out, "Checkpoint path")->required();
  t->add_option("--report", tr.report, "Training report JSON");

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Retrieve and rerank labels for documents");
  p->add_option("--ckpt", pr.ckpt, "Checkpoint (not needed for bm25)");
  p->add_option("--arch", pr.arch, "bi, cross or bm25")->check(CLI::IsMember({"bi", "cross", "bm25"}));
  p->add_option("--labels", pr.labels, "Label JSONL")->required();
  p->add_option("--docs", pr.docs, "Documents to classify")->required();
  p->add_option("--corpus", pr.corpus, "Training corpus; enables the vocabulary check");
  p->add_option("--topk", pr.topk, "Labels per document")->required();
  p->add_option("--eta", pr.eta, "BM25 candidate threshold");
  p->add_option("--threads", pr.threads, "Worker threads")->envname("MICOL_THREADS");
  p->add_option("--out", pr.out, "Prediction JSONL")->required();
  p->add_option("--candidates-out", pr.candidates_out, "Candidate-set JSONL");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score predictions against ground truth");
  e->add_option("--pred", ev.pred, "Prediction JSONL")->required();
  e->add_option("--truth", ev.truth, "Ground-truth JSONL")->required();
  e->add_option("--train-truth", ev.train_truth, "Labeled training corpus for propensities");
  e->add_option("--k", ev.ks, "Cutoffs")->delimiter(',');
  e->add_option("--propensity-log", ev.propensity_log, "Log base in the propensity constant")
      ->check(CLI::IsMember({"e", "2", "10"}));
  e->add_option("--dcg-log", ev.dcg_log, "Log base of the DCG discount")->check(CLI::IsMember({"2", "e"}));
  e->add_option("--out", ev.out, "Metrics JSON");

  DiagnoseArgs dg;
  auto* d = app.add_subcommand("diagnose", "Jensen-Shannon quality of meta-patterns");
  d->add_option("--hin", dg.hin, "Network JSON")->required();
  d->add_option("--pattern", dg.patterns, "Comma-separated meta-patterns (default: all ten)");
  d->add_option("--truth", dg.truth, "Labeled documents")->required();
  d->add_option("--threads", dg.threads, "Worker threads")->envname("MICOL_THREADS");
  d->add_option("--out", dg.out, "Report JSON");

  try {
    // The config file belongs to the top-level app; accept it after the
    // subcommand too.
    std::vector<std::string> ordered;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        ordered.insert(ordered.begin(), {args[i], args[i + 1]});
        ++i;
      } else if (args[i].starts_with("--config=")) {
        ordered.insert(ordered.begin(), args[i]);
      } else {
        ordered.push_back(args[i]);
      }
    }
    std::vector<std::string> reversed(ordered.rbegin(), ordered.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (s->parsed()) run_synth(synth);
    else if (in->parsed()) run_ingest(ingest);
    else if (bh->parsed()) run_build_hin(build);
    else if (sp->parsed()) run_sample_pairs(pairs);
    else if (t->parsed()) run_train(tr);
    else if (p->parsed()) run_predict(pr);
    else if (e->parsed()) run_evaluate(ev);
    else if (d->parsed()) run_diagnose(dg);
    return kOk;
  } catch (const IoError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kIo;
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kValidation;
  } catch (const InvariantError& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kInternal;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kInternal;
  }
}

}  // namespace micol::cli
