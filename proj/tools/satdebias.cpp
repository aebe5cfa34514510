#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "satdebias/biasstats.hpp"
#include "satdebias/corpus.hpp"
#include "satdebias/debias.hpp"
#include "satdebias/error.hpp"
#include "satdebias/evalx.hpp"
#include "satdebias/explain.hpp"
#include "satdebias/judge.hpp"
#include "satdebias/model.hpp"
#include "satdebias/predictions.hpp"
#include "satdebias/reportd.hpp"
#include "satdebias/simscore.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace satdebias;

namespace {

corpus::Corpus load(const std::string& path) { return corpus::load_corpus(path, corpus::format_for(path)); }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

bool wants_json(const std::string& path) { return fs::path(path).extension() == ".json"; }

Label label_arg(const std::string& text) {
  auto l = parse_label(text);
  if (!l) throw Error("unknown label '" + text + "' (POSITIVE or NEGATIVE)");
  return *l;
}

std::unique_ptr<provider::ChatProvider> make_provider(const std::string& name) {
  if (name == "openai") return std::make_unique<provider::OpenAiCompatibleProvider>(provider::ProviderConfig::from_env());
  if (name == "echo") return std::make_unique<provider::EchoProvider>();
  if (name.rfind("fixture:", 0) == 0) return std::make_unique<provider::FixtureProvider>(fs::path(name.substr(8)));
  throw Error("unknown provider '" + name + "' (openai, echo or fixture:<path>)");
}

// ---------------------------------------------------------------- stats / topk

struct StatsArgs {
  std::string in, label = "all", out;
};

void run_stats(const StatsArgs& a) {
  const auto c = load(a.in);
  std::vector<biasstats::LabelStats> rows;
  if (a.label == "all") {
    for (Label l : {Label::Positive, Label::Negative})
      if (c.count(l)) rows.push_back(biasstats::corpus_stats(c, l));
  } else {
    rows.push_back(biasstats::corpus_stats(c, label_arg(a.label)));
  }
  auto name = [](const biasstats::LabelStats& s) { return s.label ? std::string(to_string(*s.label)) : "ALL"; };
  if (wants_json(a.out)) {
    json out = json::array();
    for (const auto& s : rows)
      out.push_back({{"label", name(s)},
                     {"n_articles", s.n_articles},
                     {"avg_words", s.avg_words},
                     {"avg_sentences", s.avg_sentences},
                     {"avg_words_per_sentence", s.avg_words_per_sentence}});
    return emit(a.out, out.dump(1) + "\n");
  }
  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  if (a.out.empty()) {
    o << std::left << std::setw(10) << "label" << std::right << std::setw(10) << "articles" << std::setw(12)
      << "avg words" << std::setw(12) << "avg sents" << std::setw(12) << "words/sent" << "\n";
    for (const auto& s : rows)
      o << std::left << std::setw(10) << name(s) << std::right << std::setw(10) << s.n_articles << std::setw(12)
        << s.avg_words << std::setw(12) << s.avg_sentences << std::setw(12) << s.avg_words_per_sentence << "\n";
  } else {
    o << "label\tn_articles\tavg_words\tavg_sentences\tavg_words_per_sentence\n";
    for (const auto& s : rows)
      o << name(s) << '\t' << s.n_articles << '\t' << s.avg_words << '\t' << s.avg_sentences << '\t'
        << s.avg_words_per_sentence << "\n";
  }
  emit(a.out, o.str());
}

struct TopkArgs {
  std::string in, label = "POSITIVE", out, lemmatizer, lemma_dict;
  std::size_t k = 10;
};

void run_topk(const TopkArgs& a) {
  const auto c = load(a.in);
  std::unique_ptr<biasstats::Lemmatizer> lem;
  if (!a.lemmatizer.empty()) lem = std::make_unique<biasstats::ProcessLemmatizer>(a.lemmatizer);
  if (!a.lemma_dict.empty())
    lem = std::make_unique<biasstats::DictionaryLemmatizer>(biasstats::DictionaryLemmatizer::from_tsv(a.lemma_dict));
  std::vector<Label> labels;
  if (a.label == "all")
    labels = {Label::Positive, Label::Negative};
  else
    labels = {label_arg(a.label)};
  json doc = json::object();
  std::ostringstream o;
  o << std::setprecision(6);
  if (!a.out.empty() && !wants_json(a.out)) o << "label\trank\tterm\tscore\n";
  for (Label l : labels) {
    const auto terms = biasstats::top_k_terms(c, l, a.k, lem.get());
    json arr = json::array();
    if (a.out.empty()) o << to_string(l) << "\n";
    for (const auto& t : terms) {
      arr.push_back({{"rank", t.rank}, {"term", t.term}, {"score", t.score}});
      if (a.out.empty())
        o << std::setw(4) << t.rank << "  " << t.term << "  " << t.score << "\n";
      else
        o << to_string(l) << '\t' << t.rank << '\t' << t.term << '\t' << t.score << "\n";
    }
    doc[std::string(to_string(l))] = arr;
  }
  emit(a.out, wants_json(a.out) ? doc.dump(1) + "\n" : o.str());
}

// ---------------------------------------------------------------- debias

struct DebiasArgs {
  std::string prompt = "mix", in, out, provider = "openai", label = "POSITIVE";
  std::size_t limit = 0, max_in_flight = 4;
  std::uint64_t seed = 0;
  int retries = 3;
  bool auto_accept = false;
};

void run_debias(const DebiasArgs& a) {
  const auto c = load(a.in);
  std::vector<corpus::Article> articles;
  for (const auto& art : c.articles())
    if (art.label == label_arg(a.label)) articles.push_back(art);
  if (a.limit && articles.size() > a.limit) articles.resize(a.limit);
  debias::BatchOptions opt;
  if (a.prompt == "p1")
    opt.prompt_mix = {{PromptId::P1, 1.0}};
  else if (a.prompt == "p2")
    opt.prompt_mix = {{PromptId::P2, 1.0}};
  else if (a.prompt != "mix")
    throw Error("unknown prompt '" + a.prompt + "' (p1, p2 or mix)");
  opt.seed = a.seed;
  opt.max_in_flight = a.max_in_flight;
  opt.retry.max_attempts = a.retries;
  const bool auto_accept = a.auto_accept;
  const fs::path out = a.out;
  std::size_t done = 0;
  opt.on_record = [&](const debias::GenerationRecord& r) {
    auto copy = r;
    if (!auto_accept && copy.status == debias::RecordStatus::Ok) copy.status = debias::RecordStatus::PendingReview;
    debias::append_record(out, copy);
    std::fprintf(stderr, "[%zu/%zu] %s %s\n", ++done, articles.size(), copy.record_id.c_str(),
                 std::string(debias::to_string(copy.status)).c_str());
  };
  auto p = make_provider(a.provider);
  const auto records = debias::run_batch(articles, *p, opt);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.status == debias::RecordStatus::Failed;
  std::fprintf(stderr, "%zu records, %zu failed\n", records.size(), failed);
}

struct BuildArgs {
  std::string records, source, out, name = "debiased";
  bool auto_accept = false;
};

void run_build_debiased(const BuildArgs& a) {
  const auto records = debias::load_records(a.records);
  std::vector<debias::GenerationRecord> usable;
  for (const auto& r : records)
    if (r.status == debias::RecordStatus::Accepted || (a.auto_accept && r.status == debias::RecordStatus::Ok))
      usable.push_back(r);
  const auto c = debias::build_debiased_corpus(
      usable, load(a.source), a.auto_accept ? debias::AcceptMode::AutoAccept : debias::AcceptMode::ReviewedOnly, a.name);
  corpus::save_corpus(c, a.out);
  std::fprintf(stderr, "%zu of %zu records -> %s\n", c.size(), records.size(), a.out.c_str());
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string pairs, source, debiased, report, embedder_url, write_pairs;
  std::size_t max_in_flight = 4;
};

void run_verify(const VerifyArgs& a) {
  std::vector<simscore::TextPair> pairs;
  if (!a.pairs.empty())
    pairs = simscore::load_pairs(a.pairs);
  else if (!a.source.empty() && !a.debiased.empty())
    pairs = simscore::pairs_from_corpora(load(a.source), load(a.debiased));
  else
    throw Error("verify needs --pairs, or --source with --debiased");
  if (!a.write_pairs.empty()) simscore::save_pairs(a.write_pairs, pairs);
  std::unique_ptr<simscore::Embedder> e;
  if (a.embedder_url.empty() || a.embedder_url == "hash")
    e = std::make_unique<simscore::HashEmbedder>();
  else
    e = std::make_unique<simscore::HttpEmbedder>(a.embedder_url);
  const auto report = simscore::corpus_similarity(pairs, *e, a.max_in_flight);
  emit(a.report, simscore::report_tsv(report));
  std::fprintf(stderr, "P %.4f  R %.4f  F1 %.4f  (%zu pairs, %zu failed)\n", report.aggregate.precision,
               report.aggregate.recall, report.aggregate.f1, report.pairs.size(), report.n_failed);
}

// ---------------------------------------------------------------- setups, training, prediction

struct SetupArgs {
  std::string kind = "BIASED", source, debiased, out;
  std::uint64_t seed = 0;
  evalx::SetupSizes sizes;
};

void run_setup(const SetupArgs& a) {
  auto kind = evalx::parse_setup_kind(a.kind);
  if (!kind) throw Error("unknown setup kind '" + a.kind + "'");
  const auto src = load(a.source);
  std::optional<corpus::Corpus> deb;
  if (!a.debiased.empty()) deb = load(a.debiased);
  const auto s = evalx::build_setup(*kind, src, deb ? &*deb : nullptr, a.seed, a.sizes);
  s.validate(a.sizes);
  emit(a.out, evalx::setup_to_json(s) + "\n");
}

struct TrainArgs {
  std::string train, setup, source, debiased, out, heldout;
  model::Hyper hyper;
  std::size_t max_tokens = model::kDefaultMaxTokens;
};

void run_train(const TrainArgs& a) {
  std::vector<corpus::Article> train;
  std::string trained_on;
  if (!a.setup.empty()) {
    const auto s = evalx::setup_from_json(slurp(a.setup));
    const auto src = load(a.source);
    std::optional<corpus::Corpus> deb;
    if (!a.debiased.empty()) deb = load(a.debiased);
    train = evalx::resolve(s, src, deb ? &*deb : nullptr);
    trained_on = std::string(evalx::to_string(s.kind)) + "@" + std::to_string(s.seed);
    if (!a.heldout.empty()) corpus::save_corpus(evalx::held_out(s, src, deb ? &*deb : nullptr), a.heldout);
  } else if (!a.train.empty()) {
    const auto c = load(a.train);
    train = c.articles();
    trained_on = c.name();
  } else {
    throw Error("train needs --train, or --setup with --source");
  }
  const auto r = model::train_baseline(train, a.hyper, trained_on, a.max_tokens);
  model::save_model(r.model, a.out);
  std::fprintf(stderr, "%zu articles, %zu terms, loss %.4f -> %.4f\n", train.size(), r.model.vocabulary().size(),
               r.loss_history.front(), r.loss_history.back());
}

struct PredictArgs {
  std::string model, in, out, model_id;
};

void run_predict(const PredictArgs& a) {
  const auto m = model::load_model(a.model);
  const auto set = model::predict_corpus(m, load(a.in), a.model_id.empty() ? fs::path(a.model).stem().string() : a.model_id);
  model::save_predictions(set, a.out);
}

struct JudgeArgs {
  std::string in, out, provider = "openai", model_id;
  int retries = 3;
};

void run_judge(const JudgeArgs& a) {
  const auto c = load(a.in);
  auto p = make_provider(a.provider);
  model::JudgeConfig cfg;
  cfg.retry.max_attempts = a.retries;
  model::PredictionSet set;
  set.model_id = a.model_id.empty() ? p->model() : a.model_id;
  set.dataset_id = c.name();
  for (const auto& art : c.articles()) {
    const auto r = model::llm_judge(art, *p, cfg);
    set.items.push_back({art.id, r.predicted, std::nullopt});
  }
  model::save_predictions(set, a.out);
  std::fprintf(stderr, "%zu items, nonresponse rate %.3f\n", set.items.size(), set.nonresponse_rate());
}

// ---------------------------------------------------------------- eval / compare

struct EvalArgs {
  std::string pred, gold, report = "table", out;
};

void run_eval(const EvalArgs& a) {
  const auto r = evalx::evaluate(model::import_predictions(a.pred), load(a.gold));
  if (a.report == "json")
    emit(a.out, evalx::report_to_json(r) + "\n");
  else if (a.report == "table")
    emit(a.out, evalx::report_table(r));
  else
    throw Error("unknown report format '" + a.report + "' (json or table)");
}

struct CompareArgs {
  std::string a, b, format = "table", out;
};

void run_compare(const CompareArgs& c) {
  const auto d = evalx::compare_reports(evalx::report_from_json(slurp(c.a)), evalx::report_from_json(slurp(c.b)));
  emit(c.out, c.format == "json" ? evalx::delta_to_json(d) + "\n" : evalx::delta_table(d));
}

// ---------------------------------------------------------------- explain

struct ExplainArgs {
  std::string model, in, annotations, out_dir;
  std::size_t k = 10;
};

void run_explain(const ExplainArgs& a) {
  const auto m = model::load_model(a.model);
  auto c = load(a.in);
  if (!a.annotations.empty()) c = corpus::load_annotations(a.annotations, c);
  fs::create_directories(a.out_dir);
  std::string tsv = explain::alignment_tsv_header();
  std::size_t n = 0;
  for (const auto& art : c.articles()) {
    std::vector<corpus::AnnotatedSpan> spans;
    for (const auto& s : c.annotations())
      if (s.article_id == art.id) spans.push_back(s);
    if (!a.annotations.empty() && spans.empty()) continue;
    const auto att = explain::occlusion_attribution(m, art);
    std::string file = art.id;
    for (char& ch : file)
      if (ch == '/' || ch == '\\') ch = '_';
    emit((fs::path(a.out_dir) / (file + ".html")).string(), explain::heatmap_html(art, att, spans));
    if (!spans.empty()) tsv += explain::alignment_tsv_row(explain::align(att, spans, a.k));
    ++n;
  }
  emit((fs::path(a.out_dir) / "align.tsv").string(), tsv);
  std::fprintf(stderr, "%zu heatmaps in %s\n", n, a.out_dir.c_str());
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
  std::string records, decisions, bind = "127.0.0.1:8080", reports_dir, static_dir, source;
};

void run_serve(const ServeArgs& a) {
  std::shared_ptr<const corpus::Corpus> src;
  if (!a.source.empty()) src = std::make_shared<const corpus::Corpus>(load(a.source));
  auto store = reportd::ReviewStore::open(a.records, a.decisions, src);
  reportd::ServerOptions opt;
  std::tie(opt.host, opt.port) = reportd::parse_bind_address(a.bind);
  opt.reports_dir = a.reports_dir;
  opt.static_dir = a.static_dir;
  reportd::ReviewServer server(store, opt);
  const int port = server.bind();
  const auto s = store.stats();
  std::fprintf(stderr, "serving %s:%d (%zu pending, %zu decided)\n", opt.host.c_str(), port, s.n_pending,
               s.n_accepted + s.n_rejected);
  server.run();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satire corpus bias analysis and debiasing"};
  app.require_subcommand(1);

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Per-label word and sentence statistics");
  c_stats->add_option("--in", stats.in, "Corpus (JSONL or CSV)")->required();
  c_stats->add_option("--label", stats.label, "POSITIVE, NEGATIVE or all");
  c_stats->add_option("--out", stats.out, "Output file (.json or TSV); table on stdout when omitted");

  TopkArgs topk;
  auto* c_topk = app.add_subcommand("topk", "Top-k TF-IDF terms per label");
  c_topk->add_option("--in", topk.in, "Corpus")->required();
  c_topk->add_option("--label", topk.label, "POSITIVE, NEGATIVE or all");
  c_topk->add_option("-k,--k", topk.k, "Number of terms");
  c_topk->add_option("--lemmatizer", topk.lemmatizer, "External command, one token per line in and out");
  c_topk->add_option("--lemma-dict", topk.lemma_dict, "TSV of form<TAB>lemma");
  c_topk->add_option("--out", topk.out, "Output file (.json or TSV)");

  DebiasArgs deb;
  auto* c_deb = app.add_subcommand("debias", "Rewrite articles through a chat model");
  c_deb->add_option("--prompt", deb.prompt, "p1, p2 or mix");
  c_deb->add_option("--in", deb.in, "Source corpus")->required();
  c_deb->add_option("--out", deb.out, "Generation records JSONL (appended)")->required();
  c_deb->add_option("--provider", deb.provider, "openai (env), echo or fixture:<path>");
  c_deb->add_option("--label", deb.label, "Articles to rewrite");
  c_deb->add_option("--limit", deb.limit, "Rewrite at most this many articles");
  c_deb->add_option("--seed", deb.seed, "Prompt assignment seed");
  c_deb->add_option("--max-in-flight", deb.max_in_flight, "Concurrent provider calls");
  c_deb->add_option("--retries", deb.retries, "Attempts per article");
  c_deb->add_flag("--auto-accept", deb.auto_accept, "Keep successful records as OK instead of queuing review");

  BuildArgs build;
  auto* c_build = app.add_subcommand("build-debiased", "Accepted records into a debiased corpus");
  c_build->add_option("--records", build.records, "Generation records")->required();
  c_build->add_option("--source", build.source, "Source corpus")->required();
  c_build->add_option("--out", build.out, "Output corpus JSONL")->required();
  c_build->add_option("--name", build.name, "Corpus name");
  c_build->add_flag("--auto-accept", build.auto_accept, "Also take unreviewed OK records");

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "Token-level similarity of original and rewritten texts");
  c_ver->add_option("--pairs", ver.pairs, "Pairs JSONL");
  c_ver->add_option("--source", ver.source, "Original corpus (with --debiased)");
  c_ver->add_option("--debiased", ver.debiased, "Debiased corpus (with --source)");
  c_ver->add_option("--write-pairs", ver.write_pairs, "Save the pairs used");
  c_ver->add_option("--embedder", ver.embedder_url, "Embedding service base URL, or hash");
  c_ver->add_option("--max-in-flight", ver.max_in_flight, "Concurrent embedder calls");
  c_ver->add_option("--report", ver.report, "Report TSV");

  SetupArgs setup;
  auto* c_setup = app.add_subcommand("setup", "Build a BIASED, DEBIASED or HYBRID training setup");
  c_setup->add_option("--kind", setup.kind, "BIASED, DEBIASED or HYBRID");
  c_setup->add_option("--source", setup.source, "Source corpus")->required();
  c_setup->add_option("--debiased", setup.debiased, "Debiased corpus");
  c_setup->add_option("--seed", setup.seed, "Sampling seed");
  c_setup->add_option("--positives", setup.sizes.positives, "Positive count");
  c_setup->add_option("--negatives", setup.sizes.negatives, "Negative count");
  c_setup->add_option("--hybrid-debiased", setup.sizes.hybrid_debiased, "Debiased positives in HYBRID");
  c_setup->add_option("--out", setup.out, "Setup JSON");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train the logistic-regression baseline");
  c_train->add_option("--train", train.train, "Training corpus");
  c_train->add_option("--setup", train.setup, "Setup JSON (with --source)");
  c_train->add_option("--source", train.source, "Source corpus for --setup");
  c_train->add_option("--debiased", train.debiased, "Debiased corpus for --setup");
  c_train->add_option("--heldout", train.heldout, "Write the unused source articles here");
  c_train->add_option("--lr", train.hyper.learning_rate, "Learning rate");
  c_train->add_option("--epochs", train.hyper.epochs, "Epochs");
  c_train->add_option("--l2", train.hyper.l2, "L2 strength");
  c_train->add_option("--max-tokens", train.max_tokens, "Input token cap");
  c_train->add_option("--out", train.out, "Model JSON")->required();

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "Predict a corpus with a trained baseline");
  c_pred->add_option("--model", pred.model, "Model JSON")->required();
  c_pred->add_option("--in", pred.in, "Corpus")->required();
  c_pred->add_option("--out", pred.out, "Predictions TSV")->required();
  c_pred->add_option("--model-id", pred.model_id, "Model id recorded in the file");

  JudgeArgs judge;
  auto* c_judge = app.add_subcommand("judge", "Classify a corpus with a chat model");
  c_judge->add_option("--in", judge.in, "Corpus")->required();
  c_judge->add_option("--out", judge.out, "Predictions TSV")->required();
  c_judge->add_option("--provider", judge.provider, "openai (env), echo or fixture:<path>");
  c_judge->add_option("--model-id", judge.model_id, "Model id recorded in the file");
  c_judge->add_option("--retries", judge.retries, "Attempts per article");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Score predictions against gold labels");
  c_eval->add_option("--pred", ev.pred, "Predictions TSV")->required();
  c_eval->add_option("--gold", ev.gold, "Gold corpus")->required();
  c_eval->add_option("--report", ev.report, "json or table");
  c_eval->add_option("--out", ev.out, "Output file");

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Point deltas between two reports (b - a)");
  c_cmp->add_option("--a", cmp.a, "Report JSON")->required();
  c_cmp->add_option("--b", cmp.b, "Report JSON")->required();
  c_cmp->add_option("--format", cmp.format, "json or table");
  c_cmp->add_option("--out", cmp.out, "Output file");

  ExplainArgs ex;
  auto* c_ex = app.add_subcommand("explain", "Occlusion heatmaps and span alignment");
  c_ex->add_option("--model", ex.model, "Model JSON")->required();
  c_ex->add_option("--in", ex.in, "Corpus")->required();
  c_ex->add_option("--annotations", ex.annotations, "FAKE/REAL span JSONL; limits output to annotated articles");
  c_ex->add_option("--out-dir", ex.out_dir, "Output directory")->required();
  c_ex->add_option("-k,--k", ex.k, "Top-k for precision");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Review service");
  c_serve->add_option("--records", serve.records, "Generation records")->required();
  c_serve->add_option("--decisions", serve.decisions, "Decision log JSONL")->required();
  c_serve->add_option("--bind", serve.bind, "host:port");
  c_serve->add_option("--source", serve.source, "Source corpus for original texts");
  c_serve->add_option("--reports-dir", serve.reports_dir, "Directory with stats/topk/eval/align reports");
  c_serve->add_option("--static-dir", serve.static_dir, "UI bundle");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_stats) run_stats(stats);
    if (*c_topk) run_topk(topk);
    if (*c_deb) run_debias(deb);
    if (*c_build) run_build_debiased(build);
    if (*c_ver) run_verify(ver);
    if (*c_setup) run_setup(setup);
    if (*c_train) run_train(train);
    if (*c_pred) run_predict(pred);
    if (*c_judge) run_judge(judge);
    if (*c_eval) run_eval(ev);
    if (*c_cmp) run_compare(cmp);
    if (*c_ex) run_explain(ex);
    if (*c_serve) run_serve(serve);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
