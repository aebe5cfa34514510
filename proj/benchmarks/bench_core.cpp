#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "satdebias/biasstats.hpp"
#include "satdebias/explain.hpp"
#include "satdebias/model.hpp"
#include "satdebias/random.hpp"
#include "satdebias/simscore.hpp"
#include "satdebias/text.hpp"

using namespace satdebias;

namespace {

std::string turkish_text(SeededRng& rng, std::size_t words) {
  static const char* vocab[] = {"İstanbul'da", "yapılan", "açıklamada", "bakanlık", "vatandaşların", "ağır",
                                "şartlar", "altında", "çalıştığı", "öğrenildi.", "Ülke", "gündemi", "değişti!",
                                "iddia", "edildi,", "haber", "kaynakları", "yeni", "yıl", "bütçesi"};
  std::string s;
  for (std::size_t i = 0; i < words; ++i) s += std::string(vocab[rng.index(20)]) + " ";
  return s;
}

corpus::Corpus synthetic_corpus(std::size_t per_label, std::size_t words) {
  SeededRng rng(1);
  std::vector<corpus::Article> arts;
  for (std::size_t i = 0; i < 2 * per_label; ++i) {
    corpus::Article a;
    a.id = "a" + std::to_string(i);
    a.label = i % 2 ? Label::Negative : Label::Positive;
    a.body = turkish_text(rng, words);
    arts.push_back(std::move(a));
  }
  return corpus::Corpus("bench", std::move(arts));
}

simscore::TokenEmbeddings unit_rows(SeededRng& rng, std::size_t n, std::size_t d) {
  std::vector<std::string> tokens;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    tokens.push_back("t" + std::to_string(i));
    double sq = 0;
    const std::size_t base = values.size();
    for (std::size_t k = 0; k < d; ++k) {
      values.push_back(rng.uniform() * 2 - 1);
      sq += values.back() * values.back();
    }
    for (std::size_t k = 0; k < d; ++k) values[base + k] /= std::sqrt(sq);
  }
  return simscore::TokenEmbeddings(tokens, values, d);
}

}  // namespace

static void BM_GreedyMatch(benchmark::State& state) {
  SeededRng rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = unit_rows(rng, n, 768);
  const auto b = unit_rows(rng, n, 768);
  for (auto _ : state) benchmark::DoNotOptimize(simscore::greedy_match_score(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GreedyMatch)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNSquared);

static void BM_Tokenize(benchmark::State& state) {
  SeededRng rng(3);
  const std::string text = turkish_text(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(text::tokenize(text, Language::Tr));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(300)->Arg(3000);

static void BM_TopKTerms(benchmark::State& state) {
  const auto c = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 300);
  for (auto _ : state) benchmark::DoNotOptimize(biasstats::top_k_terms(c, Label::Positive, 10));
}
BENCHMARK(BM_TopKTerms)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_TrainBaseline(benchmark::State& state) {
  const auto c = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 300);
  for (auto _ : state) benchmark::DoNotOptimize(model::train_baseline(c.articles(), model::Hyper{}));
}
BENCHMARK(BM_TrainBaseline)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Occlusion(benchmark::State& state) {
  const auto c = synthetic_corpus(50, 300);
  const auto m = model::train_baseline(c.articles(), model::Hyper{}).model;
  for (auto _ : state) benchmark::DoNotOptimize(explain::occlusion_attribution(m, c.articles().front()));
}
BENCHMARK(BM_Occlusion);

BENCHMARK_MAIN();
