#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "satdebias/debias.hpp"
#include "satdebias/error.hpp"
#include "satdebias/evalx.hpp"
#include "satdebias/random.hpp"
#include "support.hpp"

using namespace satdebias;
using namespace satdebias::evalx;
using corpus::Article;
using corpus::Corpus;
using model::Predicted;
using model::PredictionItem;
using model::PredictionSet;

namespace {

Article doc(std::string id, Label label) {
  Article a;
  a.id = std::move(id);
  a.label = label;
  a.body = "gövde " + a.id;
  return a;
}

Corpus source_corpus(std::size_t n_pos, std::size_t n_neg) {
  std::vector<Article> arts;
  for (std::size_t i = 0; i < n_pos; ++i) arts.push_back(doc("z" + std::to_string(i), Label::Positive));
  for (std::size_t i = 0; i < n_neg; ++i) arts.push_back(doc("a" + std::to_string(i), Label::Negative));
  return Corpus("src", arts);
}

Corpus debiased_for(const Corpus& src, const std::string& skip = {}) {
  std::vector<Article> arts;
  for (const auto& a : src.articles()) {
    if (a.label != Label::Positive || a.id == skip) continue;
    Article g = doc(debias::debiased_id(a.id), Label::Positive);
    g.source = Source::Generated;
    g.metadata["source_article_id"] = a.id;
    arts.push_back(g);
  }
  return Corpus("deb", arts);
}

PredictionSet preds(const std::vector<std::pair<std::string, Predicted>>& items) {
  PredictionSet s;
  s.model_id = "m";
  s.dataset_id = "d";
  for (const auto& [id, p] : items) s.items.push_back(PredictionItem{id, p, std::nullopt});
  return s;
}

}  // namespace

TEST_CASE("setups share positives and negatives across kinds") {
  const auto src = source_corpus(30, 40);
  const auto deb = debiased_for(src);
  const SetupSizes sizes{10, 12, 5};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto b = build_setup(SetupKind::Biased, src, nullptr, seed, sizes);
    auto d = build_setup(SetupKind::Debiased, src, &deb, seed, sizes);
    auto h = build_setup(SetupKind::Hybrid, src, &deb, seed, sizes);
    b.validate(sizes);
    d.validate(sizes);
    h.validate(sizes);
    CHECK(b.negative == d.negative);
    CHECK(b.negative == h.negative);
    auto as_set = [](std::vector<std::string> v) { return std::set<std::string>(v.begin(), v.end()); };
    CHECK(as_set(positive_source_ids(d, &deb)) == as_set(b.positive_original));
    CHECK(as_set(positive_source_ids(h, &deb)) == as_set(b.positive_original));
    CHECK(h.positive_original.size() == 5);
    auto again = build_setup(SetupKind::Hybrid, src, &deb, seed, sizes);
    CHECK(again.positive_debiased == h.positive_debiased);
  }
  CHECK_THROWS_AS(build_setup(SetupKind::Debiased, src, nullptr, 1, sizes), InvariantError);
}

TEST_CASE("missing debiased counterpart names the source id") {
  const auto src = source_corpus(5, 5);
  const auto deb = debiased_for(src, "z3");
  CHECK_THROWS_WITH_AS(build_setup(SetupKind::Debiased, src, &deb, 7, SetupSizes{5, 5, 2}), doctest::Contains("z3"),
                       InvariantError);
  CHECK_THROWS_AS(build_setup(SetupKind::Biased, src, nullptr, 7, SetupSizes{6, 5, 2}), InvariantError);
}

TEST_CASE("resolve and held_out partition the source") {
  const auto src = source_corpus(12, 12);
  const auto deb = debiased_for(src);
  const SetupSizes sizes{6, 6, 3};
  auto h = build_setup(SetupKind::Hybrid, src, &deb, 3, sizes);
  auto train = resolve(h, src, &deb);
  CHECK(train.size() == 12);
  CHECK(std::count_if(train.begin(), train.end(), [](const Article& a) { return a.source == Source::Generated; }) == 3);
  auto rest = held_out(h, src, &deb);
  CHECK(rest.size() == 12);
  std::set<std::string> used;
  for (const auto& t : train) used.insert(t.metadata.count("source_article_id") ? t.metadata.at("source_article_id") : t.id);
  CHECK(used.size() == 12);
  for (const auto& a : rest.articles()) CHECK_FALSE(used.contains(a.id));
}

TEST_CASE("setup JSON round-trip and validation") {
  const auto src = source_corpus(5, 5);
  auto b = build_setup(SetupKind::Biased, src, nullptr, 9, SetupSizes{5, 5, 2});
  auto back = setup_from_json(setup_to_json(b));
  CHECK(back.kind == b.kind);
  CHECK(back.seed == 9);
  CHECK(back.positive_original == b.positive_original);
  CHECK_THROWS_AS(b.validate(), InvariantError);
  CHECK_THROWS_AS(setup_from_json("{}"), ParseError);
}

TEST_CASE("hand-computed confusion example") {
  Corpus gold("g", {doc("1", Label::Positive), doc("2", Label::Positive), doc("3", Label::Negative),
                    doc("4", Label::Negative)});
  auto r = evaluate(preds({{"1", Predicted::Positive}, {"2", Predicted::Negative}, {"3", Predicted::Positive},
                           {"4", Predicted::Negative}}),
                    gold);
  CHECK(r.accuracy == 0.5);
  CHECK(r.f1_macro == 0.5);
  CHECK(r.confusion[0][0] == 1);
  CHECK(r.confusion[0][1] == 1);
  CHECK(r.confusion[1][0] == 1);
  CHECK(r.confusion[1][1] == 1);
  r.validate();
}

TEST_CASE("perfect predictions and nonresponse exclusion") {
  Corpus gold("g", {doc("1", Label::Positive), doc("2", Label::Negative), doc("3", Label::Negative)});
  auto perfect = evaluate(preds({{"1", Predicted::Positive}, {"2", Predicted::Negative}, {"3", Predicted::Negative}}), gold);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.f1_macro == 1.0);
  CHECK(perfect.nonresponse_rate == 0.0);

  auto partial = evaluate(preds({{"1", Predicted::Positive}, {"2", Predicted::NonResponse}, {"3", Predicted::Positive}}), gold);
  CHECK(partial.n_excluded == 1);
  CHECK(partial.n_evaluated == 2);
  CHECK(partial.nonresponse_rate == doctest::Approx(1.0 / 3));
  CHECK(partial.accuracy == 0.5);
  CHECK(partial.negative.precision == 0.0);
  partial.validate();

  CHECK_THROWS_AS(evaluate(preds({{"1", Predicted::NonResponse}}), gold), InvariantError);
  CHECK_THROWS_AS(evaluate(preds({{"9", Predicted::Positive}}), gold), InvariantError);
}

TEST_CASE("metric identities on random sets") {
  SeededRng rng(8);
  for (int round = 0; round < 200; ++round) {
    const std::size_t half = 1 + rng.index(20);
    std::vector<Article> arts;
    std::vector<int> g, p;
    std::vector<std::pair<std::string, Predicted>> items;
    for (std::size_t i = 0; i < 2 * half; ++i) {
      const bool pos = i < half;
      arts.push_back(doc("d" + std::to_string(i), pos ? Label::Positive : Label::Negative));
      const bool pred = rng.index(2);
      items.emplace_back("d" + std::to_string(i), pred ? Predicted::Positive : Predicted::Negative);
      g.push_back(pos);
      p.push_back(pred);
    }
    auto r = evaluate(preds(items), Corpus("g", arts));
    CHECK(r.recall_micro == r.accuracy);
    CHECK(std::abs(r.f1_macro - r.f1_weighted) <= 1e-12);
    const auto want = oracle::metrics(g, p);
    CHECK(r.accuracy == doctest::Approx(want.accuracy).epsilon(1e-12));
    CHECK(r.f1_macro == doctest::Approx(want.f1_macro).epsilon(1e-12));

    auto shuffled = items;
    rng.shuffle(shuffled);
    auto r2 = evaluate(preds(shuffled), Corpus("g", arts));
    CHECK(r2.f1_macro == r.f1_macro);
    CHECK(r2.confusion == r.confusion);
  }
}

TEST_CASE("compare_reports and delta formatting") {
  MetricsReport a, b;
  a.dataset_id = b.dataset_id = "zaytung-aa";
  a.n_total = b.n_total = 10;
  a.f1_macro = 0.9256;
  b.f1_macro = 0.7226;
  auto d = compare_reports(a, b);
  CHECK(format_delta(d.f1_macro) == "(-20.30%)");
  CHECK(format_delta(compare_reports(a, a).f1_macro) == "(+0.00%)");
  b.dataset_id = "onion";
  CHECK_THROWS_AS(compare_reports(a, b), InvariantError);
  CHECK(delta_table(d).find("(-20.30%)") != std::string::npos);
}

TEST_CASE("report JSON round-trip") {
  Corpus gold("g", {doc("1", Label::Positive), doc("2", Label::Negative)});
  auto r = evaluate(preds({{"1", Predicted::Positive}, {"2", Predicted::Positive}}), gold);
  auto back = report_from_json(report_to_json(r));
  CHECK(back.f1_macro == r.f1_macro);
  CHECK(back.confusion == r.confusion);
  CHECK(back.positive.support == 1);
  back.validate();
  CHECK(report_table(r).find("accuracy") != std::string::npos);
}
