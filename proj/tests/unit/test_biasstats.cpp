#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "satdebias/biasstats.hpp"
#include "satdebias/error.hpp"
#include "satdebias/random.hpp"
#include "support.hpp"

using namespace satdebias;
using namespace satdebias::biasstats;
using corpus::Article;
using corpus::Corpus;

namespace {

Corpus make_corpus(const std::vector<std::pair<Label, std::string>>& docs) {
  std::vector<Article> arts;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    Article a;
    a.id = "d" + std::to_string(i);
    a.label = docs[i].first;
    a.body = docs[i].second;
    arts.push_back(a);
  }
  return Corpus("t", arts);
}

}  // namespace

TEST_CASE("corpus_stats averages words and sentences") {
  auto c = make_corpus({{Label::Positive, "Bir iki üç. Dört beş!"},
                        {Label::Positive, "Altı yedi sekiz dokuz on on bir. On iki"},
                        {Label::Negative, "Tek cümle burada."}});
  auto pos = corpus_stats(c, Label::Positive);
  CHECK(pos.n_articles == 2);
  CHECK(pos.avg_words == doctest::Approx(7.0));
  CHECK(pos.avg_sentences == doctest::Approx(2.0));
  CHECK(pos.avg_words_per_sentence == doctest::Approx(3.5));
  auto all = corpus_stats(c, std::nullopt);
  CHECK(all.n_articles == 3);
  CHECK(all.avg_words == doctest::Approx(17.0 / 3));
  auto only_neg = make_corpus({{Label::Negative, "x"}});
  CHECK_THROWS_AS(corpus_stats(only_neg, Label::Positive), InvariantError);
}

TEST_CASE("smoothed idf") {
  CHECK(smoothed_idf(10, 10) == 1.0);
  CHECK(smoothed_idf(3, 1) == doctest::Approx(std::log(2.0) + 1));
}

TEST_CASE("top_k_terms hand example") {
  // N = 3; "kedi" df 2, "köpek" df 1, "kuş" df 2
  auto c = make_corpus({{Label::Positive, "kedi kedi köpek"}, {Label::Positive, "kuş"}, {Label::Negative, "kedi kuş"}});
  auto top = top_k_terms(c, Label::Positive, 10);
  REQUIRE(top.size() == 3);
  const double idf1 = std::log(4.0 / 2.0) + 1, idf2 = std::log(4.0 / 3.0) + 1;
  CHECK(top[0].term == "kuş");
  CHECK(top[0].score == doctest::Approx(0.5 * idf2));
  CHECK(top[1].term == "kedi");
  CHECK(top[1].score == doctest::Approx((2.0 / 3) / 2 * idf2));
  CHECK(top[2].term == "köpek");
  CHECK(top[2].score == doctest::Approx((1.0 / 3) / 2 * idf1));
  CHECK(top[2].rank == 3);
  CHECK(top_k_terms(c, Label::Positive, 1).size() == 1);
  CHECK(top_k_terms(c, Label::Positive, 0).empty());
}

TEST_CASE("top_k_terms ties fall back to byte order") {
  auto c = make_corpus({{Label::Positive, "b a"}, {Label::Negative, "c"}});
  auto top = top_k_terms(c, Label::Positive, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].score == top[1].score);
  CHECK(top[0].term == "a");
}

TEST_CASE("top_k_terms agrees with the brute-force scorer on random corpora") {
  const char* alphabet[] = {"ak", "bal", "can", "dal", "el", "fil"};
  SeededRng rng(11);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 2 + rng.index(4);
    std::vector<std::pair<Label, std::string>> docs;
    std::vector<std::vector<std::string>> words;
    std::vector<bool> want;
    for (std::size_t i = 0; i < n; ++i) {
      std::string body;
      for (std::size_t k = 1 + rng.index(5); k > 0; --k) body += std::string(alphabet[rng.index(6)]) + " ";
      const Label l = i == 0 ? Label::Positive : (rng.index(2) ? Label::Positive : Label::Negative);
      docs.emplace_back(l, body);
      words.push_back(oracle::split_words(body));
      want.push_back(l == Label::Positive);
    }
    const auto expected = oracle::tfidf_rank(words, want);
    const auto got = top_k_terms(make_corpus(docs), Label::Positive, 6);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].term == expected[i].first);
      CHECK(got[i].score == expected[i].second);
    }
  }
}

TEST_CASE("lemmatizers") {
  DictionaryLemmatizer dict({{"kediler", "kedi"}, {"kedisi", "kedi"}});
  CHECK(dict.lemmatize({"kediler", "köpek", "kedisi"}) == std::vector<std::string>{"kedi", "köpek", "kedi"});

  auto c = make_corpus({{Label::Positive, "kediler kedisi"}, {Label::Negative, "köpek"}});
  auto top = top_k_terms(c, Label::Positive, 5, &dict);
  REQUIRE(top.size() == 1);
  CHECK(top[0].term == "kedi");

  testsupport::TempDir dir;
  auto tsv = dir.write("lemmas.tsv", "kediler\tkedi\n");
  CHECK(DictionaryLemmatizer::from_tsv(tsv.string()).lemmatize({"kediler"})[0] == "kedi");

  ProcessLemmatizer upper("tr a-z A-Z");
  CHECK(upper.lemmatize({"ab", "c"}) == std::vector<std::string>{"AB", "C"});
  ProcessLemmatizer broken("head -n 1");
  CHECK_THROWS_AS(broken.lemmatize({"a", "b"}), Error);
}
