#include <doctest.h>

#include <set>
#include <string>

#include "satdebias/corpus.hpp"
#include "satdebias/error.hpp"
#include "satdebias/random.hpp"
#include "support.hpp"

using namespace satdebias;
using namespace satdebias::corpus;
using testsupport::TempDir;

namespace {

const char* kThree =
    R"({"id":"z-1","source":"zaytung","label":"SATIRICAL","language":"tr","title":"Başlık","body":"Bir gün bir haber."})"
    "\n"
    R"({"id":"a-1","source":"aa","label":"NON-SATIRICAL","language":"tr","body":"Ankara'da toplantı yapıldı.","metadata":{"city":"Ankara"}})"
    "\n\n"
    R"({"id":"z-2","source":"zaytung","label":"POSITIVE","body":"Uzaylılar vergi ödedi.","timestamp":"2021-03-04"})"
    "\n";

Article make(std::string id, Label label, std::string body) {
  Article a;
  a.id = std::move(id);
  a.label = label;
  a.body = std::move(body);
  return a;
}

}  // namespace

TEST_CASE("load a small JSONL corpus") {
  TempDir dir;
  auto c = load_corpus(dir.write("c.jsonl", kThree), Format::Jsonl);
  REQUIRE(c.size() == 3);
  CHECK(c.name() == "c");
  CHECK(c.articles()[0].id == "z-1");
  CHECK(c.articles()[1].label == Label::Negative);
  CHECK(c.articles()[1].metadata.at("city") == "Ankara");
  CHECK(c.at("z-2").timestamp == "2021-03-04");
  CHECK(c.count(Label::Positive) == 2);
  CHECK(c.position("a-1") == 1u);
  CHECK(c.find("nope") == nullptr);
  CHECK_THROWS_AS(c.at("nope"), InvariantError);
}

TEST_CASE("duplicate ids are reported with the id and line") {
  TempDir dir;
  const std::string text = R"({"id":"z-17","label":"SATIRICAL","body":"a"})"
                           "\n"
                           R"({"id":"z-17","label":"SATIRICAL","body":"b"})"
                           "\n";
  try {
    load_corpus(dir.write("d.jsonl", text), Format::Jsonl);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("z-17") != std::string::npos);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("malformed records name their line") {
  TempDir dir;
  auto p = dir.write("bad.jsonl", std::string(R"({"id":"x","label":"SATIRICAL","body":"ok"})") + "\n{not json\n");
  try {
    load_corpus(p, Format::Jsonl);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_corpus(dir.write("l.jsonl", R"({"id":"x","label":"MAYBE","body":"ok"})"), Format::Jsonl),
                  ParseError);
  CHECK_THROWS_AS(load_corpus(dir.write("e.jsonl", R"({"id":"x","label":"SATIRICAL","body":"  "})"), Format::Jsonl),
                  ParseError);
  CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl", Format::Jsonl), Error);
}

TEST_CASE("Kaggle sarcasm CSV") {
  TempDir dir;
  auto p = dir.write("sarcasm.csv",
                     "article_link,headline,is_sarcastic\n"
                     "https://x/1,\"area man, 45, \"\"wins\"\"\",1\n"
                     "https://x/2,senate passes bill,0\n");
  auto c = load_corpus(p, format_for(p));
  REQUIRE(c.size() == 2);
  CHECK(c.articles()[0].body == "area man, 45, \"wins\"");
  CHECK(c.articles()[0].source == Source::Onion);
  CHECK(c.articles()[0].label == Label::Positive);
  CHECK(c.articles()[1].source == Source::Huffpost);
  CHECK(c.articles()[1].language == Language::En);
  CHECK(c.articles()[0].metadata.at("article_link") == "https://x/1");
}

TEST_CASE("generic CSV with a custom label map") {
  TempDir dir;
  auto map = dir.write("labels.json", R"({"ironytr": {"ironi": "POSITIVE", "düz": "NEGATIVE"}})");
  LoadOptions opts;
  opts.labels = LabelMap::from_json_file(map);
  opts.csv_language = Language::Tr;
  auto p = dir.write("irony.csv", "id,source,label,body,extra\nt1,ironytr,ironi,\"çok güzel,\nharika\",x\nt2,ironytr,düz,normal,y\n");
  auto c = load_corpus(p, Format::Csv, opts);
  REQUIRE(c.size() == 2);
  CHECK(c.articles()[0].body == "çok güzel,\nharika");
  CHECK(c.articles()[0].label == Label::Positive);
  CHECK(c.articles()[1].metadata.at("extra") == "y");
  CHECK_THROWS_AS(load_corpus(dir.write("h.csv", "a,b\n1,2\n"), Format::Csv), ParseError);
}

TEST_CASE("save and reload is structurally equal") {
  TempDir dir;
  SeededRng rng(5);
  const char* pieces[] = {"haber", "İ", "\"", "\\", "\n", "çğış", "😀", " ", ",", "a"};
  for (int round = 0; round < 20; ++round) {
    std::vector<Article> arts;
    const std::size_t n = 1 + rng.index(6);
    for (std::size_t i = 0; i < n; ++i) {
      Article a = make("id-" + std::to_string(i), rng.index(2) ? Label::Positive : Label::Negative, "x");
      for (std::size_t k = rng.index(12); k > 0; --k) a.body += pieces[rng.index(10)];
      a.title = pieces[rng.index(10)];
      a.language = rng.index(2) ? Language::Tr : Language::En;
      a.source = rng.index(2) ? Source::Zaytung : Source::Generated;
      if (rng.index(2)) a.timestamp = "2022-01-0" + std::to_string(1 + rng.index(9));
      if (rng.index(2)) a.metadata["k" + std::to_string(i)] = pieces[rng.index(10)];
      arts.push_back(std::move(a));
    }
    Corpus c("rt", arts);
    save_corpus(c, dir / "rt.jsonl");
    CHECK(load_corpus(dir / "rt.jsonl", Format::Jsonl) == c);
  }
}

TEST_CASE("annotations attach and validate") {
  TempDir dir;
  Corpus c("c", {make("a", Label::Positive, "Uzaylılar vergi ödedi."), make("b", Label::Negative, "Düz haber.")});
  auto ok = dir.write("ok.jsonl", R"({"article_id":"a","start":0,"end":9,"tag":"FAKE"})"
                                  "\n"
                                  R"({"article_id":"a","start":10,"end":15,"tag":"REAL"})"
                                  "\n");
  auto annotated = load_annotations(ok, c);
  CHECK(annotated.is_annotated("a"));
  CHECK_FALSE(annotated.is_annotated("b"));
  CHECK(annotated.annotated_ids() == std::vector<std::string>{"a"});
  CHECK(annotated.articles() == c.articles());
  CHECK(annotated.spans_for("a").size() == 2);

  auto empty = dir.write("empty.jsonl", R"({"article_id":"a","start":5,"end":5,"tag":"FAKE"})");
  CHECK_THROWS_AS(load_annotations(empty, c), ParseError);
  auto overlap = dir.write("ov.jsonl", R"({"article_id":"a","start":0,"end":4,"tag":"FAKE"})"
                                       "\n"
                                       R"({"article_id":"a","start":2,"end":6,"tag":"REAL"})");
  CHECK_THROWS_WITH_AS(load_annotations(overlap, c), doctest::Contains("overlapping"), ParseError);
  auto range = dir.write("r.jsonl", R"({"article_id":"b","start":0,"end":99,"tag":"FAKE"})");
  CHECK_THROWS_AS(load_annotations(range, c), ParseError);
  auto dangling = dir.write("d.jsonl", R"({"article_id":"zz","start":0,"end":1,"tag":"FAKE"})");
  CHECK_THROWS_WITH_AS(load_annotations(dangling, c), doctest::Contains("zz"), ParseError);
}

TEST_CASE("select_subset") {
  std::vector<Article> arts;
  for (int i = 0; i < 5; ++i) arts.push_back(make("p" + std::to_string(i), Label::Positive, "x"));
  for (int i = 0; i < 7; ++i) arts.push_back(make("n" + std::to_string(i), Label::Negative, "y"));
  Corpus c("c", arts);

  auto all = select_subset(c, Label::Positive, 5, 99);
  std::set<std::string> ids;
  for (const auto& a : all) ids.insert(a.id);
  CHECK(ids == std::set<std::string>{"p0", "p1", "p2", "p3", "p4"});

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto a = select_subset(c, Label::Negative, 4, seed);
    auto b = select_subset(c, Label::Negative, 4, seed);
    CHECK(a == b);
    std::set<std::string> seen;
    for (const auto& x : a) {
      CHECK(x.label == Label::Negative);
      CHECK(seen.insert(x.id).second);
    }
  }
  CHECK_THROWS_WITH_AS(select_subset(c, Label::Positive, 6, 1), doctest::Contains("only 5"), InvariantError);
}
