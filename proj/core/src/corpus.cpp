#include "satdebias/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "jsonl.hpp"
#include "satdebias/error.hpp"
#include "satdebias/random.hpp"
#include "satdebias/utf8.hpp"

namespace satdebias::corpus {

using detail::json;

std::string_view to_string(SpanTag tag) noexcept { return tag == SpanTag::Fake ? "FAKE" : "REAL"; }

std::optional<SpanTag> parse_span_tag(std::string_view text) noexcept {
  if (text == "FAKE") return SpanTag::Fake;
  if (text == "REAL") return SpanTag::Real;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(std::string name, std::vector<Article> articles,
               std::vector<AnnotatedSpan> annotations)
    : name_(std::move(name)), articles_(std::move(articles)) {
  index_.reserve(articles_.size());
  for (std::size_t i = 0; i < articles_.size(); ++i) {
    const Article& a = articles_[i];
    if (a.id.empty()) throw InvariantError("article at position " + std::to_string(i) + " has an empty id");
    if (utf8::trim(a.body).empty()) throw InvariantError("article '" + a.id + "' has an empty body");
    if (!index_.emplace(a.id, i).second) throw InvariantError("duplicate article id '" + a.id + "'");
  }
  if (!annotations.empty()) *this = with_annotations(std::move(annotations));
}

const Article* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &articles_[it->second];
}

const Article& Corpus::at(std::string_view id) const {
  const Article* a = find(id);
  if (!a) throw InvariantError("unknown article id '" + std::string(id) + "'");
  return *a;
}

std::optional<std::size_t> Corpus::position(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      articles_.begin(), articles_.end(), [label](const Article& a) { return a.label == label; }));
}

std::vector<const Article*> Corpus::with_label(Label label) const {
  std::vector<const Article*> out;
  for (const Article& a : articles_)
    if (a.label == label) out.push_back(&a);
  return out;
}

bool Corpus::is_annotated(std::string_view id) const {
  return std::any_of(annotations_.begin(), annotations_.end(),
                     [id](const AnnotatedSpan& s) { return s.article_id == id; });
}

std::vector<AnnotatedSpan> Corpus::spans_for(std::string_view id) const {
  std::vector<AnnotatedSpan> out;
  for (const AnnotatedSpan& s : annotations_)
    if (s.article_id == id) out.push_back(s);
  std::sort(out.begin(), out.end(),
            [](const AnnotatedSpan& a, const AnnotatedSpan& b) { return a.start < b.start; });
  return out;
}

std::vector<std::string> Corpus::annotated_ids() const {
  std::set<std::string, std::less<>> ids;
  for (const AnnotatedSpan& s : annotations_) ids.insert(s.article_id);
  std::vector<std::string> out;
  for (const Article& a : articles_)
    if (ids.contains(a.id)) out.push_back(a.id);
  return out;
}

Corpus Corpus::with_annotations(std::vector<AnnotatedSpan> spans) const {
  std::map<std::string, std::vector<const AnnotatedSpan*>> by_article;
  for (const AnnotatedSpan& s : spans) {
    const Article* a = find(s.article_id);
    if (!a) throw InvariantError("annotation references unknown article '" + s.article_id + "'");
    const std::size_t len = utf8::length(a->body);
    if (s.start >= s.end || s.end > len) {
      throw InvariantError("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                           ") out of range for article '" + s.article_id + "' (length " +
                           std::to_string(len) + ")");
    }
    by_article[s.article_id].push_back(&s);
  }
  for (const AnnotatedSpan& s : annotations_) by_article[s.article_id].push_back(&s);
  for (auto& [id, list] : by_article) {
    std::sort(list.begin(), list.end(),
              [](const AnnotatedSpan* a, const AnnotatedSpan* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->start < list[i - 1]->end) {
        throw InvariantError("overlapping spans on article '" + id + "': [" +
                             std::to_string(list[i - 1]->start) + "," + std::to_string(list[i - 1]->end) +
                             ") and [" + std::to_string(list[i]->start) + "," +
                             std::to_string(list[i]->end) + ")");
      }
    }
  }
  Corpus out = *this;
  out.annotations_.insert(out.annotations_.end(), std::make_move_iterator(spans.begin()),
                          std::make_move_iterator(spans.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Label normalization

LabelMap LabelMap::defaults() {
  LabelMap m;
  for (const char* raw : {"POSITIVE", "SATIRICAL", "IRONIC", "SARCASTIC", "1"})
    m.set("*", raw, Label::Positive);
  for (const char* raw : {"NEGATIVE", "NON-SATIRICAL", "NON-IRONIC", "NON-SARCASTIC", "0"})
    m.set("*", raw, Label::Negative);
  return m;
}

LabelMap LabelMap::from_json_file(const std::filesystem::path& path) {
  const json doc = [&] {
    try {
      return json::parse(detail::read_file(path));
    } catch (const json::parse_error& e) {
      throw ParseError(path.string(), 0, e.what());
    }
  }();
  if (!doc.is_object()) throw ParseError(path.string(), 0, "label map must be a JSON object");
  LabelMap m;
  for (const auto& [source, table] : doc.items()) {
    if (source != "*" && !parse_source(source))
      throw ParseError(path.string(), 0, "unknown source '" + source + "' in label map");
    if (!table.is_object()) throw ParseError(path.string(), 0, "table for '" + source + "' must be an object");
    for (const auto& [raw, value] : table.items()) {
      const auto label = value.is_string() ? parse_label(value.get<std::string>()) : std::nullopt;
      if (!label) throw ParseError(path.string(), 0, "label map entry '" + raw + "' must be POSITIVE or NEGATIVE");
      m.set(source, raw, *label);
    }
  }
  return m;
}

void LabelMap::set(std::string_view source_key, std::string raw, Label label) {
  tables_[std::string(source_key)][std::move(raw)] = label;
}

std::optional<Label> LabelMap::resolve(Source source, std::string_view raw) const {
  for (std::string_view key : {to_string(source), std::string_view("*")}) {
    auto t = tables_.find(key);
    if (t == tables_.end()) continue;
    auto it = t->second.find(raw);
    if (it != t->second.end()) return it->second;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Loading

std::optional<Format> parse_format(std::string_view text) noexcept {
  if (text == "jsonl") return Format::Jsonl;
  if (text == "csv") return Format::Csv;
  return std::nullopt;
}

Format format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? Format::Csv : Format::Jsonl;
}

namespace {

Label resolve_label(const LabelMap& labels, Source source, const std::string& raw,
                    const std::filesystem::path& path, std::size_t line) {
  auto label = labels.resolve(source, raw);
  if (!label) throw ParseError(path.string(), line, "unknown label '" + raw + "'");
  return *label;
}

Article article_from_json(const json& obj, const LabelMap& labels,
                          const std::filesystem::path& path, std::size_t line) {
  Article a;
  a.id = detail::require_string(obj, "id", path, line);
  const std::string source = detail::optional_string(obj, "source", path, line).value_or("other");
  auto src = parse_source(source);
  if (!src) throw ParseError(path.string(), line, "unknown source '" + source + "'");
  a.source = *src;
  a.label = resolve_label(labels, a.source, detail::require_string(obj, "label", path, line), path, line);
  const std::string lang = detail::optional_string(obj, "language", path, line).value_or("tr");
  auto language = parse_language(lang);
  if (!language) throw ParseError(path.string(), line, "unknown language '" + lang + "'");
  a.language = *language;
  a.title = detail::optional_string(obj, "title", path, line).value_or("");
  a.body = detail::require_string(obj, "body", path, line);
  a.timestamp = detail::optional_string(obj, "timestamp", path, line);
  if (auto it = obj.find("metadata"); it != obj.end() && !it->is_null()) {
    if (!it->is_object()) throw ParseError(path.string(), line, "field 'metadata' must be an object");
    for (const auto& [k, v] : it->items()) a.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return a;
}

// RFC 4180 reader. Each record remembers the physical line it started on.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<CsvRecord> read_csv(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  std::vector<CsvRecord> out;
  CsvRecord rec{1, {}};
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    rec.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty();
    if (!blank) out.push_back(std::move(rec));
    rec = CsvRecord{line, {}};
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw ParseError(path.string(), line, "stray quote inside unquoted field");
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw ParseError(path.string(), rec.line, "unterminated quoted field");
  if (!field.empty() || !rec.fields.empty()) end_record();
  return out;
}

std::vector<Article> articles_from_csv(const std::filesystem::path& path, const LoadOptions& options) {
  const auto records = read_csv(path);
  if (records.empty()) return {};
  const auto& header = records.front().fields;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (utf8::trim(header[i]) == name) return i;
    return std::nullopt;
  };
  auto cell = [&](const CsvRecord& r, std::size_t col) -> const std::string& {
    if (col >= r.fields.size())
      throw ParseError(path.string(), r.line,
                       "expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(r.fields.size()));
    return r.fields[col];
  };

  std::vector<Article> out;
  const auto sarcastic = column("is_sarcastic");
  const auto headline = column("headline");
  if (sarcastic && headline) {
    const auto link = column("article_link");
    for (std::size_t r = 1; r < records.size(); ++r) {
      const CsvRecord& rec = records[r];
      Article a;
      a.id = "sarcasm-" + std::to_string(r);
      const std::string raw(utf8::trim(cell(rec, *sarcastic)));
      a.source = raw == "1" ? Source::Onion : Source::Huffpost;
      a.label = resolve_label(options.labels, a.source, raw, path, rec.line);
      a.language = Language::En;
      a.body = cell(rec, *headline);
      if (link) a.metadata["article_link"] = cell(rec, *link);
      out.push_back(std::move(a));
    }
    return out;
  }

  const auto id = column("id");
  const auto label = column("label");
  const auto body = column("body");
  if (!id || !label || !body)
    throw ParseError(path.string(), records.front().line,
                     "CSV header needs is_sarcastic+headline or id+label+body columns");
  const auto source = column("source");
  const auto language = column("language");
  const auto title = column("title");
  const auto timestamp = column("timestamp");
  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& rec = records[r];
    Article a;
    a.id = cell(rec, *id);
    if (source) {
      auto s = parse_source(cell(rec, *source));
      if (!s) throw ParseError(path.string(), rec.line, "unknown source '" + cell(rec, *source) + "'");
      a.source = *s;
    }
    a.label = resolve_label(options.labels, a.source, cell(rec, *label), path, rec.line);
    a.language = options.csv_language;
    if (language) {
      auto l = parse_language(cell(rec, *language));
      if (!l) throw ParseError(path.string(), rec.line, "unknown language '" + cell(rec, *language) + "'");
      a.language = *l;
    }
    if (title) a.title = cell(rec, *title);
    a.body = cell(rec, *body);
    if (timestamp && !cell(rec, *timestamp).empty()) a.timestamp = cell(rec, *timestamp);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == *id || c == *label || c == *body || c == source || c == language || c == title ||
          c == timestamp)
        continue;
      a.metadata[header[c]] = cell(rec, c);
    }
    out.push_back(std::move(a));
  }
  return out;
}

// Row-level checks that need a line number; Corpus re-validates globally.
void check_rows(const std::vector<std::pair<std::size_t, Article>>& rows,
                const std::filesystem::path& path) {
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& [line, a] : rows) {
    if (a.id.empty()) throw ParseError(path.string(), line, "empty id");
    if (utf8::trim(a.body).empty()) throw ParseError(path.string(), line, "article '" + a.id + "' has an empty body");
    auto [it, inserted] = seen.emplace(a.id, line);
    if (!inserted)
      throw ParseError(path.string(), line,
                       "duplicate id '" + a.id + "' (first seen on line " + std::to_string(it->second) + ")");
  }
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, Format format, const LoadOptions& options) {
  std::vector<std::pair<std::size_t, Article>> rows;
  if (format == Format::Jsonl) {
    detail::for_each_line(path, [&](std::size_t line, std::string_view text) {
      rows.emplace_back(line, article_from_json(detail::parse_object(path, line, text), options.labels,
                                                path, line));
    });
  } else {
    // CSV rows are numbered by data row; ParseErrors inside already carry
    // physical lines.
    std::size_t row = 1;
    for (Article& a : articles_from_csv(path, options)) rows.emplace_back(++row, std::move(a));
  }
  check_rows(rows, path);
  std::vector<Article> articles;
  articles.reserve(rows.size());
  for (auto& [line, a] : rows) articles.push_back(std::move(a));
  return Corpus(options.name.empty() ? path.stem().string() : options.name, std::move(articles));
}

std::string article_to_json_line(const Article& a) {
  json obj = {{"id", a.id},
              {"source", to_string(a.source)},
              {"label", to_string(a.label)},
              {"language", to_string(a.language)},
              {"title", a.title},
              {"body", a.body},
              {"timestamp", a.timestamp ? json(*a.timestamp) : json(nullptr)},
              {"metadata", a.metadata}};
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const Article& a : corpus.articles()) out << article_to_json_line(a) << '\n';
  if (!out) throw Error("write failed on " + path.string());
}

Corpus load_annotations(const std::filesystem::path& path, const Corpus& corpus) {
  std::vector<AnnotatedSpan> spans;
  detail::for_each_line(path, [&](std::size_t line, std::string_view text) {
    const json obj = detail::parse_object(path, line, text);
    AnnotatedSpan s;
    s.article_id = detail::require_string(obj, "article_id", path, line);
    auto offset = [&](const char* key) -> std::size_t {
      auto it = obj.find(key);
      if (it == obj.end() || !it->is_number_integer() || it->get<long long>() < 0)
        throw ParseError(path.string(), line, std::string("field '") + key + "' must be a non-negative integer");
      return it->get<std::size_t>();
    };
    s.start = offset("start");
    s.end = offset("end");
    const std::string tag = detail::require_string(obj, "tag", path, line);
    auto t = parse_span_tag(tag);
    if (!t) throw ParseError(path.string(), line, "unknown tag '" + tag + "'");
    s.tag = *t;
    if (!corpus.find(s.article_id))
      throw ParseError(path.string(), line, "annotation references unknown article '" + s.article_id + "'");
    if (s.start >= s.end)
      throw ParseError(path.string(), line,
                       "empty or inverted span [" + std::to_string(s.start) + "," + std::to_string(s.end) + ")");
    spans.push_back(std::move(s));
  });
  try {
    return corpus.with_annotations(std::move(spans));
  } catch (const InvariantError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::vector<Article> select_subset(const Corpus& corpus, Label label, std::size_t n,
                                   std::uint64_t seed) {
  std::vector<const Article*> pool = corpus.with_label(label);
  if (n > pool.size())
    throw InvariantError("requested " + std::to_string(n) + " " + std::string(to_string(label)) +
                         " articles, only " + std::to_string(pool.size()) + " available");
  SeededRng rng(seed);
  rng.partial_shuffle(pool, n);
  std::vector<Article> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(*pool[i]);
  return out;
}

}  // namespace satdebias::corpus
