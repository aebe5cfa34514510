#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "satdebias/types.hpp"

namespace satdebias::corpus {

/// One news item / post. Bodies are kept whole; truncation happens at
/// model input time only.
struct Article {
  std::string id;
  Source source = Source::Other;
  Label label = Label::Negative;
  Language language = Language::Tr;
  std::string title;
  std::string body;
  std::optional<std::string> timestamp;
  std::map<std::string, std::string> metadata;

  bool operator==(const Article&) const = default;
};

enum class SpanTag { Fake, Real };

std::string_view to_string(SpanTag tag) noexcept;
std::optional<SpanTag> parse_span_tag(std::string_view text) noexcept;

/// Human annotation span; offsets count Unicode scalar values in the body.
struct AnnotatedSpan {
  std::string article_id;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  SpanTag tag = SpanTag::Fake;

  bool operator==(const AnnotatedSpan&) const = default;
};

/// Immutable, validated collection of articles plus optional annotations.
/// Safe to share across threads once constructed.
class Corpus {
 public:
  Corpus() = default;

  /// Throws InvariantError on duplicate ids, blank bodies, or invalid spans.
  Corpus(std::string name, std::vector<Article> articles,
         std::vector<AnnotatedSpan> annotations = {});

  const std::string& name() const noexcept { return name_; }
  const std::vector<Article>& articles() const noexcept { return articles_; }
  const std::vector<AnnotatedSpan>& annotations() const noexcept { return annotations_; }
  std::size_t size() const noexcept { return articles_.size(); }
  bool empty() const noexcept { return articles_.empty(); }

  const Article* find(std::string_view id) const;
  /// Throws InvariantError when `id` is unknown.
  const Article& at(std::string_view id) const;
  std::optional<std::size_t> position(std::string_view id) const;

  std::size_t count(Label label) const;
  std::vector<const Article*> with_label(Label label) const;

  bool is_annotated(std::string_view id) const;
  /// Spans of one article sorted by start offset.
  std::vector<AnnotatedSpan> spans_for(std::string_view id) const;
  /// Ids of annotated articles, in corpus order.
  std::vector<std::string> annotated_ids() const;

  /// Returns a copy carrying `spans` in addition to existing annotations.
  Corpus with_annotations(std::vector<AnnotatedSpan> spans) const;

  bool operator==(const Corpus& other) const {
    return name_ == other.name_ && articles_ == other.articles_ &&
           annotations_ == other.annotations_;
  }

 private:
  std::string name_;
  std::vector<Article> articles_;
  std::vector<AnnotatedSpan> annotations_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Maps raw per-source label strings (SATIRICAL, IRONIC, is_sarcastic=1, ...)
/// onto the binary label. Source-specific entries shadow the "*" table.
class LabelMap {
 public:
  static LabelMap defaults();
  /// JSON object: {"*": {"SATIRICAL": "POSITIVE", ...}, "ironytr": {...}}.
  static LabelMap from_json_file(const std::filesystem::path& path);

  void set(std::string_view source_key, std::string raw, Label label);
  std::optional<Label> resolve(Source source, std::string_view raw) const;

 private:
  std::map<std::string, std::map<std::string, Label, std::less<>>, std::less<>> tables_;
};

enum class Format { Jsonl, Csv };

std::optional<Format> parse_format(std::string_view text) noexcept;
/// Guesses from the extension: .csv is CSV, anything else JSONL.
Format format_for(const std::filesystem::path& path);

struct LoadOptions {
  LabelMap labels = LabelMap::defaults();
  /// Corpus name; defaults to the file stem.
  std::string name;
  /// Language used for CSV rows without a language column.
  Language csv_language = Language::En;
};

/// Loads JSONL (one Article object per line) or CSV. CSV accepts either the
/// Kaggle sarcasm-headlines layout (is_sarcastic, headline[, article_link])
/// or a generic header containing at least id, label and body.
Corpus load_corpus(const std::filesystem::path& path, Format format,
                   const LoadOptions& options = {});

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string article_to_json_line(const Article& article);

/// Attaches spans read from a JSONL annotation file to `corpus`.
Corpus load_annotations(const std::filesystem::path& path, const Corpus& corpus);

/// Seeded Fisher-Yates sample of `n` articles carrying `label`, in sampled
/// order. Pure function of (corpus content, label, n, seed).
std::vector<Article> select_subset(const Corpus& corpus, Label label, std::size_t n,
                                   std::uint64_t seed);

}  // namespace satdebias::corpus
