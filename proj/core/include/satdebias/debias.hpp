#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/provider.hpp"
#include "satdebias/types.hpp"

namespace satdebias::debias {

inline constexpr std::string_view kBodyPlaceholder = "{{BODY}}";

struct PromptTemplate {
  PromptId id = PromptId::P1;
  Language language = Language::Tr;
  std::string text;  // exactly one {{BODY}}

  /// Throws InvariantError unless the placeholder occurs exactly once.
  void validate() const;
};

/// Shipped rewrite prompts. The Turkish texts are the original wording;
/// the English ones are their translations.
const PromptTemplate& builtin_template(PromptId id, Language language);

/// Substitutes the article body for the placeholder; nothing else changes.
std::string render_prompt(const PromptTemplate& prompt, const corpus::Article& article);

enum class RecordStatus { Ok, Failed, PendingReview, Accepted, Rejected };
enum class ReviewFlag { SatireLost, ContextLost };

std::string_view to_string(RecordStatus status) noexcept;
std::string_view to_string(ReviewFlag flag) noexcept;
std::optional<RecordStatus> parse_record_status(std::string_view text) noexcept;
std::optional<ReviewFlag> parse_review_flag(std::string_view text) noexcept;

/// One provider call made while generating a record.
struct Attempt {
  int http_status = 0;
  std::string error;
  std::string response;

  bool operator==(const Attempt&) const = default;
};

struct GenerationRecord {
  std::string record_id;
  std::string source_article_id;
  PromptId prompt_id = PromptId::P1;
  std::string provider_model;
  std::string request_text;
  std::string output_text;
  RecordStatus status = RecordStatus::Failed;
  std::set<ReviewFlag> flags;
  std::string created_at;
  std::optional<std::string> decided_at;
  std::vector<Attempt> attempts;

  /// Throws InvariantError when status, flags and timestamps disagree.
  void validate() const;

  bool operator==(const GenerationRecord&) const = default;
};

std::string record_to_json_line(const GenerationRecord& record);
GenerationRecord record_from_json_line(std::string_view line, const std::string& source = "<record>",
                                       std::size_t line_number = 0);

/// Records are stored as append-only JSONL.
std::vector<GenerationRecord> load_records(const std::filesystem::path& path);
void append_record(const std::filesystem::path& path, const GenerationRecord& record);
void save_records(const std::filesystem::path& path, const std::vector<GenerationRecord>& records);

/// UTC timestamp, e.g. 2024-05-01T12:00:00Z.
std::string now_iso8601();

/// Renders the prompt and calls the provider until a non-empty completion
/// arrives or retries run out. Every attempt is kept in the record.
GenerationRecord generate(const corpus::Article& article, const PromptTemplate& prompt,
                          provider::ChatProvider& provider, const provider::RetryPolicy& retry,
                          std::string record_id = {});

/// Exact per-prompt counts by largest remainder, laid out by smooth
/// weighted round-robin and rotated by `seed`. Fractions must sum to 1.
std::vector<PromptId> assign_prompts(std::size_t n, const std::map<PromptId, double>& mix,
                                     std::uint64_t seed);

struct BatchOptions {
  std::map<PromptId, double> prompt_mix{{PromptId::P1, 0.5}, {PromptId::P2, 0.5}};
  std::size_t max_in_flight = 4;
  std::uint64_t seed = 0;
  provider::RetryPolicy retry;
  /// Appended to every record id, e.g. "#r1" for regenerations.
  std::string record_id_suffix;
  /// Called once per finished record, serialized across workers.
  std::function<void(const GenerationRecord&)> on_record;
};

/// One record per article, in input order; failures do not abort the batch.
/// Templates follow each article's language.
std::vector<GenerationRecord> run_batch(const std::vector<corpus::Article>& articles,
                                        provider::ChatProvider& provider, const BatchOptions& options);

/// Moves OK records to PENDING_REVIEW (the default, human-reviewed route).
void route_for_review(std::vector<GenerationRecord>& records);

enum class AcceptMode { ReviewedOnly, AutoAccept };

/// Id of the debiased counterpart of a source article.
std::string debiased_id(std::string_view source_article_id);

/// One POSITIVE `generated` article per record. Every record must be
/// ACCEPTED (or OK under AutoAccept) and reference an article in `source`.
corpus::Corpus build_debiased_corpus(const std::vector<GenerationRecord>& records,
                                     const corpus::Corpus& source,
                                     AcceptMode mode = AcceptMode::ReviewedOnly,
                                     std::string name = "debiased");

}  // namespace satdebias::debias
