#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/debias.hpp"
#include "satdebias/error.hpp"

namespace satdebias::reportd {

enum class Verdict { Accept, Reject };

std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view text) noexcept;

struct ReviewDecision {
  std::string record_id;
  Verdict verdict = Verdict::Accept;
  std::set<debias::ReviewFlag> flags;
  std::optional<PromptId> regenerate_with;
  std::string reviewer;
  std::string decided_at;

  /// ACCEPT may carry neither flags nor a regeneration prompt.
  void validate() const;
  /// Same verdict, flags and regeneration prompt (reviewer/time ignored).
  bool same_outcome(const ReviewDecision& other) const noexcept;
};

std::string decision_to_json(const ReviewDecision& decision);
/// Throws ParseError (bad JSON / fields) or InvariantError (invalid combination).
ReviewDecision decision_from_json(const std::string& text, const std::string& source = "<decision>",
                                  std::size_t line = 0);

struct ReviewStats {
  std::size_t n_pending = 0;
  std::size_t n_accepted = 0;
  std::size_t n_rejected = 0;
  std::size_t n_satire_lost = 0;
  std::size_t n_context_lost = 0;
  std::map<PromptId, std::size_t> rejected_by_prompt{{PromptId::P1, 0}, {PromptId::P2, 0}};
  /// FAILED generations; not reviewable and not part of the three counts above.
  std::size_t n_failed = 0;

  bool operator==(const ReviewStats&) const = default;
};

/// Direct recount over record statuses and flags.
ReviewStats recount(const std::vector<debias::GenerationRecord>& records);
std::string stats_to_json(const ReviewStats& stats);

struct RegenerationRequest {
  std::string request_id;
  std::string rejected_record_id;
  std::string source_article_id;
  PromptId prompt_id = PromptId::P2;
  std::string requested_at;
};

struct QueueItem {
  std::string record_id;
  std::string source_article_id;
  PromptId prompt_id = PromptId::P1;
  std::string original_title;
  std::optional<std::string> original_body;  // known when a source corpus is loaded
  std::string generated_body;
};

class UnknownRecord : public Error {
 public:
  using Error::Error;
};

/// Conflicting second decision on an already decided record.
class DecisionConflict : public Error {
 public:
  using Error::Error;
};

/// Review state rebuilt from generation records plus an append-only
/// decision log. Decisions are serialized through one writer and appended
/// durably before they are applied; readers see consistent snapshots.
class ReviewStore {
 public:
  /// Replays `decisions_path` (created if missing). A corrupt or inconsistent
  /// log raises ParseError naming the line.
  ReviewStore(std::vector<debias::GenerationRecord> records, std::filesystem::path decisions_path,
              std::shared_ptr<const corpus::Corpus> sources = nullptr);

  static ReviewStore open(const std::filesystem::path& records_path, const std::filesystem::path& decisions_path,
                          std::shared_ptr<const corpus::Corpus> sources = nullptr);

  enum class Outcome { Applied, Duplicate };

  struct PostResult {
    Outcome outcome = Outcome::Applied;
    debias::RecordStatus status = debias::RecordStatus::PendingReview;
    std::optional<RegenerationRequest> regeneration;
  };

  /// Throws InvariantError (invalid decision), UnknownRecord, or
  /// DecisionConflict. An identical repeat is a no-op.
  PostResult post_decision(ReviewDecision decision);

  std::vector<QueueItem> queue() const;
  ReviewStats stats() const;
  std::vector<debias::GenerationRecord> records() const;
  std::optional<debias::GenerationRecord> record(std::string_view id) const;
  std::vector<RegenerationRequest> regenerations() const;
  const std::filesystem::path& decisions_path() const noexcept { return decisions_path_; }

 private:
  // Applies a validated decision to in-memory state; caller holds the lock.
  std::optional<RegenerationRequest> apply(const ReviewDecision& d);

  mutable std::shared_mutex mutex_;
  std::vector<debias::GenerationRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, ReviewDecision> decisions_;
  std::vector<RegenerationRequest> regenerations_;
  std::filesystem::path decisions_path_;
  std::shared_ptr<const corpus::Corpus> sources_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path reports_dir;  // serves {stats,topk,eval,align}.{json,tsv}
  std::filesystem::path static_dir;   // UI bundle
};

/// "host:port" (or ":port") into host and port.
std::pair<std::string, int> parse_bind_address(const std::string& address);

/// HTTP front end for a ReviewStore:
///   GET  /api/queue, POST /api/decisions, GET /api/stats/review,
///   GET  /api/regenerations, GET /api/reports/{stats|topk|eval|align}.
class ReviewServer {
 public:
  ReviewServer(ReviewStore& store, ServerOptions options);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds the socket; returns the bound port. Throws Error on failure.
  int bind();
  /// Serves until stop(); bind() must have succeeded.
  void run();
  /// bind() + run() on a background thread.
  int start();
  void stop();
  int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace satdebias::reportd
