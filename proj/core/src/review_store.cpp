#include <algorithm>
#include <mutex>
#include <utility>

#include "jsonl.hpp"
#include "satdebias/reportd.hpp"

namespace satdebias::reportd {

using detail::json;
using debias::GenerationRecord;
using debias::RecordStatus;
using debias::ReviewFlag;

std::string_view to_string(Verdict v) noexcept { return v == Verdict::Accept ? "ACCEPT" : "REJECT"; }

std::optional<Verdict> parse_verdict(std::string_view text) noexcept {
  if (text == "ACCEPT") return Verdict::Accept;
  if (text == "REJECT") return Verdict::Reject;
  return std::nullopt;
}

void ReviewDecision::validate() const {
  if (record_id.empty()) throw InvariantError("decision without record_id");
  if (verdict == Verdict::Accept && !flags.empty())
    throw InvariantError("ACCEPT on '" + record_id + "' cannot carry flags");
  if (verdict == Verdict::Accept && regenerate_with)
    throw InvariantError("regenerate_with on '" + record_id + "' requires REJECT");
}

bool ReviewDecision::same_outcome(const ReviewDecision& other) const noexcept {
  return record_id == other.record_id && verdict == other.verdict && flags == other.flags &&
         regenerate_with == other.regenerate_with;
}

std::string decision_to_json(const ReviewDecision& d) {
  json flags = json::array();
  for (ReviewFlag f : d.flags) flags.push_back(debias::to_string(f));
  json out = {{"record_id", d.record_id},
              {"verdict", to_string(d.verdict)},
              {"flags", flags},
              {"regenerate_with", nullptr},
              {"reviewer", d.reviewer},
              {"decided_at", d.decided_at}};
  if (d.regenerate_with) out["regenerate_with"] = to_string(*d.regenerate_with);
  return out.dump();
}

ReviewDecision decision_from_json(const std::string& text, const std::string& source, std::size_t line) {
  const json obj = detail::parse_object(source, line, text);
  ReviewDecision d;
  d.record_id = detail::require_string(obj, "record_id", source, line);
  const std::string verdict = detail::require_string(obj, "verdict", source, line);
  auto v = parse_verdict(verdict);
  if (!v) throw ParseError(source, line, "unknown verdict '" + verdict + "'");
  d.verdict = *v;
  if (auto it = obj.find("flags"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(source, line, "'flags' must be an array");
    for (const auto& f : *it) {
      if (!f.is_string()) throw ParseError(source, line, "flag must be a string");
      auto flag = debias::parse_review_flag(f.get<std::string>());
      if (!flag) throw ParseError(source, line, "unknown flag '" + f.get<std::string>() + "'");
      d.flags.insert(*flag);
    }
  }
  if (auto p = detail::optional_string(obj, "regenerate_with", source, line)) {
    auto id = parse_prompt_id(*p);
    if (!id) throw ParseError(source, line, "unknown prompt '" + *p + "'");
    d.regenerate_with = *id;
  }
  d.reviewer = detail::optional_string(obj, "reviewer", source, line).value_or("");
  d.decided_at = detail::optional_string(obj, "decided_at", source, line).value_or("");
  d.validate();
  return d;
}

ReviewStats recount(const std::vector<GenerationRecord>& records) {
  ReviewStats s;
  for (const auto& r : records) {
    switch (r.status) {
      case RecordStatus::Failed: ++s.n_failed; continue;
      case RecordStatus::Ok:
      case RecordStatus::PendingReview: ++s.n_pending; break;
      case RecordStatus::Accepted: ++s.n_accepted; break;
      case RecordStatus::Rejected:
        ++s.n_rejected;
        ++s.rejected_by_prompt[r.prompt_id];
        break;
    }
    if (r.flags.count(ReviewFlag::SatireLost)) ++s.n_satire_lost;
    if (r.flags.count(ReviewFlag::ContextLost)) ++s.n_context_lost;
  }
  return s;
}

std::string stats_to_json(const ReviewStats& s) {
  json by_prompt = json::object();
  for (const auto& [id, n] : s.rejected_by_prompt) by_prompt[std::string(to_string(id))] = n;
  return json{{"n_pending", s.n_pending},
              {"n_accepted", s.n_accepted},
              {"n_rejected", s.n_rejected},
              {"n_satire_lost", s.n_satire_lost},
              {"n_context_lost", s.n_context_lost},
              {"rejected_by_prompt", by_prompt},
              {"n_failed", s.n_failed},
              {"total", s.n_pending + s.n_accepted + s.n_rejected}}
      .dump();
}

ReviewStore::ReviewStore(std::vector<GenerationRecord> records, std::filesystem::path decisions_path,
                         std::shared_ptr<const corpus::Corpus> sources)
    : records_(std::move(records)), decisions_path_(std::move(decisions_path)), sources_(std::move(sources)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto& r = records_[i];
    if (r.status == RecordStatus::Ok) r.status = RecordStatus::PendingReview;
    if (!index_.emplace(r.record_id, i).second) throw InvariantError("duplicate record id '" + r.record_id + "'");
  }
  if (!std::filesystem::exists(decisions_path_)) {
    detail::write_file(decisions_path_, "");
    return;
  }
  const std::string source = decisions_path_.string();
  detail::for_each_line(decisions_path_, [&](std::size_t line, std::string_view text) {
    ReviewDecision d;
    try {
      d = decision_from_json(std::string(text), source, line);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line, e.what());
    }
    auto it = index_.find(d.record_id);
    if (it == index_.end()) throw ParseError(source, line, "decision for unknown record '" + d.record_id + "'");
    const auto& r = records_[it->second];
    if (auto prev = decisions_.find(d.record_id); prev != decisions_.end()) {
      if (prev->second.same_outcome(d)) return;
      throw ParseError(source, line, "conflicting decision for '" + d.record_id + "'");
    }
    if (r.status != RecordStatus::PendingReview)
      throw ParseError(source, line,
                       "record '" + d.record_id + "' is " + std::string(debias::to_string(r.status)) +
                           ", not reviewable");
    apply(d);
  });
}

ReviewStore ReviewStore::open(const std::filesystem::path& records_path, const std::filesystem::path& decisions_path,
                              std::shared_ptr<const corpus::Corpus> sources) {
  return ReviewStore(debias::load_records(records_path), decisions_path, std::move(sources));
}

std::optional<RegenerationRequest> ReviewStore::apply(const ReviewDecision& d) {
  auto& r = records_[index_.at(d.record_id)];
  r.status = d.verdict == Verdict::Accept ? RecordStatus::Accepted : RecordStatus::Rejected;
  r.flags = d.flags;
  r.decided_at = d.decided_at;
  decisions_.emplace(d.record_id, d);
  if (!d.regenerate_with) return std::nullopt;
  RegenerationRequest req;
  req.request_id = d.record_id + "@" + std::string(to_string(*d.regenerate_with));
  req.rejected_record_id = d.record_id;
  req.source_article_id = r.source_article_id;
  req.prompt_id = *d.regenerate_with;
  req.requested_at = d.decided_at;
  regenerations_.push_back(req);
  return req;
}

ReviewStore::PostResult ReviewStore::post_decision(ReviewDecision d) {
  d.validate();
  if (d.decided_at.empty()) d.decided_at = debias::now_iso8601();
  std::unique_lock lock(mutex_);
  auto it = index_.find(d.record_id);
  if (it == index_.end()) throw UnknownRecord("unknown record '" + d.record_id + "'");
  const auto& r = records_[it->second];
  if (auto prev = decisions_.find(d.record_id); prev != decisions_.end()) {
    if (!prev->second.same_outcome(d))
      throw DecisionConflict("record '" + d.record_id + "' already decided as " +
                             std::string(to_string(prev->second.verdict)));
    PostResult res{Outcome::Duplicate, r.status, std::nullopt};
    for (const auto& req : regenerations_)
      if (req.rejected_record_id == d.record_id) res.regeneration = req;
    return res;
  }
  if (r.status != RecordStatus::PendingReview) {
    const bool same = (r.status == RecordStatus::Accepted) == (d.verdict == Verdict::Accept) &&
                      r.status != RecordStatus::Failed && r.flags == d.flags && !d.regenerate_with;
    if (!same)
      throw DecisionConflict("record '" + d.record_id + "' is " + std::string(debias::to_string(r.status)));
    return {Outcome::Duplicate, r.status, std::nullopt};
  }
  detail::append_durable(decisions_path_, decision_to_json(d));
  auto regen = apply(d);
  return {Outcome::Applied, records_[it->second].status, std::move(regen)};
}

std::vector<QueueItem> ReviewStore::queue() const {
  std::shared_lock lock(mutex_);
  std::vector<QueueItem> out;
  for (const auto& r : records_) {
    if (r.status != RecordStatus::PendingReview) continue;
    QueueItem item;
    item.record_id = r.record_id;
    item.source_article_id = r.source_article_id;
    item.prompt_id = r.prompt_id;
    item.generated_body = r.output_text;
    if (sources_) {
      if (const auto* a = sources_->find(r.source_article_id)) {
        item.original_title = a->title;
        item.original_body = a->body;
      }
    }
    out.push_back(std::move(item));
  }
  return out;
}

ReviewStats ReviewStore::stats() const {
  std::shared_lock lock(mutex_);
  return recount(records_);
}

std::vector<GenerationRecord> ReviewStore::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

std::optional<GenerationRecord> ReviewStore::record(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

std::vector<RegenerationRequest> ReviewStore::regenerations() const {
  std::shared_lock lock(mutex_);
  return regenerations_;
}

}  // namespace satdebias::reportd
