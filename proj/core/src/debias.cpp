#include "satdebias/debias.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include "jsonl.hpp"
#include "satdebias/error.hpp"
#include "satdebias/utf8.hpp"

namespace satdebias::debias {

using detail::json;

namespace {

const PromptTemplate kP1Tr{
    PromptId::P1, Language::Tr,
    "Sana satirik bir haber vereceğim, adım adım bu haberdeki satirik unsurları kaldırmanı "
    "isteyeceğim. Önce bunun için haberden çıkarılması gereken cümleleri tespit et, sonra da "
    "cümleler çıkarılmış haliyle haberi tekrar yaz.\nHaber metni:\n{{BODY}}"};

const PromptTemplate kP2Tr{
    PromptId::P2, Language::Tr,
    "Sana bir metin vereceğim, içindeki satirik cümleleri daha düz bir dile çevirip tekrar "
    "yaz.\nHaber metni:\n{{BODY}}"};

const PromptTemplate kP1En{
    PromptId::P1, Language::En,
    "I will give you a satirical news article, and I will ask you to remove the satirical "
    "elements step by step. First, identify the sentences that need to be removed from the "
    "news, and then rewrite the news with those sentences removed.\nArticle text:\n{{BODY}}"};

const PromptTemplate kP2En{
    PromptId::P2, Language::En,
    "I will give you a text, and I want you to rewrite it by translating the satirical "
    "sentences into a more straightforward language.\nArticle text:\n{{BODY}}"};

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

void PromptTemplate::validate() const {
  const std::size_t n = count_occurrences(text, kBodyPlaceholder);
  if (n != 1)
    throw InvariantError("prompt template " + std::string(to_string(id)) + " must contain {{BODY}} exactly once (found " +
                         std::to_string(n) + ")");
}

const PromptTemplate& builtin_template(PromptId id, Language language) {
  if (language == Language::Tr) return id == PromptId::P1 ? kP1Tr : kP2Tr;
  return id == PromptId::P1 ? kP1En : kP2En;
}

std::string render_prompt(const PromptTemplate& prompt, const corpus::Article& article) {
  prompt.validate();
  if (utf8::trim(article.body).empty()) throw InvariantError("article '" + article.id + "' has an empty body");
  const auto pos = prompt.text.find(kBodyPlaceholder);
  std::string out;
  out.reserve(prompt.text.size() + article.body.size());
  out.append(prompt.text, 0, pos);
  out.append(article.body);
  out.append(prompt.text, pos + kBodyPlaceholder.size());
  return out;
}

// ---------------------------------------------------------------------------
// Records

std::string_view to_string(RecordStatus status) noexcept {
  switch (status) {
    case RecordStatus::Ok: return "OK";
    case RecordStatus::Failed: return "FAILED";
    case RecordStatus::PendingReview: return "PENDING_REVIEW";
    case RecordStatus::Accepted: return "ACCEPTED";
    case RecordStatus::Rejected: return "REJECTED";
  }
  return "FAILED";
}

std::string_view to_string(ReviewFlag flag) noexcept {
  return flag == ReviewFlag::SatireLost ? "SATIRE_LOST" : "CONTEXT_LOST";
}

std::optional<RecordStatus> parse_record_status(std::string_view text) noexcept {
  for (auto s : {RecordStatus::Ok, RecordStatus::Failed, RecordStatus::PendingReview, RecordStatus::Accepted,
                 RecordStatus::Rejected})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::optional<ReviewFlag> parse_review_flag(std::string_view text) noexcept {
  if (text == "SATIRE_LOST") return ReviewFlag::SatireLost;
  if (text == "CONTEXT_LOST") return ReviewFlag::ContextLost;
  return std::nullopt;
}

void GenerationRecord::validate() const {
  auto fail = [&](const std::string& why) { throw InvariantError("record '" + record_id + "': " + why); };
  if (record_id.empty()) fail("empty record_id");
  const bool decided = status == RecordStatus::Accepted || status == RecordStatus::Rejected;
  if (decided && !decided_at) fail("decided status without decided_at");
  if (!flags.empty() && status != RecordStatus::Rejected && status != RecordStatus::PendingReview)
    fail("flags require REJECTED or PENDING_REVIEW status");
  const bool needs_output = status == RecordStatus::Ok || status == RecordStatus::PendingReview ||
                            status == RecordStatus::Accepted;
  if (needs_output && utf8::trim(output_text).empty()) fail("status " + std::string(to_string(status)) + " needs output_text");
}

std::string record_to_json_line(const GenerationRecord& r) {
  json flags = json::array();
  for (ReviewFlag f : r.flags) flags.push_back(to_string(f));
  json attempts = json::array();
  for (const Attempt& a : r.attempts)
    attempts.push_back({{"http_status", a.http_status}, {"error", a.error}, {"response", a.response}});
  json obj = {{"record_id", r.record_id},
              {"source_article_id", r.source_article_id},
              {"prompt_id", to_string(r.prompt_id)},
              {"provider_model", r.provider_model},
              {"request_text", r.request_text},
              {"output_text", r.output_text},
              {"status", to_string(r.status)},
              {"flags", flags},
              {"created_at", r.created_at},
              {"decided_at", r.decided_at ? json(*r.decided_at) : json(nullptr)},
              {"attempts", attempts}};
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

GenerationRecord record_from_json_line(std::string_view line, const std::string& source, std::size_t number) {
  const std::filesystem::path path(source);
  const json obj = detail::parse_object(path, number, line);
  GenerationRecord r;
  r.record_id = detail::require_string(obj, "record_id", path, number);
  r.source_article_id = detail::require_string(obj, "source_article_id", path, number);
  const std::string prompt = detail::require_string(obj, "prompt_id", path, number);
  auto p = parse_prompt_id(prompt);
  if (!p) throw ParseError(source, number, "unknown prompt_id '" + prompt + "'");
  r.prompt_id = *p;
  r.provider_model = detail::optional_string(obj, "provider_model", path, number).value_or("");
  r.request_text = detail::optional_string(obj, "request_text", path, number).value_or("");
  r.output_text = detail::optional_string(obj, "output_text", path, number).value_or("");
  const std::string status = detail::require_string(obj, "status", path, number);
  auto s = parse_record_status(status);
  if (!s) throw ParseError(source, number, "unknown status '" + status + "'");
  r.status = *s;
  if (auto it = obj.find("flags"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(source, number, "field 'flags' must be an array");
    for (const auto& f : *it) {
      auto flag = f.is_string() ? parse_review_flag(f.get<std::string>()) : std::nullopt;
      if (!flag) throw ParseError(source, number, "unknown flag " + f.dump());
      r.flags.insert(*flag);
    }
  }
  r.created_at = detail::optional_string(obj, "created_at", path, number).value_or("");
  r.decided_at = detail::optional_string(obj, "decided_at", path, number);
  if (auto it = obj.find("attempts"); it != obj.end() && it->is_array()) {
    for (const auto& a : *it)
      r.attempts.push_back(Attempt{a.value("http_status", 0), a.value("error", std::string()),
                                   a.value("response", std::string())});
  }
  try {
    r.validate();
  } catch (const InvariantError& e) {
    throw ParseError(source, number, e.what());
  }
  return r;
}

std::vector<GenerationRecord> load_records(const std::filesystem::path& path) {
  std::vector<GenerationRecord> out;
  detail::for_each_line(path, [&](std::size_t line, std::string_view text) {
    out.push_back(record_from_json_line(text, path.string(), line));
  });
  return out;
}

void append_record(const std::filesystem::path& path, const GenerationRecord& record) {
  detail::append_durable(path, record_to_json_line(record));
}

void save_records(const std::filesystem::path& path, const std::vector<GenerationRecord>& records) {
  std::string content;
  for (const auto& r : records) content += record_to_json_line(r) + '\n';
  detail::write_file(path, content);
}

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Generation

GenerationRecord generate(const corpus::Article& article, const PromptTemplate& prompt,
                          provider::ChatProvider& provider, const provider::RetryPolicy& retry,
                          std::string record_id) {
  GenerationRecord rec;
  rec.record_id = record_id.empty() ? article.id + "#" + std::string(to_string(prompt.id)) : std::move(record_id);
  rec.source_article_id = article.id;
  rec.prompt_id = prompt.id;
  rec.provider_model = provider.model();
  rec.request_text = render_prompt(prompt, article);
  rec.created_at = now_iso8601();
  rec.status = RecordStatus::Failed;

  provider::ChatRequest request;
  request.messages.push_back({"user", rec.request_text});
  const int attempts = std::max(1, retry.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const provider::ChatResponse resp = provider.complete(request);
    Attempt logged{resp.status, resp.error, resp.raw};
    if (resp.ok() && utf8::trim(resp.content).empty() && logged.error.empty()) logged.error = "empty completion";
    rec.attempts.push_back(std::move(logged));
    if (resp.ok() && !utf8::trim(resp.content).empty()) {
      rec.output_text = resp.content;
      rec.status = RecordStatus::Ok;
      return rec;
    }
    if (!provider::is_retryable(resp)) break;
    if (attempt < attempts) retry.wait(attempt);
  }
  return rec;
}

std::vector<PromptId> assign_prompts(std::size_t n, const std::map<PromptId, double>& mix, std::uint64_t seed) {
  if (mix.empty()) throw InvariantError("prompt mix is empty");
  double total = 0;
  for (const auto& [id, f] : mix) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw InvariantError("prompt fractions must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvariantError("prompt fractions must sum to 1");

  // Largest remainder apportionment; ties go to the lower prompt id.
  std::vector<std::pair<PromptId, std::size_t>> counts;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (const auto& [id, f] : mix) {
    const double exact = f * static_cast<double>(n);
    const auto base = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders.emplace_back(exact - static_cast<double>(base), counts.size());
    counts.emplace_back(id, base);
    assigned += base;
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i % remainders.size()].second].second;

  // Smooth weighted round-robin yields each prompt exactly `count` times.
  std::vector<PromptId> order;
  order.reserve(n);
  std::vector<long long> current(counts.size(), 0);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      current[i] += static_cast<long long>(counts[i].second);
      if (current[i] > current[best]) best = i;
    }
    current[best] -= static_cast<long long>(n);
    order.push_back(counts[best].first);
  }
  if (n > 0) std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(seed % n), order.end());
  return order;
}

std::vector<GenerationRecord> run_batch(const std::vector<corpus::Article>& articles,
                                        provider::ChatProvider& provider, const BatchOptions& options) {
  if (options.max_in_flight == 0) throw InvariantError("max_in_flight must be at least 1");
  const std::vector<PromptId> prompts = assign_prompts(articles.size(), options.prompt_mix, options.seed);
  std::vector<GenerationRecord> out(articles.size());
  std::atomic<std::size_t> next{0};
  std::mutex sink;

  auto worker = [&] {
    for (std::size_t i = next++; i < articles.size(); i = next++) {
      const corpus::Article& a = articles[i];
      const PromptTemplate& t = builtin_template(prompts[i], a.language);
      GenerationRecord rec;
      try {
        rec = generate(a, t, provider, options.retry,
                       a.id + "#" + std::string(to_string(prompts[i])) + options.record_id_suffix);
      } catch (const std::exception& e) {
        rec.record_id = a.id + "#" + std::string(to_string(prompts[i])) + options.record_id_suffix;
        rec.source_article_id = a.id;
        rec.prompt_id = prompts[i];
        rec.provider_model = provider.model();
        rec.created_at = now_iso8601();
        rec.status = RecordStatus::Failed;
        rec.attempts.push_back(Attempt{0, e.what(), {}});
      }
      std::lock_guard lock(sink);
      if (options.on_record) options.on_record(rec);
      out[i] = std::move(rec);
    }
  };

  const std::size_t n_threads = std::min(options.max_in_flight, articles.size());
  std::vector<std::jthread> pool;
  pool.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  pool.clear();
  return out;
}

void route_for_review(std::vector<GenerationRecord>& records) {
  for (auto& r : records)
    if (r.status == RecordStatus::Ok) r.status = RecordStatus::PendingReview;
}

std::string debiased_id(std::string_view source_article_id) {
  return std::string(source_article_id) + "~debiased";
}

corpus::Corpus build_debiased_corpus(const std::vector<GenerationRecord>& records, const corpus::Corpus& source,
                                     AcceptMode mode, std::string name) {
  std::vector<corpus::Article> articles;
  articles.reserve(records.size());
  for (const GenerationRecord& r : records) {
    const bool usable = r.status == RecordStatus::Accepted ||
                        (mode == AcceptMode::AutoAccept && r.status == RecordStatus::Ok);
    if (!usable)
      throw InvariantError("record '" + r.record_id + "' has status " + std::string(to_string(r.status)) +
                           " and cannot be included");
    const corpus::Article* src = source.find(r.source_article_id);
    if (!src)
      throw InvariantError("record '" + r.record_id + "' references unknown source article '" +
                           r.source_article_id + "'");
    corpus::Article a;
    a.id = debiased_id(r.source_article_id);
    a.source = Source::Generated;
    a.label = Label::Positive;
    a.language = src->language;
    a.title = src->title;
    a.body = r.output_text;
    a.timestamp = r.decided_at ? r.decided_at : std::optional<std::string>(r.created_at);
    a.metadata["prompt_id"] = std::string(to_string(r.prompt_id));
    a.metadata["source_article_id"] = r.source_article_id;
    a.metadata["record_id"] = r.record_id;
    if (!r.provider_model.empty()) a.metadata["provider_model"] = r.provider_model;
    articles.push_back(std::move(a));
  }
  return corpus::Corpus(std::move(name), std::move(articles));
}

}  // namespace satdebias::debias
