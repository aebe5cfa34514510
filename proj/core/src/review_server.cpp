#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "satdebias/reportd.hpp"

namespace satdebias::reportd {

using json = nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, json{{"error", message}}.dump());
}

json regeneration_json(const RegenerationRequest& r) {
  return {{"request_id", r.request_id},
          {"rejected_record_id", r.rejected_record_id},
          {"source_article_id", r.source_article_id},
          {"prompt_id", to_string(r.prompt_id)},
          {"requested_at", r.requested_at}};
}

json queue_json(const std::vector<QueueItem>& items) {
  json out = json::array();
  for (const auto& q : items) {
    json item = {{"record_id", q.record_id},
                 {"source_article_id", q.source_article_id},
                 {"prompt_id", to_string(q.prompt_id)},
                 {"status", "PENDING_REVIEW"},
                 {"original_title", q.original_title},
                 {"original_body", nullptr},
                 {"generated_body", q.generated_body}};
    if (q.original_body) item["original_body"] = *q.original_body;
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace

std::pair<std::string, int> parse_bind_address(const std::string& address) {
  const auto colon = address.rfind(':');
  std::string host = colon == std::string::npos ? address : address.substr(0, colon);
  std::string port_text = colon == std::string::npos ? "" : address.substr(colon + 1);
  if (host.empty()) host = "127.0.0.1";
  if (port_text.empty()) throw InvariantError("bind address '" + address + "' has no port");
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InvariantError("bad port in bind address '" + address + "'");
  }
  if (port < 0 || port > 65535) throw InvariantError("port out of range in '" + address + "'");
  return {host, port};
}

struct ReviewServer::Impl {
  ReviewStore& store;
  ServerOptions options;
  httplib::Server server;

  Impl(ReviewStore& s, ServerOptions o) : store(s), options(std::move(o)) { routes(); }

  void routes() {
    server.Get("/api/queue", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, queue_json(store.queue()).dump());
    });

    server.Get("/api/stats/review", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, stats_to_json(store.stats()));
    });

    server.Get("/api/regenerations", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& r : store.regenerations()) out.push_back(regeneration_json(r));
      send_json(res, 200, out.dump());
    });

    server.Post("/api/decisions", [this](const httplib::Request& req, httplib::Response& res) {
      ReviewDecision d;
      try {
        d = decision_from_json(req.body, "request");
      } catch (const Error& e) {
        return send_error(res, 400, e.what());
      }
      try {
        const std::string record_id = d.record_id;
        auto result = store.post_decision(std::move(d));
        json out = {{"record_id", record_id},
                    {"status", debias::to_string(result.status)},
                    {"outcome", result.outcome == ReviewStore::Outcome::Applied ? "applied" : "duplicate"},
                    {"regeneration", nullptr}};
        if (result.regeneration) out["regeneration"] = regeneration_json(*result.regeneration);
        send_json(res, 200, out.dump());
      } catch (const UnknownRecord& e) {
        send_error(res, 404, e.what());
      } catch (const DecisionConflict& e) {
        send_error(res, 409, e.what());
      } catch (const InvariantError& e) {
        send_error(res, 400, e.what());
      } catch (const Error& e) {
        send_error(res, 500, e.what());
      }
    });

    server.Get(R"(/api/reports/([a-z]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string name = req.matches[1];
      if (name != "stats" && name != "topk" && name != "eval" && name != "align")
        return send_error(res, 404, "unknown report '" + name + "'");
      if (options.reports_dir.empty()) return send_error(res, 404, "no reports directory configured");
      for (const auto& [ext, type] : {std::pair{".json", "application/json"},
                                      std::pair{".tsv", "text/tab-separated-values; charset=utf-8"}}) {
        const auto path = options.reports_dir / (name + ext);
        std::ifstream in(path, std::ios::binary);
        if (!in) continue;
        std::ostringstream buf;
        buf << in.rdbuf();
        res.status = 200;
        res.set_content(buf.str(), type);
        return;
      }
      send_error(res, 404, "report '" + name + "' not found");
    });

    if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir.string()))
      throw Error("static directory " + options.static_dir.string() + " does not exist");

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send_error(res, 500, message);
    });
  }
};

ReviewServer::ReviewServer(ReviewStore& store, ServerOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind() {
  const auto& o = impl_->options;
  if (o.port == 0) {
    port_ = impl_->server.bind_to_any_port(o.host);
    if (port_ < 0) throw Error("cannot bind " + o.host);
  } else {
    if (!impl_->server.bind_to_port(o.host, o.port))
      throw Error("cannot bind " + o.host + ":" + std::to_string(o.port));
    port_ = o.port;
  }
  return port_;
}

void ReviewServer::run() { impl_->server.listen_after_bind(); }

int ReviewServer::start() {
  const int p = bind();
  thread_ = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
  return p;
}

void ReviewServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace satdebias::reportd
