#include "srfid/service/server.hpp"

#include <atomic>
#include <deque>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <unordered_map>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "srfid/common/error.hpp"
#include "srfid/common/rng.hpp"
#include "srfid/common/timeutil.hpp"
#include "srfid/service/scheduler.hpp"
#include "srfid/study/aggregate.hpp"

namespace srfid::service {
namespace {

struct Session {
  std::string id;
  std::string annotator_id;
  std::string created_at;
  std::deque<std::string> queue;  // head is the pair currently presented
  std::mutex mutex;               // serializes next/answer within a session
};

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, Json{{"error", message}});
}

std::string content_type_for(const std::string& bytes) {
  if (bytes.size() >= 8 && bytes.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0) return "image/png";
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
      static_cast<unsigned char>(bytes[1]) == 0xD8 && static_cast<unsigned char>(bytes[2]) == 0xFF)
    return "image/jpeg";
  return "application/octet-stream";
}

std::string random_token() {
  std::random_device rd;
  std::ostringstream out;
  out << std::hex;
  for (int i = 0; i < 4; ++i) out << ((static_cast<std::uint64_t>(rd()) << 32) | rd());
  return out.str();
}

}  // namespace

struct AnnotationServer::Impl {
  ServiceConfig config;
  std::unique_ptr<study::StudyStore> store;
  httplib::Server http;
  int port = -1;

  std::mutex sessions_mutex;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions;
  std::unordered_map<std::string, int> sessions_per_annotator;

  std::shared_ptr<Session> find_session(const std::string& id) {
    std::lock_guard lock(sessions_mutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  // Drops queue heads answered through another session of the same annotator.
  void skip_answered(Session& s) {
    if (s.queue.empty()) return;
    const auto answered = store->answered_by(s.annotator_id);
    while (!s.queue.empty() && answered.count(s.queue.front())) s.queue.pop_front();
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("annotator_name") ||
        !body["annotator_name"].is_string())
      return send_error(res, 400, "body must be {\"annotator_name\": string}");
    std::pair<std::string, bool> reg;
    try {
      reg = store->register_annotator(body["annotator_name"].get<std::string>());
    } catch (const ArgumentError& e) {
      return send_error(res, 400, e.what());
    }
    auto session = std::make_shared<Session>();
    session->annotator_id = reg.first;
    session->created_at = utc_now_iso8601();
    int ordinal;
    {
      std::lock_guard lock(sessions_mutex);
      ordinal = sessions_per_annotator[reg.first]++;
      do session->id = random_token();
      while (sessions.count(session->id));
    }
    const std::uint64_t seed = mix_seed(config.seed, reg.first + "#" + std::to_string(ordinal));
    const auto queue = build_queue(store->pairs(), store->answered_by(reg.first), store->valid_counts(),
                                   config.trap_rate, seed);
    session->queue.assign(queue.begin(), queue.end());
    {
      std::lock_guard lock(sessions_mutex);
      sessions.emplace(session->id, session);
    }
    spdlog::info("session {} for annotator '{}' ({}), {} pairs queued", session->id, reg.first,
                 reg.second ? "new" : "resumed", queue.size());
    send_json(res, 200,
              Json{{"session_id", session->id}, {"annotator_id", reg.first}, {"total_pairs", queue.size()}});
  }

  void next_pair(const httplib::Request& req, httplib::Response& res) {
    auto session = find_session(req.path_params.at("id"));
    if (!session) return send_error(res, 404, "unknown session");
    std::lock_guard lock(session->mutex);
    skip_answered(*session);
    if (session->queue.empty()) return send_json(res, 200, Json{{"done", true}});
    const std::string& id = session->queue.front();
    send_json(res, 200,
              Json{{"pair_id", id},
                   {"gt_url", "/images/" + id + "/gt"},
                   {"sr_url", "/images/" + id + "/sr"},
                   {"remaining", session->queue.size()}});
  }

  void answer(const httplib::Request& req, httplib::Response& res) {
    auto session = find_session(req.path_params.at("id"));
    if (!session) return send_error(res, 404, "unknown session");
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("pair_id") || !body["pair_id"].is_string() ||
        !body.contains("answer") || !body["answer"].is_string())
      return send_error(res, 400, "body must be {pair_id, answer, latency_ms}");
    const std::string answer_text = body["answer"].get<std::string>();
    if (answer_text != "yes" && answer_text != "no") return send_error(res, 400, "answer must be \"yes\" or \"no\"");
    std::int64_t latency = 0;
    if (body.contains("latency_ms")) {
      if (!body["latency_ms"].is_number()) return send_error(res, 400, "latency_ms must be a number");
      latency = static_cast<std::int64_t>(body["latency_ms"].get<double>());
      if (latency < 0) return send_error(res, 400, "latency_ms must be >= 0");
    }
    const std::string pair_id = body["pair_id"].get<std::string>();

    std::lock_guard lock(session->mutex);
    skip_answered(*session);
    if (session->queue.empty()) return send_error(res, 409, "queue exhausted");
    if (session->queue.front() != pair_id)
      return send_error(res, 409, "pair '" + pair_id + "' is not the current pair");
    study::AnnotationEvent event;
    event.annotator_id = session->annotator_id;
    event.pair_id = pair_id;
    event.answer = answer_text == "yes";
    event.latency_ms = latency;
    try {
      store->record_annotation(std::move(event));
    } catch (const ConflictError& e) {
      session->queue.pop_front();
      return send_error(res, 409, e.what());
    }
    session->queue.pop_front();
    send_json(res, 200, Json{{"accepted", true}, {"remaining", session->queue.size()}});
  }

  void image(const httplib::Request& req, httplib::Response& res) {
    const std::string& role = req.path_params.at("role");
    if (role != "gt" && role != "sr") return send_error(res, 404, "role must be gt or sr");
    auto pair = store->find_pair(req.path_params.at("pair_id"));
    if (!pair) return send_error(res, 404, "unknown pair");
    std::filesystem::path path = role == "gt" ? pair->gt_path : pair->sr_path;
    if (path.is_relative()) path = config.images_dir / path;
    std::string bytes;
    try {
      bytes = read_file(path);
    } catch (const Error& e) {
      spdlog::warn("image {} unreadable: {}", path.string(), e.what());
      return send_error(res, 404, "image file missing");
    }
    res.status = 200;
    const std::string type = content_type_for(bytes);
    res.set_content(std::move(bytes), type);
  }

  void export_records(const httplib::Request& req, httplib::Response& res) {
    if (config.admin_token.empty() || req.get_header_value("X-Admin-Token") != config.admin_token)
      return send_error(res, 401, "bad admin token");
    const std::string what = req.get_param_value("what");
    const auto snap = store->snapshot();
    std::vector<Json> lines;
    if (what == "events") {
      for (const auto& e : snap.events) lines.push_back(study::to_json(e));
    } else if (what == "scores") {
      for (const auto& s : study::aggregate_scores(snap)) lines.push_back(study::to_json(s));
    } else if (what == "statuses") {
      for (const auto& s : study::annotator_filter(snap)) lines.push_back(study::to_json(s));
    } else {
      return send_error(res, 400, "what must be events, scores or statuses");
    }
    res.status = 200;
    res.set_content(to_jsonl(lines), "application/x-ndjson");
  }

  void progress(httplib::Response& res) {
    const auto snap = store->snapshot();
    const auto scores = study::aggregate_scores(snap);
    std::size_t finals = 0;
    for (const auto& s : scores) finals += s.final ? 1 : 0;
    std::size_t n_sessions;
    {
      std::lock_guard lock(sessions_mutex);
      n_sessions = sessions.size();
    }
    send_json(res, 200,
              Json{{"pairs", scores.size()},
                   {"final_pairs", finals},
                   {"events", snap.events.size()},
                   {"annotators", snap.annotators.size()},
                   {"sessions", n_sessions}});
  }

  void install_routes() {
    http.Post("/api/session", [this](const httplib::Request& q, httplib::Response& r) { create_session(q, r); });
    http.Get("/api/session/:id/next", [this](const httplib::Request& q, httplib::Response& r) { next_pair(q, r); });
    http.Post("/api/session/:id/answer", [this](const httplib::Request& q, httplib::Response& r) { answer(q, r); });
    http.Get("/images/:pair_id/:role", [this](const httplib::Request& q, httplib::Response& r) { image(q, r); });
    http.Get("/api/admin/export", [this](const httplib::Request& q, httplib::Response& r) { export_records(q, r); });
    http.Get("/api/progress", [this](const httplib::Request&, httplib::Response& r) { progress(r); });
    if (config.ui_dir && !http.set_mount_point("/", config.ui_dir->string()))
      spdlog::warn("ui_dir {} is not a directory; static files disabled", config.ui_dir->string());
    http.set_payload_max_length(1 << 20);
    http.set_exception_handler([](const httplib::Request& q, httplib::Response& r, std::exception_ptr ep) {
      std::string message = "internal error";
      int status = 500;
      try {
        std::rethrow_exception(ep);
      } catch (const NotFoundError& e) {
        status = 404;
        message = e.what();
      } catch (const std::exception& e) {
        message = e.what();
      }
      spdlog::error("{} {}: {}", q.method, q.path, message);
      send_error(r, status, message);
    });
    http.set_logger([](const httplib::Request& q, const httplib::Response& r) {
      spdlog::debug("{} {} -> {}", q.method, q.path, r.status);
    });
  }
};

AnnotationServer::AnnotationServer(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
  config.validate();
  impl_->config = std::move(config);
  impl_->store = study::StudyStore::open(impl_->config.data_dir);
  impl_->install_routes();
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind() {
  const auto& c = impl_->config;
  if (c.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(c.host);
  } else {
    impl_->port = impl_->http.bind_to_port(c.host, c.port) ? c.port : -1;
  }
  if (impl_->port < 0) throw IoError("cannot bind " + c.host + ":" + std::to_string(c.port));
  spdlog::info("listening on {}:{}", c.host, impl_->port);
  return impl_->port;
}

void AnnotationServer::run() {
  if (impl_->port < 0) throw StateError("run() before bind()");
  impl_->http.listen_after_bind();
}

void AnnotationServer::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

bool AnnotationServer::running() const { return impl_->http.is_running(); }

const ServiceConfig& AnnotationServer::config() const noexcept { return impl_->config; }

study::StudyStore& AnnotationServer::store() { return *impl_->store; }

}  // namespace srfid::service
