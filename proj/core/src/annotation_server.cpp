#include "iclef/annotation_server.hpp"

#include "iclef/error.hpp"

#include <httplib.h>

namespace iclef {

struct AnnotationServer::Impl {
  AnnotationStore& store;
  httplib::Server server;
  explicit Impl(AnnotationStore& s) : store(s) {}
};

namespace {

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const char* kind, const std::string& message) {
  send_json(res, status, ordered_json{{"error", kind}, {"message", message}});
}

int status_for(const Error& e) {
  if (dynamic_cast<const TaskNotFound*>(&e)) return 404;
  if (dynamic_cast<const TaskAlreadyDone*>(&e)) return 409;
  if (dynamic_cast<const NoOverlap*>(&e)) return 422;
  if (dynamic_cast<const SchemaViolation*>(&e) || dynamic_cast<const ParseError*>(&e)) return 400;
  return 500;
}

ordered_json task_view(const AnnotationStore& store, const AnnotationTask& t) {
  auto j = to_json(t);
  j["status"] = task_status_name(store.status(t.task_id));
  return j;
}

}  // namespace

AnnotationServer::AnnotationServer(AnnotationStore& store, AnnotationServerOptions options)
    : impl_(std::make_unique<Impl>(store)), options_(std::move(options)) {
  auto& srv = impl_->server;
  auto& st = impl_->store;
  const std::string token = options_.token;

  srv.set_pre_routing_handler([token](const httplib::Request& req, httplib::Response& res) {
    if (token.empty() || req.path == "/health") return httplib::Server::HandlerResponse::Unhandled;
    if (req.get_header_value("X-ICLEF-Token") != token) {
      send_error(res, 401, "Unauthorized", "missing or wrong X-ICLEF-Token");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, status_for(e), e.kind(), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  });

  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, ordered_json{{"status", "ok"}});
  });

  srv.Get("/tasks", [&st](const httplib::Request& req, httplib::Response& res) {
    TaskFilter f;
    if (req.has_param("kind") && !req.get_param_value("kind").empty()) {
      f.kind = parse_task_kind(req.get_param_value("kind"));
    }
    if (req.has_param("status") && !req.get_param_value("status").empty()) {
      f.status = parse_task_status(req.get_param_value("status"));
    }
    if (req.has_param("annotator") && !req.get_param_value("annotator").empty()) {
      f.annotator = req.get_param_value("annotator");
    }
    auto arr = ordered_json::array();
    for (const auto& t : st.list_tasks(f)) arr.push_back(task_view(st, t));
    send_json(res, 200, ordered_json{{"tasks", std::move(arr)}});
  });

  srv.Get(R"(/tasks/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, task_view(st, st.get_task(req.matches[1])));
  });

  srv.Post("/judgments", [&st](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) throw SchemaViolation("request body is not JSON");
    auto j = judgment_from_json(body);
    j.timestamp.clear();
    auto r = st.submit(std::move(j));
    send_json(res, 201,
              ordered_json{{"judgment_id", r.judgment_id},
                           {"task_status", task_status_name(r.status)},
                           {"feedback_written", r.feedback_written}});
  });

  srv.Get("/reports/agreement", [&st](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, to_json(agreement_report(st.list_tasks({}), st.judgments())));
  });

  const bool dispreferred = options_.dispreferred_as_unacceptable;
  srv.Get("/reports/preference", [&st, dispreferred](const httplib::Request& req, httplib::Response& res) {
    bool d = dispreferred || req.get_param_value("dispreferred_as_unacceptable") == "true";
    send_json(res, 200, ordered_json{{"categories", to_json(preference_report(st.list_tasks({}), st.judgments()), d)}});
  });

  const auto sweep_path = options_.sweep_report;
  srv.Get("/reports/sweep", [sweep_path](const httplib::Request&, httplib::Response& res) {
    if (sweep_path.empty() || !std::filesystem::exists(sweep_path)) {
      send_error(res, 404, "NotFound", "no sweep report has been written");
      return;
    }
    res.status = 200;
    res.set_content(read_file(sweep_path), "application/json");
  });
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::start() {
  auto& srv = impl_->server;
  if (options_.port == 0) {
    port_ = srv.bind_to_any_port(options_.host);
  } else {
    port_ = srv.bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ < 0) throw IoError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  thread_ = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  return port_;
}

void AnnotationServer::run() {
  start();
  thread_.join();
}

void AnnotationServer::stop() {
  impl_->server.stop();
  if (thread_.joinable() && thread_.get_id() != std::this_thread::get_id()) thread_.join();
}

}  // namespace iclef
