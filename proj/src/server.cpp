// Copyright 2026 The hgx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hgx/server.hpp"

#include <charconv>

#include "httplib.h"

#include "hgx/errors.hpp"
#include "hgx/serialize.hpp"
#include "hgx/viewport.hpp"

namespace hgx {

namespace {

using httplib::Request;
using httplib::Response;

void send(Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string param(const Request& req, const char* key, const std::string& fallback = "") {
  return req.has_param(key) ? req.get_param_value(key) : fallback;
}

template <typename T>
std::optional<T> number_param(const Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const std::string s = req.get_param_value(key);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("query parameter '") + key + "' is not a number: " + s);
  }
  return value;
}

std::optional<double> double_param(const Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const std::string s = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError(std::string("query parameter '") + key + "' is not a number: " + s);
  }
}

Json body_of(const Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    Json j = Json::parse(req.body);
    if (!j.is_object()) throw ParseError("request body must be a JSON object");
    return j;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("request body: ") + e.what());
  }
}

std::string session_of(const Request& req, const Json& body = Json::object()) {
  if (body.contains("session")) return body.at("session").get<std::string>();
  return param(req, "session", "main");
}

ViewportQuery viewport_query(const Request& req) {
  ViewportQuery q;
  q.level = number_param<int>(req, "level").value_or(2);
  q.row_begin = number_param<std::size_t>(req, "row_begin").value_or(0);
  q.row_end = number_param<std::size_t>(req, "row_end");
  q.col_begin = number_param<std::size_t>(req, "col_begin").value_or(0);
  q.col_end = number_param<std::size_t>(req, "col_end");
  q.timestep = number_param<std::size_t>(req, "t");
  q.threshold = double_param(req, "threshold");
  if (req.has_param("row_ordering")) q.row_ordering = req.get_param_value("row_ordering");
  if (req.has_param("col_ordering")) q.col_ordering = req.get_param_value("col_ordering");
  q.hierarchy = number_param<std::size_t>(req, "hierarchy");
  const std::string mode = param(req, "mode", "predictions");
  if (mode != "predictions" && mode != "change") throw DomainError("mode must be predictions or change");
  q.change = mode == "change";
  q.page = number_param<std::size_t>(req, "page").value_or(0);
  q.page_size = number_param<std::size_t>(req, "page_size");
  return q;
}

Json job_json(const JobStatus& j) {
  Json out = {{"job", j.id},
              {"session", j.session},
              {"state", to_string(j.state)},
              {"before", j.before},
              {"seconds", j.seconds}};
  out["after"] = j.after.empty() ? Json(nullptr) : Json(j.after);
  out["diagnostic"] = j.diagnostic ? Json(*j.diagnostic) : Json(nullptr);
  if (j.state == JobState::PreviewReady) {
    out["change"] = {{"before", j.before}, {"after", j.after}, {"viewport_mode", "change"}};
  }
  return out;
}

}  // namespace

std::pair<int, std::string> classify_error(const std::exception& e) {
  if (dynamic_cast<const LookupError*>(&e)) return {404, "lookup"};
  if (dynamic_cast<const ConflictError*>(&e)) return {409, "conflict"};
  if (dynamic_cast<const StateError*>(&e)) return {409, "state"};
  if (dynamic_cast<const BudgetError*>(&e)) return {413, "budget"};
  if (dynamic_cast<const IndexError*>(&e)) return {400, "bounds"};
  if (dynamic_cast<const DomainError*>(&e)) return {400, "domain"};
  if (dynamic_cast<const DimensionError*>(&e)) return {400, "dimension"};
  if (dynamic_cast<const ParseError*>(&e)) return {400, "parse"};
  if (dynamic_cast<const NameError*>(&e)) return {400, "name"};
  if (dynamic_cast<const StructureError*>(&e)) return {400, "structure"};
  if (dynamic_cast<const IncompatibleError*>(&e)) return {409, "incompatible"};
  if (dynamic_cast<const AvailabilityError*>(&e)) return {503, "availability"};
  if (dynamic_cast<const UndefinedMetricError*>(&e)) return {400, "undefined-metric"};
  if (dynamic_cast<const NumericError*>(&e)) return {500, "numeric"};
  if (dynamic_cast<const Json::exception*>(&e)) return {400, "parse"};
  return {500, "internal"};
}

struct Server::Impl {
  explicit Impl(Engine& e) : engine(e) {}

  Engine& engine;
  httplib::Server http;

  using Body = std::function<void(const Request&, Response&)>;

  httplib::Server::Handler guarded(Body body) {
    return [body = std::move(body)](const Request& req, Response& res) {
      try {
        body(req, res);
      } catch (const std::exception& e) {
        const auto [status, kind] = classify_error(e);
        send(res, {{"error", kind}, {"message", e.what()}}, status);
      }
    };
  }

  Json session_reply(const std::string& session, std::optional<std::uint64_t> event) {
    Json j = session_json(*engine.session(session), engine.config());
    j["event"] = event ? Json(*event) : Json(nullptr);
    return j;
  }

  void routes() {
    http.Get("/session", guarded([this](const Request& req, Response& res) {
      Json j = session_json(*engine.session(session_of(req)), engine.config());
      j["sessions"] = engine.sessions();
      send(res, j);
    }));

    http.Post("/session", guarded([this](const Request& req, Response& res) {
      const Json body = body_of(req);
      const std::string from = body.value("from", std::string("main"));
      const std::string id = engine.create_session(from, body.value("id", std::string()));
      send(res, session_reply(id, engine.session(id)->head), 201);
    }));

    http.Get("/viewport", guarded([this](const Request& req, Response& res) {
      auto state = engine.session(session_of(req));
      send(res, viewport(*state, viewport_query(req), engine.config()));
    }));

    http.Get(R"(/cell/(\d+)/(\d+)/(timeline|keywords|documents))",
             guarded([this](const Request& req, Response& res) {
               auto state = engine.session(session_of(req));
               const std::size_t row = std::stoul(req.matches[1]);
               const std::size_t col = std::stoul(req.matches[2]);
               send(res, cell_detail(*state, row, col, req.matches[3], viewport_query(req),
                                     engine.config()));
             }));

    http.Get("/search", guarded([this](const Request& req, Response& res) {
      const std::string session = session_of(req);
      const std::string q = param(req, "q");
      auto state = engine.session(session);
      Json j = search(*state, q, number_param<std::size_t>(req, "page").value_or(0),
                      number_param<std::size_t>(req, "page_size"), engine.config());
      j["event"] = engine.record_search(session, q);
      send(res, j);
    }));

    http.Post("/view", guarded([this](const Request& req, Response& res) {
      const Json body = body_of(req);
      const std::string session = session_of(req, body);
      static const char* kChanges[] = {"threshold", "order", "hierarchy", "collapse", "marking",
                                       "annotation"};
      int present = 0;
      for (const char* k : kChanges) present += body.contains(k) ? 1 : 0;
      if (present != 1) {
        throw DomainError(
            "POST /view takes exactly one of threshold, order, hierarchy, collapse, marking, "
            "annotation");
      }
      std::uint64_t event = 0;
      Json extra = Json::object();
      if (body.contains("threshold")) {
        event = engine.set_threshold(session, body.at("threshold").get<double>());
      } else if (body.contains("order")) {
        auto [seq, ordering] = engine.reorder(session, ordering_request_from_json(body.at("order")));
        event = seq;
        extra["ordering"] = to_json(ordering);
      } else if (body.contains("hierarchy")) {
        const Json& h = body.at("hierarchy");
        event = engine.edit_hierarchy(session, axis_from_string(h.value("axis", std::string("rows"))),
                                      hierarchy_edit_from_json(h));
      } else if (body.contains("collapse")) {
        const Json& c = body.at("collapse");
        HierarchyEdit edit;
        edit.kind = HierarchyEdit::Kind::SetCollapse;
        edit.name = c.at("group").get<std::string>();
        edit.collapsed = c.value("collapsed", true);
        event = engine.edit_hierarchy(session, axis_from_string(c.value("axis", std::string("rows"))),
                                      edit);
      } else if (body.contains("marking")) {
        const Json& m = body.at("marking");
        event = engine.mark(session, {m.at("node").get<NodeId>(), m.at("edge").get<EdgeId>()},
                            m.value("starred", true));
      } else {
        const Json& a = body.at("annotation");
        event = engine.annotate(session, a.value("target", Json(nullptr)),
                                a.at("text").get<std::string>());
      }
      Json j = session_reply(session, event);
      for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
      send(res, j);
    }));

    http.Post("/feedback", guarded([this](const Request& req, Response& res) {
      Json body = body_of(req);
      const std::string session = session_of(req, body);
      body.erase("session");
      FeedbackSet feedback = feedback_from_json(body);
      if (feedback.empty()) throw DomainError("feedback needs at least one assertion");
      const std::uint64_t id = engine.submit_feedback(session, std::move(feedback));
      send(res, job_json(engine.job(id)), 202);
    }));

    http.Get(R"(/feedback/job/(\d+))", guarded([this](const Request& req, Response& res) {
      const std::uint64_t id = std::stoull(req.matches[1]);
      const auto wait = number_param<long>(req, "wait_ms").value_or(0);
      const JobStatus status = wait > 0
                                   ? engine.wait_job(id, std::chrono::milliseconds(std::min(wait, 30000L)))
                                   : engine.job(id);
      send(res, job_json(status));
    }));

    http.Post("/feedback/resolve", guarded([this](const Request& req, Response& res) {
      const Json body = body_of(req);
      const std::string session = session_of(req, body);
      const std::string decision = body.value("decision", std::string());
      if (decision != "accept" && decision != "reject") {
        throw DomainError("decision must be accept or reject");
      }
      const std::uint64_t event = engine.resolve_feedback(
          session, decision == "accept" ? Decision::Accept : Decision::Reject);
      send(res, session_reply(session, event));
    }));

    http.Get("/provenance", guarded([this](const Request& req, Response& res) {
      const auto events = engine.events();
      const std::string only = param(req, "session");
      Json list = Json::array();
      for (const auto& e : events) {
        if (only.empty() || e.session == only) list.push_back(e.to_json());
      }
      Json heads = Json::object();
      for (const auto& s : engine.sessions()) {
        auto h = engine.session(s)->head;
        heads[s] = h ? Json(*h) : Json(nullptr);
      }
      send(res, {{"version", kLogVersion}, {"events", std::move(list)}, {"heads", heads}});
    }));

    http.Post("/provenance/undo", guarded([this](const Request& req, Response& res) {
      const Json body = body_of(req);
      const std::string session = session_of(req, body);
      const std::uint64_t event = engine.undo(session);
      send(res, session_reply(session, event));
    }));

    http.Get(R"(/snapshot/([0-9a-f]+))", guarded([this](const Request& req, Response& res) {
      SnapshotPtr snap = engine.snapshot(req.matches[1]);
      if (param(req, "format", "json") == "summary") {
        Json horizons = Json::array();
        for (const auto& p : snap->forecast.predictions) {
          horizons.push_back({{"horizon", p.horizon}, {"confidence", p.confidence}});
        }
        send(res, {{"id", snap->id},
                   {"rank", snap->training.rank()},
                   {"seed", snap->training.seed},
                   {"horizons", horizons},
                   {"feedback", snap->feedback.size()}});
        return;
      }
      send(res, to_json(*snap));
    }));

    http.set_error_handler([](const Request&, Response& res) {
      if (res.body.empty()) {
        send(res, {{"error", "lookup"}, {"message", "no such endpoint"}}, res.status);
      }
    });
  }
};

Server::Server(Engine& engine) : impl_(std::make_unique<Impl>(engine)) { impl_->routes(); }

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  if (!impl_->http.bind_to_port(host, port)) {
    throw AvailabilityError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace hgx
