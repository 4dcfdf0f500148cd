#include "synss/service.hpp"

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "httplib.h"

namespace synss {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::regex kIdPattern("[A-Za-z0-9_.-]{1,64}");

void check_id(const std::string& id) {
  if (!std::regex_match(id, kIdPattern)) throw ServiceError(400, "invalid", "invalid session id '" + id + "'");
}

int status_for(const DeductionError& e) {
  if (e.code == "unknown_class") return 404;
  if (e.code == "conflict" || e.code == "dead_source") return 409;
  return 422;
}

}  // namespace

SessionService::SessionService(std::string log_dir, std::string fixture_dir)
    : log_dir_(std::move(log_dir)), fixture_dir_(std::move(fixture_dir)) {
  if (log_dir_.empty()) return;
  fs::create_directories(log_dir_);
  std::vector<fs::path> logs;
  for (auto& e : fs::directory_iterator(log_dir_))
    if (e.path().extension() == ".jsonl") logs.push_back(e.path());
  std::sort(logs.begin(), logs.end());
  for (auto& p : logs) {
    auto s = std::make_unique<Session>(Session::replay_file(p.string()));
    auto e = std::make_unique<Entry>();
    std::string id = s->id();
    e->s = std::move(s);
    sessions_[id] = std::move(e);
  }
}

SessionService::Entry& SessionService::entry(const std::string& id) const {
  std::shared_lock lock(map_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "not_found", "no session '" + id + "'");
  return *it->second;
}

void SessionService::persist(const Entry& e) const {
  if (!log_dir_.empty()) e.s->write_log((fs::path(log_dir_) / (e.s->id() + ".jsonl")).string());
}

std::vector<std::string> SessionService::ids() const {
  std::shared_lock lock(map_mu_);
  std::vector<std::string> out;
  for (auto& [id, e] : sessions_) out.push_back(id);
  return out;
}

json SessionService::create(const json& body) {
  std::unique_ptr<Session> s;
  try {
    if (body.contains("log")) {
      std::istringstream in(body.at("log").get<std::string>());
      s = std::make_unique<Session>(Session::replay(in));
    } else if (body.contains("fixture")) {
      std::string name = body.at("fixture");
      check_id(name);
      auto path = fs::path(fixture_dir_) / (name + ".jsonl");
      if (fixture_dir_.empty() || !fs::exists(path)) throw ServiceError(404, "not_found", "no fixture '" + name + "'");
      s = std::make_unique<Session>(Session::replay_file(path.string()));
    } else {
      s = std::make_unique<Session>(body.at("id").get<std::string>(), chart_kind_from(body.at("chart")),
                                    body.value("p", 2));
    }
  } catch (const DeductionError& e) {
    throw ServiceError(422, e.code, e.what());
  } catch (const ParseError& e) {
    throw ServiceError(400, "invalid", e.what());
  } catch (const json::exception& e) {
    throw ServiceError(400, "invalid", e.what());
  }
  if (body.contains("id") && (body.contains("log") || body.contains("fixture")) && body["id"] != s->id())
    throw ServiceError(400, "invalid", "body id does not match the log's session id " + s->id());
  std::string id = s->id();
  check_id(id);
  auto e = std::make_unique<Entry>();
  e->s = std::move(s);
  {
    std::unique_lock lock(map_mu_);
    if (sessions_.count(id)) throw ServiceError(409, "exists", "session '" + id + "' already exists");
    persist(*e);
    sessions_[id] = std::move(e);
  }
  return {{"id", id}, {"derived", json::array()}};
}

json SessionService::chart(const std::string& id) const {
  auto& e = entry(id);
  std::lock_guard lock(e.mu);
  return e.s->export_chart();
}

std::string SessionService::log(const std::string& id) const {
  auto& e = entry(id);
  std::lock_guard lock(e.mu);
  return e.s->log_text();
}

json SessionService::mutate(const std::string& id, const json& ev, bool propagate) {
  auto& e = entry(id);
  std::lock_guard lock(e.mu);
  json out{{"fact", nullptr}, {"derived", json::array()}, {"tasks", json::array()}, {"conflicts", json::array()}};
  std::vector<std::string> derived;
  try {
    if (!ev.is_null()) {
      auto r = e.s->apply_event(ev);
      if (r.contains("fact")) out["fact"] = r["fact"];
    }
    if (propagate) {
      auto r = e.s->apply_event({{"op", "propagate"}});
      derived = r.value("derived", std::vector<std::string>{});
      out["conflicts"] = r.value("conflicts", json::array());
    }
  } catch (const DeductionError& err) {
    persist(e);
    throw ServiceError(status_for(err), err.code, err.what());
  } catch (const ParseError& err) {
    throw ServiceError(400, "invalid", err.what());
  } catch (const json::exception& err) {
    throw ServiceError(400, "invalid", err.what());
  }
  persist(e);
  // derived facts in full, so a client can show them without re-deriving anything
  auto chart = e.s->export_chart();
  std::set<std::string> want(derived.begin(), derived.end());
  for (auto& d : chart["differentials"])
    if (want.count(d["id"])) out["derived"].push_back(d);
  for (auto& x : chart["extensions"])
    if (want.count(x["id"])) out["derived"].push_back(x);
  out["tasks"] = chart["tasks"];
  return out;
}

json SessionService::add_differential(const std::string& id, const json& body) {
  if (!body.contains("r") || !body.contains("source") || !body.contains("target"))
    throw ServiceError(400, "invalid", "differential needs r, source and target");
  json ev{{"op", "differential"},
          {"r", body["r"]},
          {"source", body["source"]},
          {"target", body["target"]},
          {"provenance", "asserted"},
          {"cite", body.value("cite", "entered by user")},
          {"parents", json::array()}};
  return mutate(id, ev, body.value("propagate", true));
}

json SessionService::add_extension(const std::string& id, const json& body) {
  if (!body.contains("kind") || !body.contains("source") || !body.contains("target"))
    throw ServiceError(400, "invalid", "extension needs kind, source and target");
  json ev{{"op", "extension"},
          {"kind", body["kind"]},
          {"source", body["source"]},
          {"target", body["target"]},
          {"level", body.value("level", "Einf")},
          {"provenance", "asserted"},
          {"cite", body.value("cite", "entered by user")},
          {"parents", json::array()}};
  return mutate(id, ev, body.value("propagate", true));
}

json SessionService::propagate(const std::string& id) { return mutate(id, nullptr, true); }

void SessionService::mount(httplib::Server& srv) {
  auto reply = [](httplib::Response& res, const std::function<json()>& f) {
    try {
      res.set_content(f().dump(), "application/json");
    } catch (const ServiceError& e) {
      res.status = e.status;
      res.set_content(json{{"error", e.what()}, {"code", e.code}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error", e.what()}, {"code", "internal"}}.dump(), "application/json");
    }
  };
  auto body_of = [](const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
      return json::parse(req.body);
    } catch (const json::exception& e) {
      throw ServiceError(400, "invalid", std::string("malformed JSON body: ") + e.what());
    }
  };
  srv.Post("/sessions", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return create(body_of(req)); });
  });
  srv.Get(R"(/sessions/([^/]+)/chart)", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return chart(req.matches[1]); });
  });
  srv.Post(R"(/sessions/([^/]+)/differentials)", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return add_differential(req.matches[1], body_of(req)); });
  });
  srv.Post(R"(/sessions/([^/]+)/extensions)", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return add_extension(req.matches[1], body_of(req)); });
  });
  srv.Post(R"(/sessions/([^/]+)/propagate)", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return propagate(req.matches[1]); });
  });
  srv.Get(R"(/sessions/([^/]+)/log)", [=, this](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(log(req.matches[1]), "application/x-ndjson");
    } catch (const ServiceError& e) {
      res.status = e.status;
      res.set_content(json{{"error", e.what()}, {"code", e.code}}.dump(), "application/json");
    }
  });
}

int run_server(SessionService& svc, const std::string& host, int port) {
  httplib::Server srv;
  svc.mount(srv);
  return srv.listen(host, port) ? 0 : 3;
}

}  // namespace synss
