// HTTP/JSON session service: the deduce session operations behind a small
// REST protocol. Handlers are transport independent; mount() binds them to
// an httplib server.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "json.hpp"
#include "synss/deduce.hpp"

namespace httplib {
class Server;
}

namespace synss {

struct ServiceError : std::runtime_error {
  int status;
  std::string code;
  ServiceError(int s, std::string c, const std::string& what) : std::runtime_error(what), status(s), code(std::move(c)) {}
};

class SessionService {
 public:
  // log_dir: where each session's event log is persisted as <id>.jsonl ("" = memory only).
  // Existing logs in the directory are replayed on construction.
  explicit SessionService(std::string log_dir = "", std::string fixture_dir = "");

  // POST /sessions  body: {"id","chart","p"} | {"log": jsonl text} | {"fixture": name}
  nlohmann::json create(const nlohmann::json& body);
  // GET /sessions/{id}/chart
  nlohmann::json chart(const std::string& id) const;
  // POST /sessions/{id}/differentials  body: {"r","source","target","cite"?, "propagate"?}
  nlohmann::json add_differential(const std::string& id, const nlohmann::json& body);
  // POST /sessions/{id}/extensions  body: {"kind","source","target","level"?, "cite"?, "propagate"?}
  nlohmann::json add_extension(const std::string& id, const nlohmann::json& body);
  // POST /sessions/{id}/propagate
  nlohmann::json propagate(const std::string& id);
  // GET /sessions/{id}/log
  std::string log(const std::string& id) const;
  std::vector<std::string> ids() const;

  void mount(httplib::Server& server);

 private:
  struct Entry {
    mutable std::mutex mu;  // serializes mutations of one session
    std::unique_ptr<Session> s;
  };
  std::string log_dir_, fixture_dir_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;

  Entry& entry(const std::string& id) const;
  nlohmann::json mutate(const std::string& id, const nlohmann::json& ev, bool propagate);
  void persist(const Entry& e) const;
};

// Blocking: serves until the process is stopped.
int run_server(SessionService& svc, const std::string& host, int port);

}  // namespace synss
