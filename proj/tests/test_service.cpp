#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "synss/service.hpp"

using namespace synss;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("synss_service_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

int status_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.status;
  }
  return 200;
}

// In-process server on an ephemeral port.
struct Running {
  httplib::Server srv;
  std::thread th;
  int port = 0;
  explicit Running(SessionService& svc) {
    svc.mount(srv);
    port = srv.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { srv.listen_after_bind(); });
    srv.wait_until_ready();
  }
  ~Running() {
    srv.stop();
    th.join();
  }
};

}  // namespace

TEST_CASE("handlers: load a chart and assert d_3(alpha_{6/3})") {
  SessionService svc("", SYNSS_FIXTURES);
  auto created = svc.create({{"fixture", "anss_smodlambda_s20"}});
  CHECK(created["id"] == "Smod20");
  auto out = svc.add_differential("Smod20", {{"r", 3}, {"source", "alpha_{6/3}"}, {"target", "alpha_1^2c_0"}});
  CHECK(out["fact"].is_string());
  CHECK(out["conflicts"].empty());
  auto chart = svc.chart("Smod20");
  bool found = false;
  for (auto& d : chart["differentials"]) found |= d["source"] == "alpha_{6/3}" && d["r"] == 3;
  CHECK(found);
  CHECK(svc.ids() == std::vector<std::string>{"Smod20"});
}

TEST_CASE("handlers: error statuses") {
  SessionService svc("", SYNSS_FIXTURES);
  svc.create({{"fixture", "anss_smodlambda_s20"}});
  CHECK(status_of([&] { svc.chart("nope"); }) == 404);
  CHECK(status_of([&] { svc.create({{"fixture", "missing_fixture"}}); }) == 404);
  CHECK(status_of([&] { svc.create({{"fixture", "anss_smodlambda_s20"}}); }) == 409);
  CHECK(status_of([&] { svc.create({{"id", "bad id!"}, {"chart", "ANSS-S"}}); }) == 400);
  CHECK(status_of([&] { svc.add_differential("Smod20", {{"r", 3}}); }) == 400);
  CHECK(status_of([&] {
          svc.add_differential("Smod20", {{"r", 3}, {"source", "alpha_{6/3}"}, {"target", "+ +"}});
        }) == 422);
  // wrong stem shift
  CHECK(status_of([&] {
          svc.add_differential("Smod20", {{"r", 2}, {"source", "alpha_{6/3}"}, {"target", "alpha_1^2c_0"}});
        }) == 422);
  CHECK(status_of([&] {
          svc.add_differential("Smod20", {{"r", 3}, {"source", "no_class"}, {"target", "alpha_1"}});
        }) == 404);
  svc.add_differential("Smod20", {{"r", 3}, {"source", "alpha_{6/3}"}, {"target", "alpha_1^2c_0"}});
  CHECK(status_of([&] {
          svc.add_differential("Smod20", {{"r", 3}, {"source", "alpha_1^2c_0"}, {"target", "alpha_{6/3}"}});
        }) != 200);
}

TEST_CASE("handlers: logs persist and replay on restart") {
  auto dir = scratch("persist");
  std::string before;
  {
    SessionService svc(dir.string(), SYNSS_FIXTURES);
    svc.create({{"fixture", "anss_smodlambda_s20"}});
    svc.add_differential("Smod20", {{"r", 3}, {"source", "alpha_{6/3}"}, {"target", "alpha_1^2c_0"}});
    before = svc.chart("Smod20").dump();
    CHECK(fs::exists(dir / "Smod20.jsonl"));
  }
  SessionService again(dir.string(), SYNSS_FIXTURES);
  CHECK(again.ids() == std::vector<std::string>{"Smod20"});
  CHECK(again.chart("Smod20").dump() == before);
  fs::remove_all(dir);
}

TEST_CASE("handlers: a session created from log text") {
  SessionService svc("", SYNSS_FIXTURES);
  svc.create({{"id", "S1"}, {"chart", "ANSS-S"}});
  auto text = svc.log("S1");
  CHECK(status_of([&] { svc.create({{"log", text}}); }) == 409);
  CHECK(status_of([&] { svc.create({{"log", "{not json"}}); }) == 400);
  auto p = svc.propagate("S1");
  CHECK(p["derived"].empty());
}

TEST_CASE("over HTTP") {
  SessionService svc("", SYNSS_FIXTURES);
  Running run(svc);
  REQUIRE(run.port > 0);
  httplib::Client cli("127.0.0.1", run.port);
  auto r = cli.Post("/sessions", R"({"fixture": "anss_smodlambda_s20"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  r = cli.Post("/sessions/Smod20/differentials", R"({"r": 3, "source": "alpha_{6/3}", "target": "alpha_1^2c_0"})",
               "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["fact"].is_string());
  r = cli.Get("/sessions/Smod20/chart");
  REQUIRE(r);
  CHECK(json::parse(r->body)["schema"] == "synss.chart/1");
  r = cli.Get("/sessions/Smod20/log");
  REQUIRE(r);
  CHECK(r->body.find("alpha_{6/3}") != std::string::npos);
  r = cli.Get("/sessions/none/chart");
  REQUIRE(r);
  CHECK(r->status == 404);
  CHECK(json::parse(r->body)["code"] == "not_found");
  r = cli.Post("/sessions", "{oops", "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);
  r = cli.Post("/sessions", R"({"fixture": "anss_smodlambda_s20"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 409);
  r = cli.Post("/sessions/Smod20/differentials", R"({"r": 2, "source": "alpha_{6/3}", "target": "alpha_1^2c_0"})",
               "application/json");
  REQUIRE(r);
  CHECK(r->status == 422);
  r = cli.Post("/sessions/Smod20/propagate", "", "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
}
