// chartio: command-line front door. Exit codes: 0 ok, 2 usage / malformed input,
// 3 resource (files, memory budget, network), 4 consistency failure.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "synss/bockstein.hpp"
#include "synss/chartio.hpp"
#include "synss/cobar.hpp"
#include "synss/deduce.hpp"
#include "synss/linf2.hpp"
#include "synss/service.hpp"

using namespace synss;
using nlohmann::json;

namespace {

struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot write " + path);
  out << text;
}

Session load_session(const std::string& path) {
  std::istringstream in(read_file(path));
  return Session::replay(in);
}

// Dense upper bound for the elimination work of a complex, in bytes.
double estimate_bytes(const CobarComplex& cx) {
  double b = 0;
  for (auto& blk : cx.f2_blocks)
    for (size_t f = 0; f + 1 < blk.dim.size(); ++f) b += double(blk.dim[f]) * double(blk.dim[f + 1]) / 8.0;
  for (auto& blk : cx.z_blocks)
    for (size_t f = 0; f + 1 < blk.dim.size(); ++f) b += double(blk.dim[f]) * double(blk.dim[f + 1]) * 8.0;
  return b;
}

void check_budget(const CobarComplex& cx, int memory_mb) {
  double need = estimate_bytes(cx);
  if (need > double(memory_mb) * 1024 * 1024)
    throw ResourceError("complex needs about " + std::to_string(int(need / (1024 * 1024))) +
                        " MB, over the memory budget of " + std::to_string(memory_mb) + " MB");
}

struct Config {
  int p = 2, t_max = 14, f_max = -1, n_max = 4, r_max = 4, memory_mb = 4096;
  std::optional<int> w_max, u_max;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chartio: Ext, spectral sequences, Bockstein reconstruction and deduction sessions"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("-p,--prime", cfg.p, "prime")->envname("SYNSS_P")->check(CLI::PositiveNumber);
  app.add_option("--memory-mb", cfg.memory_mb, "memory budget in MB")->envname("SYNSS_MEMORY_MB")->check(CLI::PositiveNumber);

  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--tmax", cfg.t_max, "largest internal degree t")->envname("SYNSS_TMAX")->check(CLI::NonNegativeNumber);
    sub->add_option("--fmax", cfg.f_max, "largest cohomological degree (-1: t_max + 1)")->envname("SYNSS_FMAX");
    sub->add_option("--nmax", cfg.n_max, "number of polynomial generators per family")->envname("SYNSS_NMAX")->check(CLI::PositiveNumber);
    sub->add_option("--wmax", cfg.w_max, "largest weight")->envname("SYNSS_WMAX");
    sub->add_option("--umax", cfg.u_max, "largest algebraic Novikov filtration")->envname("SYNSS_UMAX");
  };

  // ext
  auto* ext = app.add_subcommand("ext", "Ext of a builtin Hopf algebra(oid) via its cobar complex");
  std::string algebra = "steenrod_dual", ext_out;
  ext->add_option("--algebra", algebra, "builtin presentation")->check(CLI::IsMember(HopfAlgebroid::builtin_names()));
  ext->add_option("--out", ext_out, "output JSON (default stdout)");
  add_range(ext);

  // ss
  auto* ss = app.add_subcommand("ss", "spectral sequence of a filtered cobar complex");
  std::string ss_kind, ss_out, ss_svg, ss_classical;
  int ss_page = 2;
  ss->add_option("kind", ss_kind, "cess | anss | synthetic")->required()->check(CLI::IsMember({"cess", "anss", "synthetic"}));
  ss->add_option("--rmax", cfg.r_max, "last page")->envname("SYNSS_RMAX")->check(CLI::PositiveNumber);
  ss->add_option("--out", ss_out, "output JSON (default stdout)");
  ss->add_option("--svg", ss_svg, "render the E_page chart");
  ss->add_option("--page", ss_page, "page rendered by --svg");
  ss->add_option("--classical", ss_classical, "classical classes/differentials as JSON lines (anss)");
  add_range(ss);

  // bockstein
  auto* bock = app.add_subcommand("bockstein", "λ-Bockstein reconstruction from classical aNSS data");
  std::string bock_in, bock_out;
  bock->add_option("--in", bock_in, "classical JSON lines")->required();
  bock->add_option("--out", bock_out, "λ-module JSON (default stdout)");

  // session
  auto* sess = app.add_subcommand("session", "deduction sessions (event logs)");
  sess->require_subcommand(1);
  std::string log_path, out_path, quotient_path, target_path, chart_out;
  auto* s_replay = sess->add_subcommand("replay", "replay a log and print its chart");
  s_replay->add_option("--log", log_path)->required();
  s_replay->add_option("--chart", chart_out, "chart JSON (default stdout)");
  auto* s_prop = sess->add_subcommand("propagate", "run Leibniz propagation and append to the log");
  s_prop->add_option("--log", log_path)->required();
  s_prop->add_option("--out", out_path, "updated log (default: in place)");
  auto* s_check = sess->add_subcommand("check", "consistency audit");
  s_check->add_option("--log", log_path)->required();
  s_check->add_option("--quotient", quotient_path, "linked S/lambda session log");
  auto* s_cmp = sess->add_subcommand("compare", "hidden extensions from a comparison Ext table");
  s_cmp->add_option("--log", log_path)->required();
  s_cmp->add_option("--target", target_path, "comparison data, JSON lines")->required();
  s_cmp->add_option("--out", out_path, "updated log (default: in place)");
  auto* s_tr = sess->add_subcommand("transfer", "lift S/lambda facts along i and apply the q module-map check");
  s_tr->add_option("--log", log_path, "chart of S")->required();
  s_tr->add_option("--quotient", quotient_path, "chart of S/lambda")->required();
  s_tr->add_option("--out", out_path, "updated log (default: in place)");

  // chart
  auto* chart = app.add_subcommand("chart", "chart documents");
  chart->require_subcommand(1);
  std::string render_in, render_doc, render_svg, render_json;
  auto* render = chart->add_subcommand("render", "render a session log or chart document to SVG");
  auto* in_opt = render->add_option("--in", render_in, "session log (JSON lines)");
  render->add_option("--doc", render_doc, "chart document JSON")->excludes(in_opt);
  render->add_option("--svg", render_svg, "SVG output (default stdout)");
  render->add_option("--json", render_json, "also write the chart document");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP/JSON session service");
  std::string host = "127.0.0.1", logs_dir = "sessions", fixtures_dir = std::string(SYNSS_DATA_DIR) + "/fixtures";
  int port = 8080;
  serve->add_option("--host", host)->envname("SYNSS_HOST");
  serve->add_option("--port", port)->envname("SYNSS_PORT")->check(CLI::Range(1, 65535));
  serve->add_option("--logs", logs_dir, "directory of persisted session logs")->envname("SYNSS_LOG_DIR");
  serve->add_option("--fixtures", fixtures_dir, "directory of loadable fixtures")->envname("SYNSS_FIXTURE_DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_memory_budget(static_cast<size_t>(cfg.memory_mb) << 20);
    if (*ext) {
      auto h = HopfAlgebroid::builtin(algebra, cfg.p, cfg.n_max);
      CobarBounds b;
      b.t_max = cfg.t_max;
      b.f_max = cfg.f_max;
      b.w_max = cfg.w_max;
      b.u_max = cfg.u_max;
      auto cx = build_cobar(h, b);
      check_budget(cx, cfg.memory_mb);
      if (auto bad = check_d_squared(cx); !bad.empty()) throw ConsistencyError("d∘d ≠ 0: " + bad.front());
      write_file(ext_out, ext_groups(cx).to_json().dump(1) + "\n");
    } else if (*ss) {
      FilteredCobarComplex fcx;
      CobarBounds b;
      b.t_max = cfg.t_max;
      b.f_max = cfg.f_max;
      b.u_max = cfg.u_max;
      if (ss_kind == "cess") {
        auto cx = build_cobar(HopfAlgebroid::builtin("steenrod_dual", cfg.p, cfg.n_max), b);
        check_budget(cx, cfg.memory_mb);
        fcx = filter_cartan_eilenberg(std::move(cx));
      } else if (ss_kind == "anss") {
        b.w_max = cfg.w_max.value_or(cfg.t_max);
        auto cx = build_cobar(HopfAlgebroid::builtin("bp_classical", cfg.p, cfg.n_max), b);
        check_budget(cx, cfg.memory_mb);
        fcx = filter_novikov(std::move(cx), "I");
      } else {
        b.w_min = 0;
        b.w_max = cfg.w_max.value_or(cfg.t_max);
        if (!b.u_max) b.u_max = b.w_max;
        auto cx = build_cobar(HopfAlgebroid::builtin("bp_synthetic", cfg.p, cfg.n_max), b);
        check_budget(cx, cfg.memory_mb);
        fcx = filter_novikov(std::move(cx), "J");
      }
      if (auto bad = check_filtration_monotone(fcx); !bad.empty())
        throw ConsistencyError("filtration not monotone: " + bad.front());
      auto res = ss_run(fcx, cfg.r_max);
      write_file(ss_out, res.to_json().dump(1) + "\n");
      if (!ss_svg.empty()) {
        if (ss_page < 1 || ss_page > cfg.r_max) throw std::invalid_argument("--page must lie in [1, rmax]");
        write_file(ss_svg, svg_render(ChartDocument::from_ss(res, ss_page)));
      }
      if (!ss_classical.empty()) {
        if (ss_kind != "anss") throw std::invalid_argument("--classical needs the anss kind");
        std::ostringstream o;
        write_classical_jsonl(o, classical_from_ss(res, cfg.r_max));
        write_file(ss_classical, o.str());
      }
      std::vector<std::string> bad = res.violations;
      if (res.kind == "CESS")  // the only run with finite pages in each degree
        for (auto& v : check_euler_characteristic(res)) bad.push_back(v);
      if (!bad.empty()) throw ConsistencyError(bad.front());
    } else if (*bock) {
      std::istringstream in(read_file(bock_in));
      auto data = read_classical_jsonl(in);
      auto pres = reconstruct(data.classes, data.diffs, cfg.p);
      write_file(bock_out, pres.to_json().dump(1) + "\n");
      for (auto& w : pres.warnings) std::cerr << "warning: " << w << "\n";
      if (auto bad = check_les(pres); !bad.empty()) throw ConsistencyError("exact sequence: " + bad.front());
    } else if (*sess) {
      auto s = load_session(log_path);
      auto save = [&] { s.write_log(out_path.empty() ? log_path : out_path); };
      if (*s_replay) {
        write_file(chart_out, s.export_chart().dump(1) + "\n");
      } else if (*s_prop) {
        auto r = s.propagate_leibniz();
        save();
        std::cout << "derived " << r.derived.size() << " facts, " << r.tasks.size() << " open tasks\n";
        for (auto& t : r.tasks) std::cout << "task [" << t.kind << "] " << t.text << "\n";
        if (!r.conflicts.empty()) throw ConsistencyError(r.conflicts.front());
      } else if (*s_check) {
        std::optional<Session> q;
        if (!quotient_path.empty()) q = load_session(quotient_path);
        auto rep = s.check_consistency(q ? &*q : nullptr);
        for (auto& p : rep.problems) std::cout << "problem: " << p << "\n";
        if (!rep.ok()) throw ConsistencyError(std::to_string(rep.problems.size()) + " consistency problems");
        std::cout << "consistent\n";
      } else if (*s_cmp) {
        std::istringstream in(read_file(target_path));
        auto rep = infer_hidden_from_comparison(s, ComparisonTarget::read_jsonl(in));
        save();
        for (auto& it : rep.items) std::cout << it.status << ": " << it.product << (it.detail.empty() ? "" : " — " + it.detail) << "\n";
      } else if (*s_tr) {
        auto q = load_session(quotient_path);
        auto tr = transfer_via_i(s, q);
        auto ids = apply_transfer(s, tr);
        auto qm = q_module_check(s, q);
        auto forced = apply_forced(s, qm);
        save();
        std::cout << "transferred " << ids.size() << " facts, forced " << forced.size() << " extensions\n";
        for (auto& t : tr.tasks) std::cout << "task [" << t.kind << "] " << t.text << "\n";
        for (auto& v : qm.violations) std::cout << "violation: " << v << "\n";
        if (!qm.violations.empty()) throw ConsistencyError("q is not a module map on the recorded data");
      }
    } else if (*chart) {
      ChartDocument doc;
      if (!render_doc.empty()) doc = ChartDocument::from_json(json::parse(read_file(render_doc)));
      else if (!render_in.empty()) doc = ChartDocument::from_session(load_session(render_in));
      else throw std::invalid_argument("chart render needs --in or --doc");
      if (auto bad = doc.validate(); !bad.empty()) throw ConsistencyError(bad.front());
      write_file(render_svg, svg_render(doc));
      if (!render_json.empty()) write_file(render_json, doc.to_json().dump(1) + "\n");
    } else if (*serve) {
      SessionService svc(logs_dir, fixtures_dir);
      std::cerr << "serving " << svc.ids().size() << " sessions on http://" << host << ":" << port << "\n";
      return run_server(svc, host, port);
    }
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 3;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return 4;
  } catch (const DeductionError& e) {
    std::cerr << "error [" << e.code << "]: " << e.what() << "\n";
    return (e.code == "invalid" || e.code == "unknown_class") ? 2 : 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
