// Acceptance run: one PASS/FAIL line per criterion, limits pinned below.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "bockstein_prediction.hpp"
#include "golden_flow.hpp"
#include "oracle/hazewinkel.hpp"
#include "oracle/minres.hpp"
#include "synss/bockstein.hpp"
#include "synss/deduce.hpp"
#include "synss/hopf.hpp"
#include "synss/linf2.hpp"

using namespace synss;

namespace {

constexpr double kLimit1 = 1.0;    // s, right unit golden values
constexpr double kLimit2 = 5.0;    // s, λ-inversion vs Hazewinkel
constexpr double kLimit4 = 60.0;   // s, Ext_{A_*} vs minimal resolution
constexpr double kLimit5 = 300.0;  // s, CESS vs aNSS E_2
constexpr int kExtT = 14;          // t range for criteria 4 and 5
constexpr int kHazewinkelN = 4;

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail.clear();
    ok = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

Polynomial P(const std::string& s, const RingPtr& r) { return parse_polynomial(s, r); }

oracle::QPoly to_q(const Polynomial& x, int N) {
  auto& pres = *x.ring()->pres;
  oracle::QPoly out{N, {}};
  for (auto& term : x.terms()) {
    std::vector<int> e(2 * N, 0);
    for (auto [g, k] : term.mono.entries()) {
      const auto& name = pres.gen(g).name;
      e[(name[0] == 'v' ? 0 : N) + std::stoi(name.substr(1)) - 1] = k;
    }
    out.terms[e] = term.coef.value();
  }
  return out;
}

SSResult classical_anss(int t_max, int w_max) {
  CobarBounds b;
  b.t_max = t_max;
  b.w_max = w_max;
  return ss_run(filter_novikov(build_cobar(HopfAlgebroid::builtin("bp_classical", 2, 4), b), "I"), 4);
}

SSResult synthetic_anss(int t_max, int w_min, int w_max) {
  CobarBounds b;
  b.t_max = t_max;
  b.w_min = w_min;
  b.w_max = w_max;
  b.u_max = w_max;
  return ss_run(filter_novikov(build_cobar(HopfAlgebroid::builtin("bp_synthetic", 2, 4), b), "J"), 4);
}

// ---------------------------------------------------------------- criteria

Outcome right_unit_golden() {
  Outcome o;
  auto s = HopfAlgebroid::builtin("bp_synthetic", 2, 2);
  auto r = s->ring();
  if (s->eta_R_gen(s->index("v1")) != P("v1 + h*t1", r)) o.fail("eta_R(v1) = " + s->eta_R_gen(s->index("v1")).str());
  auto want = P("v2 + h*t2 - 5*v1*t1^2 - 2*h*t1^3 - 3*L*v1^2*t1", r);
  if (s->eta_R_gen(s->index("v2")) != want) o.fail("eta_R(v2) = " + s->eta_R_gen(s->index("v2")).str());
  if (o.ok) o.detail = "eta_R(v2) = " + want.str();
  return o;
}

Outcome lambda_inversion() {
  Outcome o;
  auto s = HopfAlgebroid::builtin("bp_synthetic", 2, kHazewinkelN);
  auto c = HopfAlgebroid::builtin("bp_classical", 2, kHazewinkelN);
  auto oracle_eta = oracle::hazewinkel_eta_r(2, kHazewinkelN);
  for (int n = 1; n <= kHazewinkelN; ++n) {
    auto loc = localize_lambda(s->eta_R_gen(s->index("v" + std::to_string(n))), c->ring());
    if (!(to_q(loc, kHazewinkelN) == oracle_eta[n])) o.fail("n = " + std::to_string(n));
  }
  if (o.ok) o.detail = "n <= " + std::to_string(kHazewinkelN) + " exact";
  return o;
}

Outcome homogeneity() {
  Outcome o;
  auto s = HopfAlgebroid::builtin("bp_synthetic", 2, 4);
  int terms = 0, bad = 0;
  for (int n = 1; n <= 4; ++n) {
    auto vn = s->index("v" + std::to_string(n)), tn = s->index("t" + std::to_string(n));
    for (auto [g, img, what] : {std::tuple{vn, s->eta_R_gen(vn), "eta_R(v"}, {tn, s->coproduct_gen(tn), "Delta(t"},
                                {tn, s->antipode_gen(tn), "c(t"}}) {
      auto want = s->presentation()->gen(g).deg;
      for (auto& d : img.term_degrees()) {
        ++terms;
        if (d.t != want.t || d.w != want.w) {
          ++bad;
          o.fail(std::string(what) + std::to_string(n) + ")");
        }
      }
    }
  }
  if (o.ok) o.detail = std::to_string(terms) + " monomials, " + std::to_string(bad) + " violations";
  return o;
}

Outcome ext_sanity() {
  Outcome o;
  CobarBounds b;
  b.t_max = kExtT;
  auto ext = ext_groups(build_cobar(HopfAlgebroid::builtin("steenrod_dual", 2, 5), b));
  oracle::MinimalResolution mr(kExtT);
  int compared = 0;
  for (int t = 0; t <= kExtT; ++t)
    for (int f = 0; f <= ext.f_max; ++f, ++compared)
      if (ext.dim(f, t) != mr.ext(f, t))
        o.fail("Ext^{" + std::to_string(f) + "," + std::to_string(t) + "}: cobar " + std::to_string(ext.dim(f, t)) +
               ", resolution " + std::to_string(mr.ext(f, t)));
  for (int f = 0; f <= std::min(ext.f_max, kExtT); ++f)
    if (ext.dim(f, f) != 1) o.fail("h_0 tower breaks at f = " + std::to_string(f));
  if (o.ok) o.detail = std::to_string(compared) + " bidegrees, h_0 tower through f = " + std::to_string(std::min(ext.f_max, kExtT));
  return o;
}

Outcome miller_equivalence() {
  Outcome o;
  CobarBounds sb;
  sb.t_max = kExtT;
  auto ce = ss_run(filter_cartan_eilenberg(build_cobar(HopfAlgebroid::builtin("steenrod_dual", 2, 5), sb)), 2);
  CobarBounds bb;
  bb.t_max = kExtT;
  bb.w_max = kExtT;
  auto an = ss_run(filter_novikov(build_cobar(HopfAlgebroid::builtin("bp_classical", 2, 4), bb), "I"), 2);
  if (!ce.violations.empty()) o.fail("CESS: " + ce.violations.front());
  if (!an.violations.empty()) o.fail("aNSS: " + an.violations.front());
  std::map<Spot, int> a, c;
  for (auto& [s, d] : an.page(2).dims)
    if (d) a[s] = d;
  for (auto& [s, d] : ce.page(2).dims)
    if (d && std::get<3>(s) <= kExtT) c[s] = d;
  for (auto& [s, d] : a)
    if (c[s] != d) o.fail(prediction::spot_text(2, s) + ": aNSS " + std::to_string(d) + ", CESS " + std::to_string(c[s]));
  for (auto& [s, d] : c)
    if (!a.count(s)) o.fail(prediction::spot_text(2, s) + ": CESS " + std::to_string(d) + ", aNSS 0");
  if (o.ok) o.detail = std::to_string(a.size()) + " nonzero tridegrees";
  return o;
}

Outcome bockstein_round_trip() {
  Outcome o;
  struct Window {
    int t_max, w_min, w_max;
  };
  int checked_total = 0, diffs_total = 0;
  // stems <= 10, and the weights around the first differential at t = 16
  for (auto win : {Window{12, 0, 14}, Window{16, 15, 17}}) {
    auto an = classical_anss(win.t_max, win.w_max);
    auto sy = synthetic_anss(win.t_max, win.w_min, win.w_max);
    if (!sy.violations.empty()) o.fail("synthetic run: " + sy.violations.front());
    int checked = 0;
    for (auto& m : prediction::mismatches(an, sy, win.t_max, win.w_min, win.w_max, &checked)) o.fail(m);
    checked_total += checked;
    // the synthetic E_2 is Ext over the λ-graded Hopf algebroid
    CobarBounds gb;
    gb.t_max = win.t_max;
    gb.w_min = win.w_min;
    gb.w_max = win.w_max;
    gb.u_max = win.w_max;
    auto ge = ext_groups(build_cobar(HopfAlgebroid::builtin("graded_novikov_lambda", 2, 4), gb), 0);
    std::map<Spot, int> e2, page2;
    for (auto& e : ge.entries)
      if (e.dim) e2[{e.f, *e.u, e.t, *e.w}] = e.dim;
    for (auto& [s, d] : sy.page(2).dims)
      if (d) page2[s] = d;
    if (e2 != page2) o.fail("E_2 differs from Ext over graded_novikov_lambda");
    // torsion exponents r - 1
    auto cd = classical_from_ss(an, 4);
    auto m = reconstruct(cd.classes, cd.diffs);
    for (auto& d : m.diffs) {
      ++diffs_total;
      if (d.lambda_exponent != d.page - 1) o.fail("d_" + std::to_string(d.page) + "(" + d.source + "): lambda exponent");
      bool found = false;
      for (auto& g : m.gens)
        if (g.killed_by == d.source) found = g.torsion_exponent == d.page - 1;
      if (!found) o.fail("torsion exponent of the target of d(" + d.source + ")");
    }
    for (auto& v : check_les(m)) o.fail(v);
  }
  if (diffs_total == 0) o.fail("no classical differentials in range");
  if (o.ok)
    o.detail = std::to_string(checked_total) + " predicted spots, " + std::to_string(diffs_total) +
               " classical differential(s) with e = r - 1";
  return o;
}

Outcome q_map_fixture() {
  Outcome o;
  auto an = classical_anss(16, 17);
  auto cd = classical_from_ss(an, 4);
  auto m = reconstruct(cd.classes, cd.diffs);
  // α_{8/8} = [b1^8] at (f,u,t) = (1,0,16); hβ_{4/4} is the a_0-multiple of [b1^4|b1^4] at (2,1,16)
  CobarBounds gb;
  gb.t_max = 16;
  gb.u_max = 2;
  auto ge = ext_groups(build_cobar(HopfAlgebroid::builtin("graded_novikov", 2, 4), gb), 4000);
  auto reps = [&](int f, int u) {
    for (auto& e : ge.entries)
      if (e.f == f && e.t == 16 && e.u == u) return e.representatives;
    return std::vector<std::string>{};
  };
  if (reps(1, 0) != std::vector<std::string>{"[b1^8]"}) o.fail("(1,0,16) is not spanned by [b1^8]");
  if (reps(2, 1) != std::vector<std::string>{"a0[b1^4|b1^4]"}) o.fail("(2,1,16) is not spanned by a0[b1^4|b1^4]");
  const std::string alpha88 = "x(1,0,16)#0", hbeta44 = "x(2,1,16)#0";
  auto q = q_map(m, alpha88);
  if (q.zero || q.lambda_exponent != 0 || q.target.str() != hbeta44)
    o.fail("q(alpha_{8/8}) = " + (q.zero ? std::string("0") : q.str()));
  if (!(q.deg == QuadDegree{2, 1, 16, 17})) o.fail("q(alpha_{8/8}) in the wrong degree");
  auto les = check_les(m);
  for (auto& v : les) o.fail(v);
  if (o.ok) o.detail = "q(alpha_{8/8}) = hbeta_{4/4} at (2,1,16,17); LES rank identity holds";
  return o;
}

Outcome deduction_replay() {
  Outcome o;
  auto fl = golden::run();
  for (auto& row : golden::missing_rows(fl.S)) o.fail("missing " + row);
  for (auto& x : golden::missing_extensions(fl.S)) o.fail("missing extension " + x);
  if (!fl.S.collapses_by(9)) o.fail("no E_9 collapse");
  for (auto& p : fl.S.check_consistency(&fl.Q).problems) o.fail(p);
  if (!fl.q_prop.tasks.empty() || !fl.s_prop.tasks.empty()) o.fail("open tasks");
  for (const Session* s : {&fl.S, &fl.Q}) {
    std::istringstream in(s->log_text());
    auto again = Session::replay(in);
    if (again.export_chart().dump() != s->export_chart().dump()) o.fail("replay export differs for " + s->id());
  }
  auto fl2 = golden::run();
  if (fl2.S.log_text() != fl.S.log_text()) o.fail("second run differs");
  if (o.ok)
    o.detail = std::to_string(golden::leibniz_table().size()) + " table rows, " +
               std::to_string(golden::expected_extensions().size()) + " hidden extensions, last differential d_" +
               std::to_string(fl.S.last_page()) + ", collapsed by E_9";
  return o;
}

Outcome property_suites() {
  Outcome o;
  std::mt19937_64 rng(9);
  // normalization idempotence
  for (auto name : {"bp_synthetic", "steenrod_dual", "graded_novikov_lambda"}) {
    auto h = HopfAlgebroid::builtin(name, 2, 3);
    auto ring = h->ring();
    int ngen = static_cast<int>(ring->pres->gens().size());
    for (int k = 0; k < 200; ++k) {
      std::vector<Polynomial::Term> ts;
      for (int i = 0; i < 4; ++i) {
        std::vector<Monomial::Entry> e;
        for (int g = 0; g < ngen; ++g)
          if (rng() % 3 == 0) e.push_back({static_cast<uint16_t>(g), static_cast<int32_t>(1 + rng() % 3)});
        ts.push_back({Monomial(e), Coefficient(static_cast<long>(rng() % 5) - 2)});
      }
      auto p = Polynomial::from_terms(ring, ts);
      if (Polynomial::from_terms(ring, p.terms()) != p) o.fail(std::string("normalization not idempotent in ") + name);
    }
  }
  // d o d = 0 and filtration monotonicity
  CobarBounds b;
  b.t_max = 10;
  b.w_min = 0;
  b.w_max = 12;
  b.u_max = 12;
  for (auto [name, f] : {std::pair{"bp_classical", "I"}, {"bp_synthetic", "J"}, {"steenrod_dual", "CE"}}) {
    auto cx = build_cobar(HopfAlgebroid::builtin(name, 2, 4), b);
    for (auto& v : check_d_squared(cx)) o.fail(std::string(name) + ": " + v);
    auto fcx = std::string(f) == "CE" ? filter_cartan_eilenberg(std::move(cx)) : filter_novikov(std::move(cx), f);
    for (auto& v : check_filtration_monotone(fcx)) o.fail(std::string(name) + ": " + v);
    if (std::string(f) == "CE")
      for (auto& v : check_euler_characteristic(ss_run(fcx, 6))) o.fail(v);
  }
  // event-log determinism on the small deduction sessions
  for (int trial = 0; trial < 5; ++trial) {
    Session s("P" + std::to_string(trial), ChartKind::ANSS_S);
    s.add_class("a", {1, 1, 2});
    s.assert_permanent("a");
    for (int i = 0; i < 5; ++i) {
      auto n = std::to_string(i);
      s.add_class("x" + n, {10 + i, 2, 12 + 2 * i});
      s.add_class("y" + n, {11 + i, 3, 14 + 2 * i});
      s.add_class("z" + n, {10 + i, 6, 14 + 2 * i});
      s.add_class("c" + n, {9 + i, 5, 12 + 2 * i});
      s.add_relation("a", "x" + n, Element::parse("y" + n));
      s.add_relation("a", "c" + n, Element::parse("z" + n));
      if (rng() % 2) s.assert_differential(3, "y" + n, Element::parse("z" + n));
    }
    s.propagate_leibniz();
    std::istringstream in(s.log_text());
    if (Session::replay(in).log_text() != s.log_text()) o.fail("replay of " + s.id() + " differs");
  }
  // packed F_2 rank vs naive elimination
  for (int k = 0; k < 2000; ++k) {
    size_t r = 1 + rng() % 96, c = 1 + rng() % 96;
    MatrixFp m(2, r, c);
    std::vector<std::vector<uint32_t>> rows(r, std::vector<uint32_t>(c));
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j)
        if (rng() % 3 == 0) m.set(i, j, rows[i][j] = 1);
    if (rank(m) != naive_rank(2, rows)) o.fail("rank mismatch");
  }
  if (o.ok) o.detail = "normalization, d o d = 0, filtrations, Euler characteristic, log replay, F_2 rank";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int n;
    const char* name;
    double limit;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {1, "right unit golden values", kLimit1, right_unit_golden},
      {2, "lambda inversion vs Hazewinkel", kLimit2, lambda_inversion},
      {3, "homogeneity of structure maps", 0, homogeneity},
      {4, "Ext_{A_*} vs minimal resolution", kLimit4, ext_sanity},
      {5, "CESS E_2 = aNSS E_2", kLimit5, miller_equivalence},
      {6, "Bockstein round trip", 0, bockstein_round_trip},
      {7, "q(alpha_{8/8}) = hbeta_{4/4}", 0, q_map_fixture},
      {8, "deduction replay through stem 45", 0, deduction_replay},
      {9, "property suites", 0, property_suites},
  };
  int failed = 0;
  for (auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && sec >= c.limit) o.fail("took " + std::to_string(sec) + " s");
    char timing[64];
    if (c.limit > 0)
      std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", sec, c.limit);
    else
      std::snprintf(timing, sizeof timing, "%.2f s", sec);
    std::cout << (o.ok ? "PASS" : "FAIL") << " " << c.n << " " << c.name << " (" << timing << "): " << o.detail
              << std::endl;
    failed += !o.ok;
  }
  return failed ? 1 : 0;
}
