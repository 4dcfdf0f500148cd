#include <sstream>

#include "doctest.h"
#include "golden_flow.hpp"
#include "synss/deduce.hpp"

using namespace synss;

namespace {

// Frozen outcome of the stems <= 45 run.
const std::vector<std::string> kDifferentials{
    "d_3(alpha_{6/3}) = alpha_1^2c_0 [q-map]",
    "d_5(Deltah_2d_0) = alpha_{2/2}^2e_0^2 [q-map]",
    "d_3(alpha_{4/4}overline{alpha_1beta_5}) = alpha_1^2d_1 [q-map]",
    "d_3(P^2e_0) = Palpha_1^2c_0beta_3 [q-map]",
    "d_3(c_0beta_3e_0) = alpha_1^4e_0^2 [q-map]",
    "d_3(Pbeta_3e_0) = alpha_1^2c_0beta_3^2 [q-map]",
    "d_3(P^2c_0e_0) = Palpha_1^4beta_3^2 [q-map]",
    "d_3(P^3e_0) = P^2alpha_1^2c_0beta_3 [q-map]",
    "d_3(beta_3^2e_0) = alpha_1^2c_0e_0^2 [q-map]",
    "d_3(Pe_0) = alpha_1^2c_0d_0 [leibniz]",
    "d_3(Pc_0e_0) = alpha_1^4beta_3^2 [leibniz]",
    "d_3(beta_{8/6,2}) = lambda^2 alpha_1d_1 [leibniz]",
    "d_3(alpha_{4/4}^2overline{alpha_1beta_5}) = alpha_1^2alpha_{4/4}d_1 [leibniz]",
    "d_3(h_0c_2) = alpha_1alpha_{4/4}d_1 [leibniz]",
    "d_5(beta_7) = lambda alpha_{2/2}e_0^2 [leibniz]",
    "d_5(beta_{6/2}beta_3) = lambda alpha_1c_0e_0^2 [leibniz]",
    "d_5(beta_{6/2}) = alpha_1beta_2beta_4 [leibniz]",
};

const std::vector<std::string> kExtensions{
    "lambda Pc_0beta_3 -> alpha_1^2beta_3^2 Einf [asserted]",
    "alpha_1 beta_{8/4,2} -> lambda^2 c_1g Einf [asserted]",
    "alpha_{2/2} beta_6 -> lambda^2 alpha_1e_0^2 Einf [asserted]",
    "alpha_{2/2} Deltah_1d_0 -> c_0e_0^2 Einf [asserted]",
    "alpha_{2/2} beta_4 -> h_2g Einf [q-map]",
    "2/h hbeta_{4/4} -> lambda hbeta_3 E2 [q-map]",
    "2/h h^3beta_{8/8} -> lambda hbeta_{6/2} E2 [q-map]",
    "2/h h^3beta_{6/2} -> lambda^2 P^2beta_3 E2 [q-map]",
};

Session small_s() {
  Session s("t", ChartKind::ANSS_S);
  s.add_class("a", {1, 1, 2});
  s.assert_permanent("a");
  s.add_class("x", {10, 2, 12});
  s.add_class("y", {11, 3, 14});
  s.add_class("z", {10, 6, 14});
  return s;
}

}  // namespace

TEST_CASE("elements parse and print") {
  auto e = Element::parse("lambda^2 x + y");
  REQUIRE(e.terms.size() == 2);
  CHECK(e.str() == "lambda^2 x + y");
  CHECK(Element::parse("lambda x").terms[0].k == 1);
  CHECK(Element::parse("2 x").terms[0].coef == 2);
  CHECK(Element::parse("0").zero());
  CHECK(e.min_lambda() == 0);
}

TEST_CASE("stems <= 45: the frozen derived set") {
  auto fl = golden::run();
  CHECK(fl.q_prop.tasks.empty());
  CHECK(fl.q_prop.conflicts.empty());
  CHECK(fl.q_prop.derived.size() == 6);
  CHECK(fl.transfer.tasks.empty());
  CHECK(fl.transfer.skipped.size() == 7);
  CHECK(fl.qmod.violations.empty());
  CHECK(fl.qmod.forced.size() == 3);
  CHECK(fl.s_prop.tasks.empty());
  CHECK(fl.s_prop.conflicts.empty());
  CHECK(fl.s_prop.derived.size() == 8);
  CHECK(golden::differential_lines(fl.S) == kDifferentials);
  CHECK(golden::extension_lines(fl.S) == kExtensions);
  CHECK(golden::missing_rows(fl.S).empty());
  CHECK(golden::missing_extensions(fl.S).empty());
  CHECK(fl.S.collapses_by(9));
  CHECK(!fl.S.collapses_by(5));
  CHECK(fl.S.last_page() == 5);
  auto cc = fl.S.check_consistency(&fl.Q);
  for (auto& p : cc.problems) MESSAGE(p);
  CHECK(cc.ok());
  CHECK(fl.Q.check_consistency().ok());
  // every derived fact traces back to imported or asserted data
  for (auto& d : fl.S.differentials()) {
    auto chain = fl.S.provenance_chain(d.id);
    CHECK(!chain.empty());
  }
}

TEST_CASE("comparison with Ext_{A_*} records the hidden 2-extension") {
  auto fl = golden::run();
  std::vector<std::string> status;
  for (auto& it : fl.comparison.items) status.push_back(it.product + " : " + it.status);
  CHECK(status == std::vector<std::string>{
                      "h_0 · h_2 = h_0h_2 : witnessed",
                      "h_1 · h_1^2 = h_1^3 : witnessed",
                      "h_0 · h_0h_2 = h_1^3 : recorded",
                      "h_0 · h_4 = h_0h_4 : witnessed",
                      "h_2 · g = h_2g : recorded",
                  });
  bool found = false;
  for (auto& x : fl.Q.extensions())
    found |= x.kind == ExtKind::TwoH && x.source == "halpha_{2/2}" && x.target.str() == "alpha_1^3";
  CHECK(found);
}

TEST_CASE("replay is byte-identical") {
  auto fl = golden::run();
  for (const Session* s : {&fl.S, &fl.Q}) {
    std::istringstream in(s->log_text());
    auto again = Session::replay(in);
    CHECK(again.export_chart().dump() == s->export_chart().dump());
    CHECK(again.log_text() == s->log_text());
  }
  auto fl2 = golden::run();
  CHECK(fl2.S.export_chart().dump() == fl.S.export_chart().dump());
}

TEST_CASE("a tampered log is rejected on replay") {
  auto fl = golden::run();
  std::string text = fl.S.log_text();
  auto pos = text.find("alpha_1^2c_0d_0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("alpha_1^2c_0d_0").size(), "alpha_1^2d_0c_0");
  std::istringstream in(text);
  CHECK_THROWS_AS(Session::replay(in), DeductionError);
}

TEST_CASE("d_3(alpha_{6/3}) on the stems <= 20 chart") {
  auto s = Session::replay_file(golden::fixture("anss_smodlambda_s20.jsonl"));
  auto id = s.assert_differential(3, "alpha_{6/3}", Element::parse("alpha_1^2c_0"));
  CHECK(!id.empty());
  CHECK(s.status("alpha_{6/3}") == "source");
  CHECK(s.status("alpha_1^2c_0") == "target");
  // the alias resolves to the same class
  CHECK(s.resolve("overline{h_1^2c_0}") == "alpha_{6/3}");
  // repeating a known fact is a no-op
  CHECK(s.assert_differential(3, "alpha_{6/3}", Element::parse("alpha_1^2c_0")).empty());
}

TEST_CASE("rejected assertions") {
  auto s = Session::replay_file(golden::fixture("anss_smodlambda_s20.jsonl"));
  // wrong stem shift
  try {
    s.assert_differential(2, "alpha_{6/3}", Element::parse("alpha_1^2c_0"));
    FAIL("accepted a differential with the wrong shift");
  } catch (const DeductionError& e) {
    CHECK(e.code == "degree_mismatch");
  }
  CHECK_THROWS_AS(s.assert_differential(3, "no_such_class", Element::parse("alpha_1")), DeductionError);
  CHECK_THROWS_AS(s.assert_differential(3, "alpha_{6/3}", Element::parse("0")), DeductionError);
}

TEST_CASE("conflicting and dead-source differentials") {
  auto s = small_s();
  s.add_class("u", {9, 11, 14});
  s.add_class("v", {10, 8, 14});
  s.assert_differential(3, "y", Element::parse("z"));
  try {
    s.assert_differential(5, "y", Element::parse("v"));
    FAIL("accepted a second differential on y");
  } catch (const DeductionError& e) {
    CHECK(e.code == "conflict");
  }
  try {
    s.assert_differential(5, "z", Element::parse("u"));
    FAIL("accepted a differential on a dead class");
  } catch (const DeductionError& e) {
    CHECK(e.code == "dead_source");
  }
  try {
    s.assert_permanent("y");
    FAIL("accepted permanence of a source");
  } catch (const DeductionError& e) {
    CHECK(e.code == "conflict");
  }
}

TEST_CASE("Leibniz from d_5(Deltah_2d_0)") {
  auto s = Session::replay_file(golden::fixture("anss_s45.jsonl"));
  s.assert_differential(5, "Deltah_2d_0", Element::parse("alpha_{2/2}^2e_0^2"));
  s.propagate_leibniz();
  auto* d = s.differential_from("beta_7");
  REQUIRE(d);
  CHECK(d->r == 5);
  CHECK(d->target.str() == "lambda alpha_{2/2}e_0^2");
  CHECK(d->provenance == Provenance::Leibniz);
}

TEST_CASE("unit relation adds nothing") {
  auto s = small_s();
  s.assert_differential(3, "y", Element::parse("z"));
  s.add_relation("1", "y", Element::parse("y"));
  auto rep = s.propagate_leibniz();
  CHECK(rep.derived.empty());
  CHECK(rep.conflicts.empty());
  CHECK(s.product("1", Element::parse("z")) == std::optional<Element>(Element::parse("z")));
}

TEST_CASE("non-unique division becomes a task") {
  auto s = small_s();
  s.add_class("c1", {9, 5, 12});
  s.add_class("c2", {9, 5, 12});
  s.add_relation("a", "x", Element::parse("y"));
  s.add_relation("a", "c1", Element::parse("z"));
  s.add_relation("a", "c2", Element::parse("z"));
  s.assert_differential(3, "y", Element::parse("z"));
  auto rep = s.propagate_leibniz();
  CHECK(rep.derived.empty());
  REQUIRE(rep.tasks.size() == 1);
  CHECK(rep.tasks[0].kind == "non-unique division");
  CHECK(s.differential_from("x") == nullptr);
}

TEST_CASE("unique division is derived") {
  auto s = small_s();
  s.add_class("c1", {9, 5, 12});
  s.add_relation("a", "x", Element::parse("y"));
  s.add_relation("a", "c1", Element::parse("z"));
  s.assert_differential(3, "y", Element::parse("z"));
  auto rep = s.propagate_leibniz();
  REQUIRE(rep.derived.size() == 1);
  CHECK(s.differential_from("x")->target.str() == "c1");
}

TEST_CASE("empty session is consistent") {
  Session s("e", ChartKind::ANSS_S);
  CHECK(s.check_consistency().ok());
  CHECK(s.collapses_by(2));
}

TEST_CASE("unexplained lambda-torsion class is a named gap") {
  auto text = golden::log_without(golden::fixture("anss_s45.jsonl"), "\"source\": \"Pc_0beta_3\"");
  std::istringstream in(text);
  auto fl = golden::run(Session::replay(in), Session::replay_file(golden::fixture("anss_smodlambda45.jsonl")));
  auto cc = fl.S.check_consistency(&fl.Q);
  REQUIRE(cc.problems.size() == 1);
  CHECK(cc.problems[0].find("gap: λ-torsion class Pc_0beta_3") == 0);
}

TEST_CASE("q-module check") {
  auto fl = golden::run();
  bool forced = false;
  for (auto& x : fl.qmod.forced)
    forced |= x.source == "hbeta_{4/4}" && x.target.str() == "lambda hbeta_3" && x.level == "E2";
  CHECK(forced);
  // a perturbed q-value breaks linearity and is reported
  auto text = golden::log_without(golden::fixture("anss_smodlambda45.jsonl"), "\"source\": \"overline{lambdahbeta_3}\"");
  text += R"({"cite": "perturbed", "op": "q_value", "provenance": "imported", "source": "overline{lambdahbeta_3}", "value": "lambda hbeta_3 + h^3beta_{8/8}"})"
          "\n";
  std::istringstream in(text);
  Session q = Session::replay(in);
  auto s = Session::replay_file(golden::fixture("anss_s45.jsonl"));
  auto rep = q_module_check(s, q);
  CHECK(!rep.violations.empty());
  // vacuous on a session without q-values
  Session empty("e", ChartKind::ANSS_SModLambda);
  auto none = q_module_check(s, empty);
  CHECK(none.checked == 0);
  CHECK(none.violations.empty());
}

TEST_CASE("classical data round trip through an aNSS chart") {
  ClassicalData d;
  d.classes = {{"x(1,0,16)#0", 1, 0, 16, "[b1^8]"}, {"x(2,1,16)#0", 2, 1, 16, std::nullopt}};
  d.diffs = {{2, "x(1,0,16)#0", Combination::of("x(2,1,16)#0"), true}};
  Session s("a", ChartKind::aNSS);
  import_classical(s, d);
  auto back = export_classical(s);
  std::stringstream a, b;
  write_classical_jsonl(a, d);
  write_classical_jsonl(b, back);
  CHECK(a.str() == b.str());
}

TEST_CASE("chart export") {
  auto s = Session::replay_file(golden::fixture("anss_smodlambda_s20.jsonl"));
  auto j = s.export_chart();
  CHECK(j["schema"] == "synss.chart/1");
  CHECK(j["metadata"]["kind"] == to_string(ChartKind::ANSS_SModLambda));
  CHECK(j["classes"].size() == 17);  // 16 classes and the unit
}
