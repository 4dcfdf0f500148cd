#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "synss/chartio.hpp"

using namespace synss;

namespace {

std::string fixture(const std::string& name) { return std::string(SYNSS_FIXTURES) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

// Value of attribute `attr` on the first element whose text contains `marker`.
int attr(const std::string& svg, const std::string& marker, const std::string& a) {
  auto p = svg.find(marker);
  REQUIRE(p != std::string::npos);
  auto line = svg.substr(p, svg.find('\n', p) - p);
  std::smatch m;
  REQUIRE(std::regex_search(line, m, std::regex(" " + a + "=\"(-?[0-9]+)\"")));
  return std::stoi(m[1]);
}

ChartDocument two_classes() {
  ChartDocument d;
  d.stem_max = 1;
  d.f_max = 3;
  d.classes = {{"a", "a", 1, 0, 1}, {"b", "b", 0, 3, 1, 2}};
  d.differentials = {{"F1", 3, "a", "b", 1, 1}};
  return d;
}

}  // namespace

TEST_CASE("one free class at the origin is a single dot") {
  ChartDocument d;
  d.classes = {{"x", "x", 0, 0, 0}};
  auto svg = svg_render(d);
  CHECK(count(svg, "<circle") == 1);
  CHECK(attr(svg, "<circle", "cx") == 60);
  CHECK(attr(svg, "<circle", "cy") == 60);
  CHECK(svg.find("fill=\"" + torsion_color(0) + "\"") != std::string::npos);
  CHECK(count(svg, "marker-end") == 0);
}

TEST_CASE("a d_3 arrow has slope (-1, 3)") {
  auto svg = svg_render(two_classes());
  int x1 = attr(svg, "data-page=\"3\"", "x1"), y1 = attr(svg, "data-page=\"3\"", "y1");
  int x2 = attr(svg, "data-page=\"3\"", "x2"), y2 = attr(svg, "data-page=\"3\"", "y2");
  CHECK(x2 - x1 == -40);
  CHECK(y1 - y2 == 3 * 40);
  // torsion shows as glyph color
  CHECK(torsion_color(2) != torsion_color(0));
  CHECK(svg.find("fill=\"" + torsion_color(2) + "\"") != std::string::npos);
}

TEST_CASE("classes sharing a spot are spread apart") {
  ChartDocument d;
  d.classes = {{"x", "x", 2, 1, 3}, {"y", "y", 2, 1, 3}};
  auto svg = svg_render(d);
  int a = attr(svg, "data-class=\"x\"", "cx"), b = attr(svg, "data-class=\"y\"", "cx");
  CHECK(a != b);
  CHECK(a + b == 2 * (40 + 2 * 40 + 20));
}

TEST_CASE("empty session renders axes only") {
  Session s("empty", ChartKind::ANSS_S);
  auto doc = ChartDocument::from_session(s);
  CHECK(doc.classes.empty());
  CHECK(doc.validate().empty());
  auto svg = svg_render(doc);
  CHECK(count(svg, "<circle") == 0);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}

TEST_CASE("golden rendering of the stems <= 20 chart") {
  auto s = Session::replay_file(fixture("anss_smodlambda_s20.jsonl"));
  s.assert_differential(3, "alpha_{6/3}", Element::parse("alpha_1^2c_0"));
  auto doc = ChartDocument::from_session(s);
  CHECK(doc.validate().empty());
  CHECK(doc.classes.size() == 16);
  CHECK(doc.differentials.size() == 1);
  auto svg = svg_render(doc);
  CHECK(svg == svg_render(ChartDocument::from_session(s)));
  const std::string path = std::string(SYNSS_GOLDEN) + "/smodlambda_s20.svg";
  if (std::getenv("SYNSS_UPDATE_GOLDEN")) std::ofstream(path) << svg;
  auto golden = slurp(path);
  REQUIRE(!golden.empty());
  CHECK(svg == golden);
}

TEST_CASE("chart document JSON round trip and validation") {
  auto d = two_classes();
  auto j = d.to_json();
  CHECK(j["schema"] == "synss.chart_document/1");
  auto back = ChartDocument::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.validate().empty());
  d.differentials[0].target = "nowhere";
  CHECK(d.validate().size() == 1);
  auto bad = j;
  bad["schema"] = "something/9";
  CHECK_THROWS(ChartDocument::from_json(bad));
}

TEST_CASE("chart document from a spectral sequence run") {
  CobarBounds b;
  b.t_max = 8;
  b.w_max = 8;
  auto res = ss_run(filter_novikov(build_cobar(HopfAlgebroid::builtin("bp_classical", 2, 3), b), "I"), 4);
  auto doc = ChartDocument::from_ss(res, 2);
  CHECK(doc.validate().empty());
  CHECK(doc.kind == "aNSS");
  int total = 0;
  for (auto& c : doc.classes) total += c.count;
  int want = 0;
  for (auto& [s, d] : res.page(2).dims) want += d;
  CHECK(total == want);
  for (auto& a : doc.differentials) CHECK(a.r >= 2);
}
