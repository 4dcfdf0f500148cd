#include "synss/chartio.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace synss {

using nlohmann::json;

std::string torsion_color(int e) {
  static const char* palette[] = {"#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  if (e < 0) e = 0;
  return palette[std::min(e, 5)];
}

std::vector<std::string> ChartDocument::validate() const {
  std::vector<std::string> bad;
  std::set<std::string> ids;
  for (auto& c : classes)
    if (!ids.insert(c.id).second) bad.push_back("duplicate class id " + c.id);
  auto need = [&](const std::string& what, const std::string& id) {
    if (!ids.count(id)) bad.push_back(what + " references unknown class " + id);
  };
  for (auto& l : lines) need("line " + l.id, l.source), need("line " + l.id, l.target);
  for (auto& d : differentials) need("differential " + d.id, d.source), need("differential " + d.id, d.target);
  for (auto& e : extensions) need("extension " + e.id, e.source), need("extension " + e.id, e.target);
  if (kind != "ANSS-S" && kind != "ANSS-S/lambda" && kind != "aNSS" && kind != "CESS")
    bad.push_back("unknown chart kind " + kind);
  return bad;
}

json ChartDocument::to_json() const {
  json j;
  j["schema"] = "synss.chart_document/1";
  j["metadata"] = {{"prime", prime}, {"kind", kind}, {"title", title},
                   {"range", {{"stem_min", stem_min}, {"stem_max", stem_max}, {"f_max", f_max}}}};
  auto& cs = j["classes"] = json::array();
  for (auto& c : classes)
    cs.push_back({{"id", c.id}, {"name", c.name}, {"stem", c.stem}, {"f", c.f}, {"w", c.w}, {"torsion", c.torsion},
                  {"count", c.count}, {"status", c.status}});
  auto& ls = j["lines"] = json::array();
  for (auto& l : lines) ls.push_back({{"id", l.id}, {"source", l.source}, {"target", l.target}, {"kind", l.kind}});
  auto& ds = j["differentials"] = json::array();
  for (auto& d : differentials)
    ds.push_back({{"id", d.id}, {"r", d.r}, {"source", d.source}, {"target", d.target}, {"lambda", d.lambda},
                  {"rank", d.rank}});
  auto& es = j["extensions"] = json::array();
  for (auto& e : extensions)
    es.push_back({{"id", e.id}, {"kind", e.kind}, {"source", e.source}, {"target", e.target}});
  return j;
}

ChartDocument ChartDocument::from_json(const json& j) {
  if (j.value("schema", "") != "synss.chart_document/1")
    throw ParseError("chart document: expected schema synss.chart_document/1");
  ChartDocument d;
  auto& m = j.at("metadata");
  d.prime = m.at("prime");
  d.kind = m.at("kind");
  d.title = m.value("title", "");
  d.stem_min = m.at("range").at("stem_min");
  d.stem_max = m.at("range").at("stem_max");
  d.f_max = m.at("range").at("f_max");
  for (auto& c : j.at("classes"))
    d.classes.push_back({c.at("id"), c.at("name"), c.at("stem"), c.at("f"), c.at("w"), c.value("torsion", 0),
                         c.value("count", 1), c.value("status", "alive")});
  for (auto& l : j.at("lines")) d.lines.push_back({l.at("id"), l.at("source"), l.at("target"), l.at("kind")});
  for (auto& x : j.at("differentials"))
    d.differentials.push_back({x.at("id"), x.at("r"), x.at("source"), x.at("target"), x.value("lambda", 0),
                               x.value("rank", 1)});
  for (auto& e : j.at("extensions")) d.extensions.push_back({e.at("id"), e.at("kind"), e.at("source"), e.at("target")});
  if (auto bad = d.validate(); !bad.empty()) throw ParseError("chart document: " + bad.front());
  return d;
}

ChartDocument ChartDocument::from_session(const Session& s) {
  json e = s.export_chart();
  ChartDocument d;
  d.prime = s.prime();
  d.kind = to_string(s.kind());
  d.title = s.id();
  d.stem_min = e["metadata"]["range"]["stem_min"];
  d.stem_max = e["metadata"]["range"]["stem_max"];
  d.f_max = e["metadata"]["range"]["f_max"];
  for (auto& c : e["classes"]) {
    if (c["id"] == "1") continue;
    d.classes.push_back({c["id"], c["name"], c["stem"], c["f"], c["w"], c["torsion"], 1, c["status"]});
  }
  std::set<std::string> ids;
  for (auto& c : d.classes) ids.insert(c.id);
  for (auto& l : e["lines"])
    if (ids.count(l["source"]) && ids.count(l["target"]))
      d.lines.push_back({l["fact"], l["source"], l["target"], l["multiplier"]});
  // arrows and extension lines point at the leading (λ-free-most) term of the target
  auto lead = [](const json& terms) { return terms.back()["name"].get<std::string>(); };
  for (auto& x : e["differentials"])
    if (!x["terms"].empty())
      d.differentials.push_back({x["id"], x["r"], x["source"], lead(x["terms"]), x["lambda_exponent"], 1});
  for (auto& x : e["extensions"])
    if (!x["terms"].empty()) d.extensions.push_back({x["id"], x["kind"], x["source"], lead(x["terms"])});
  return d;
}

namespace {

std::string spot_id(const Spot& s) {
  auto [f, u, t, w] = s;
  return "(" + std::to_string(f) + "," + std::to_string(u) + "," + std::to_string(t) + "," + std::to_string(w) + ")";
}

// Chart position of an SS spot: aNSS-type runs plot (t - f, f); Cartan-Eilenberg
// runs plot the abutment grading (w - f - u, f + u).
std::pair<int, int> spot_position(const std::string& kind, const Spot& s) {
  auto [f, u, t, w] = s;
  if (kind == "CESS") return {w - f - u, f + u};
  return {t - f, f};
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

ChartDocument ChartDocument::from_ss(const SSResult& res, int r) {
  ChartDocument d;
  d.prime = res.p;
  d.kind = res.kind == "CESS" ? "CESS" : "aNSS";
  d.title = res.kind + " E_" + std::to_string(r);
  auto& page = res.page(r);
  for (auto& [s, n] : page.dims) {
    if (n == 0) continue;
    auto [stem, y] = spot_position(d.kind, s);
    d.classes.push_back({spot_id(s), spot_id(s), stem, y, std::get<3>(s), 0, n, "alive"});
  }
  std::sort(d.classes.begin(), d.classes.end(), [](auto& a, auto& b) {
    return std::tie(a.stem, a.f, a.w, a.id) < std::tie(b.stem, b.f, b.w, b.id);
  });
  int k = 0;
  for (auto& pg : res.pages) {
    if (pg.r < r) continue;
    for (auto& x : pg.diffs) {
      if (x.rank == 0 || !page.dims.count(x.source) || !page.dims.count(x.target)) continue;
      d.differentials.push_back(
          {"d" + std::to_string(pg.r) + "#" + std::to_string(k++), pg.r, spot_id(x.source), spot_id(x.target), 0, x.rank});
    }
  }
  for (auto& c : d.classes) {
    d.stem_min = std::min(d.stem_min, c.stem);
    d.stem_max = std::max(d.stem_max, c.stem);
    d.f_max = std::max(d.f_max, c.f);
  }
  return d;
}

std::string svg_render(const ChartDocument& doc) {
  constexpr int cell = 40, margin = 40, dot = 4, spread = 9;
  const int smin = std::min(doc.stem_min, 0), smax = std::max(doc.stem_max, smin);
  const int fmax = std::max(doc.f_max, 0);
  const int width = 2 * margin + (smax - smin + 1) * cell;
  const int height = 2 * margin + (fmax + 1) * cell;
  auto px = [&](int stem) { return margin + (stem - smin) * cell + cell / 2; };
  auto py = [&](int f) { return height - margin - f * cell - cell / 2; };

  // glyph positions: classes sharing a (stem, f) spot spread horizontally in document order
  std::map<std::pair<int, int>, std::vector<const ChartDocument::Class*>> spots;
  for (auto& c : doc.classes) spots[{c.stem, c.f}].push_back(&c);
  std::map<std::string, std::pair<int, int>> pos;
  for (auto& [key, cs] : spots) {
    int n = static_cast<int>(cs.size());
    for (int i = 0; i < n; ++i) {
      int dx = (2 * i - (n - 1)) * spread / 2;
      if (n > 4) dx = (2 * i - (n - 1)) * (cell - 8) / (2 * (n - 1));
      pos[cs[i]->id] = {px(key.first) + dx, py(key.second)};
    }
  }

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
    << width << " " << height << "\" font-family=\"monospace\" font-size=\"10\">\n";
  o << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
       "orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#555555\"/></marker></defs>\n";
  o << "<title>" << xml_escape(doc.title.empty() ? doc.kind : doc.title) << "</title>\n";
  o << "<g class=\"grid\" stroke=\"#e0e0e0\" stroke-width=\"1\">\n";
  for (int s = smin; s <= smax + 1; ++s) {
    int x = margin + (s - smin) * cell;
    o << "<line x1=\"" << x << "\" y1=\"" << margin << "\" x2=\"" << x << "\" y2=\"" << height - margin << "\"/>\n";
  }
  for (int f = 0; f <= fmax + 1; ++f) {
    int y = height - margin - f * cell;
    o << "<line x1=\"" << margin << "\" y1=\"" << y << "\" x2=\"" << width - margin << "\" y2=\"" << y << "\"/>\n";
  }
  o << "</g>\n<g class=\"axes\" fill=\"#333333\">\n";
  for (int s = smin; s <= smax; ++s)
    o << "<text x=\"" << px(s) << "\" y=\"" << height - margin + 14 << "\" text-anchor=\"middle\">" << s << "</text>\n";
  for (int f = 0; f <= fmax; ++f)
    o << "<text x=\"" << margin - 6 << "\" y=\"" << py(f) + 4 << "\" text-anchor=\"end\">" << f << "</text>\n";
  o << "</g>\n";

  o << "<g class=\"lines\" stroke=\"#888888\" stroke-width=\"1\">\n";
  for (auto& l : doc.lines) {
    auto a = pos.at(l.source), b = pos.at(l.target);
    if (a == b) continue;
    o << "<line data-fact=\"" << xml_escape(l.id) << "\" data-kind=\"" << xml_escape(l.kind) << "\" x1=\"" << a.first << "\" y1=\"" << a.second
      << "\" x2=\"" << b.first << "\" y2=\"" << b.second << "\"/>\n";
  }
  o << "</g>\n<g class=\"extensions\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"3 2\">\n";
  for (auto& e : doc.extensions) {
    auto a = pos.at(e.source), b = pos.at(e.target);
    o << "<line data-fact=\"" << xml_escape(e.id) << "\" data-kind=\"" << xml_escape(e.kind) << "\" x1=\"" << a.first << "\" y1=\"" << a.second
      << "\" x2=\"" << b.first << "\" y2=\"" << b.second << "\"/>\n";
  }
  o << "</g>\n<g class=\"differentials\" stroke=\"#555555\" stroke-width=\"1\">\n";
  for (auto& d : doc.differentials) {
    auto a = pos.at(d.source), b = pos.at(d.target);
    o << "<line data-fact=\"" << xml_escape(d.id) << "\" data-page=\"" << d.r << "\" x1=\"" << a.first << "\" y1=\"" << a.second
      << "\" x2=\"" << b.first << "\" y2=\"" << b.second << "\" marker-end=\"url(#arrow)\"/>\n";
  }
  o << "</g>\n<g class=\"classes\">\n";
  for (auto& c : doc.classes) {
    auto [x, y] = pos.at(c.id);
    o << "<circle data-class=\"" << xml_escape(c.id) << "\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << dot << "\" fill=\""
      << torsion_color(c.torsion) << "\"";
    if (c.status != "alive") o << " fill-opacity=\"0.35\"";
    o << "><title>" << xml_escape(c.name) << " (" << c.stem << "," << c.f << "," << c.w << ")</title></circle>\n";
    if (c.count > 1)
      o << "<text x=\"" << x + dot + 1 << "\" y=\"" << y - dot - 1 << "\" font-size=\"8\">" << c.count << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace synss
