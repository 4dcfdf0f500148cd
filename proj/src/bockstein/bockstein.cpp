#include "synss/bockstein.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

namespace synss {

std::string QuadDegree::str() const {
  return "(" + std::to_string(f) + "," + std::to_string(u) + "," + std::to_string(t) + "," + std::to_string(w) + ")";
}

std::string Combination::str() const {
  std::string s;
  for (auto& [c, n] : terms) {
    if (!s.empty()) s += " + ";
    if (c != 1) s += std::to_string(c) + "*";
    s += n;
  }
  return s.empty() ? "0" : s;
}

QuadDegree assign_weight(const ClassicalClass& c) {
  if (c.u < 0) throw BocksteinError("class " + c.name + " has negative Novikov filtration");
  return {c.f, c.u, c.t, c.u + c.t};
}

std::string overline_name(const std::string& name) { return "overline{" + name + "}"; }

const LambdaGenerator* LambdaModulePresentation::find(const std::string& name) const {
  for (auto& g : gens)
    if (g.name == name) return &g;
  return nullptr;
}

int LambdaModulePresentation::dim(const QuadDegree& d) const {
  int n = 0;
  for (auto& g : gens) {
    if (g.deg.f != d.f || g.deg.u != d.u || g.deg.t != d.t) continue;
    int k = g.deg.w - d.w;
    if (k < 0) continue;
    if (g.free || k < g.torsion_exponent) ++n;
  }
  return n;
}

nlohmann::json LambdaModulePresentation::to_json() const {
  nlohmann::json j;
  j["schema"] = "synss.lambda_module/1";
  j["p"] = p;
  auto& gs = j["generators"] = nlohmann::json::array();
  for (auto& g : gens) {
    nlohmann::json x{{"name", g.name}, {"f", g.deg.f}, {"u", g.deg.u}, {"t", g.deg.t}, {"w", g.deg.w}, {"free", g.free}};
    if (!g.free) {
      x["torsion_exponent"] = g.torsion_exponent;
      x["killed_by"] = g.killed_by;
    }
    gs.push_back(x);
  }
  auto& ds = j["differentials"] = nlohmann::json::array();
  for (auto& d : diffs)
    ds.push_back({{"source", d.source}, {"target", d.target.str()}, {"page", d.page},
                  {"lambda_exponent", d.lambda_exponent}, {"sign", d.sign}});
  j["warnings"] = warnings;
  return j;
}

namespace {

int mod(long a, int p) { return static_cast<int>(((a % p) + p) % p); }

}  // namespace

LambdaModulePresentation reconstruct(const std::vector<ClassicalClass>& classes,
                                     const std::vector<ClassicalDifferential>& diffs, int p) {
  LambdaModulePresentation m;
  m.p = p;
  m.classes = classes;
  std::map<std::string, const ClassicalClass*> by_name;
  for (auto& c : classes) {
    assign_weight(c);
    if (!by_name.emplace(c.name, &c).second) throw BocksteinError("duplicate class " + c.name);
  }
  auto sorted = diffs;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.r < b.r; });
  std::set<std::string> sources;
  // per (f,u,t): reduced target vectors with their pivot class
  std::map<std::tuple<int, int, int>, std::vector<std::pair<std::map<std::string, int>, std::string>>> killed;
  std::set<std::string> pivots;
  struct Torsion {
    std::string name, pivot, source;
    QuadDegree deg;
    int e;
  };
  std::vector<Torsion> torsion;
  for (auto& d : sorted) {
    if (d.r < 2) throw BocksteinError("differential on " + d.source + " has page " + std::to_string(d.r) + " < 2");
    if (!d.convention_declared)
      m.warnings.push_back("differential on " + d.source + " has no declared page convention; read as page index");
    auto it = by_name.find(d.source);
    if (it == by_name.end()) throw BocksteinError("unknown source class " + d.source);
    const ClassicalClass& x = *it->second;
    if (sources.count(d.source) || pivots.count(d.source))
      throw BocksteinError("double-kill conflict on " + d.source);
    std::map<std::string, int> vec;
    for (auto& [c, n] : d.target.terms) {
      auto jt = by_name.find(n);
      if (jt == by_name.end()) throw BocksteinError("unknown target class " + n);
      const ClassicalClass& y = *jt->second;
      if (y.f != x.f + 1 || y.u != x.u + d.r - 1 || y.t != x.t)
        throw BocksteinError("d_" + std::to_string(d.r) + "(" + x.name + ") = " + n + " has inconsistent degrees");
      if (sources.count(n)) throw BocksteinError("double-kill conflict: " + n + " already supports a differential");
      vec[n] = mod(vec[n] + c, p);
    }
    std::erase_if(vec, [](const auto& kv) { return kv.second == 0; });
    if (vec.empty()) throw BocksteinError("differential on " + d.source + " has zero target");
    // reduce against earlier targets in the same degree
    auto key = std::make_tuple(x.f + 1, x.u + d.r - 1, x.t);
    for (auto& [kv, piv] : killed[key]) {
      auto f = vec.find(piv);
      if (f == vec.end()) continue;
      int a = f->second;
      int inv = 1;
      for (int e = 0; e < p - 2; ++e) inv = inv * kv.at(piv) % p;
      int factor = a * inv % p;
      for (auto& [n, c] : kv) vec[n] = mod(vec[n] - static_cast<long>(factor) * c, p);
      std::erase_if(vec, [](const auto& q) { return q.second == 0; });
    }
    if (vec.empty()) throw BocksteinError("double-kill conflict: target of " + d.source + " is already dead");
    std::string pivot = vec.rbegin()->first;
    sources.insert(d.source);
    pivots.insert(pivot);
    killed[key].push_back({vec, pivot});
    const ClassicalClass& y = *by_name.at(pivot);
    torsion.push_back({d.target.str(), pivot, d.source, assign_weight(y), d.r - 1});
    m.diffs.push_back({d.source, d.target, d.r, d.r - 1, p == 2 ? 1 : -1});
  }
  for (auto& c : classes) {
    if (sources.count(c.name) || pivots.count(c.name)) continue;
    m.gens.push_back({c.name, assign_weight(c), true, 0, ""});
  }
  for (auto& t : torsion) m.gens.push_back({t.name, t.deg, false, t.e, t.source});
  std::stable_sort(m.gens.begin(), m.gens.end(), [](const auto& a, const auto& b) { return a.deg < b.deg; });
  return m;
}

std::string QValue::str() const {
  if (zero) return "0";
  std::string l = lambda_exponent == 0 ? "" : lambda_exponent == 1 ? "λ" : "λ^" + std::to_string(lambda_exponent);
  std::string t = target.str();
  if (target.terms.size() > 1) t = "(" + t + ")";
  return (sign < 0 ? "-" : "") + l + (l.empty() ? "" : "·") + t;
}

QValue q_map(const LambdaModulePresentation& m, const std::string& source) {
  for (auto& d : m.diffs)
    if (d.source == source) {
      QValue v;
      v.target = d.target;
      v.lambda_exponent = d.lambda_exponent - 1;
      v.sign = m.p == 2 ? 1 : -1;
      const ClassicalClass* x = nullptr;
      for (auto& c : m.classes)
        if (c.name == source) x = &c;
      QuadDegree xd = assign_weight(*x);
      v.deg = {xd.f + 1, xd.u + d.page - 1, xd.t, xd.w + 1};
      return v;
    }
  // surviving classes are images of i, on which q vanishes
  for (auto& g : m.gens)
    if (g.name == source || overline_name(g.name) == source) {
      QValue v;
      v.zero = true;
      return v;
    }
  throw BocksteinError("q is not defined on " + source);
}

std::optional<std::string> i_map(const LambdaModulePresentation& m, const std::string& name, int k) {
  const LambdaGenerator* g = m.find(name);
  if (!g) throw BocksteinError("i is not defined on " + name);
  if (k < 0 || (!g->free && k >= g->torsion_exponent)) throw BocksteinError("λ^" + std::to_string(k) + "·" + name + " is zero");
  if (k > 0) return std::nullopt;
  return name;
}

std::vector<std::string> check_les(const LambdaModulePresentation& m) {
  std::vector<std::string> bad;
  std::map<std::tuple<int, int, int>, int> classical;
  for (auto& c : m.classes) classical[{c.f, c.u, c.t}] += 1;
  std::set<std::tuple<int, int, int>> keys;
  for (auto& [k, n] : classical) keys.insert(k);
  for (auto& g : m.gens) keys.insert({g.deg.f, g.deg.u, g.deg.t});
  for (auto& [f, u, t] : keys) {
    int lhs = classical.count({f, u, t}) ? classical.at({f, u, t}) : 0;
    int coker = 0, ker = 0;
    for (auto& g : m.gens) {
      if (g.deg.f == f && g.deg.u == u && g.deg.t == t && g.deg.w == u + t) ++coker;
      if (!g.free && g.deg.f == f + 1 && g.deg.t == t && g.deg.w == u + t + g.torsion_exponent) ++ker;
    }
    if (lhs != coker + ker)
      bad.push_back("LES rank identity fails at (f,u,t)=(" + std::to_string(f) + "," + std::to_string(u) + "," +
                    std::to_string(t) + "): " + std::to_string(lhs) + " != " + std::to_string(coker) + " + " +
                    std::to_string(ker));
  }
  return bad;
}

std::map<Spot, int> predicted_synthetic_page(const std::vector<ClassicalClass>& classes,
                                             const std::vector<ClassicalDifferential>& diffs, int r, int w_min) {
  std::set<std::string> dead;
  std::map<std::string, int> torsion;  // target pivot -> page of its differential
  auto pres = reconstruct(classes, diffs);
  for (auto& d : pres.diffs) {
    if (d.page >= r) continue;
    dead.insert(d.source);
  }
  for (auto& g : pres.gens)
    if (!g.free) {
      int page = g.torsion_exponent + 1;
      if (page < r) torsion[g.name] = page;
    }
  std::map<Spot, int> out;
  auto add_range = [&](const QuadDegree& d, int kmax) {
    for (int k = 0; k <= kmax && d.w - k >= w_min; ++k) out[{d.f, d.u, d.t, d.w - k}] += 1;
  };
  for (auto& g : pres.gens) {
    if (g.free) add_range(g.deg, 1 << 20);
    else if (torsion.count(g.name)) add_range(g.deg, g.torsion_exponent - 1);
    else add_range(g.deg, 1 << 20);  // target of a later page: still free on E_r
  }
  // sources of later-page differentials are still alive and free on E_r
  for (auto& d : pres.diffs)
    if (d.page >= r)
      for (auto& c : classes)
        if (c.name == d.source) add_range(assign_weight(c), 1 << 20);
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

ClassicalData classical_from_ss(const SSResult& anss, int r_max) {
  ClassicalData out;
  std::map<Spot, std::vector<std::string>> names;
  for (auto& [s, d] : anss.page(2).dims) {
    auto [f, u, t, w] = s;
    for (int k = 0; k < d; ++k) {
      std::string n = "x(" + std::to_string(f) + "," + std::to_string(u) + "," + std::to_string(t) + ")#" + std::to_string(k);
      out.classes.push_back({n, f, u, t, std::nullopt});
      names[s].push_back(n);
    }
  }
  std::map<Spot, size_t> used_src, used_tgt;
  for (int r = 2; r <= r_max; ++r)
    for (auto& pd : anss.page(r).diffs)
      for (int k = 0; k < pd.rank; ++k) {
        auto& sn = names[pd.source];
        auto& tn = names[pd.target];
        // sources are taken from the front, targets from the back, so the two never collide
        size_t si = used_src[pd.source]++;
        if (si >= sn.size()) throw BocksteinError("differential source outside the classical E_2 window");
        if (!anss.page(2).dims.count(pd.target)) {
          out.truncated.push_back(sn[si]);
          continue;
        }
        size_t ti = used_tgt[pd.target]++;
        if (ti >= tn.size()) throw BocksteinError("more differentials than classes at a target spot");
        out.diffs.push_back({r, sn[si], Combination::of(tn[tn.size() - 1 - ti]), true});
      }
  std::erase_if(out.classes, [&](const ClassicalClass& c) {
    return std::find(out.truncated.begin(), out.truncated.end(), c.name) != out.truncated.end();
  });
  return out;
}

ClassicalData read_classical_jsonl(std::istream& in) {
  ClassicalData out;
  std::string line;
  int lineno = 0;
  auto parse_target = [](const nlohmann::json& t) {
    Combination c;
    if (t.is_string()) return Combination::of(t.get<std::string>());
    for (auto& x : t) c.terms.push_back({x.value("coef", 1), x.at("name").get<std::string>()});
    return c;
  };
  auto parse_diff = [&](const nlohmann::json& j, const std::string& src) {
    ClassicalDifferential d;
    d.source = src;
    if (j.contains("lambda_exponent")) d.r = j["lambda_exponent"].get<int>() + 1;
    else d.r = j.at("r").get<int>();
    d.convention_declared = j.contains("lambda_exponent") || j.value("convention", "") == "page";
    d.target = parse_target(j.at("target"));
    return d;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      std::string kind = j.value("kind", "");
      if (kind == "class") {
        ClassicalClass c{j.at("name"), j.at("f"), j.at("u"), j.at("t"), std::nullopt};
        if (j.contains("expr")) c.expr = j["expr"].get<std::string>();
        out.classes.push_back(c);
      } else if (kind == "differential") {
        out.diffs.push_back(parse_diff(j, j.at("source")));
      } else if (j.contains("degree")) {
        auto deg = j.at("degree");
        out.classes.push_back({j.at("name"), deg.at(0), deg.at(1), deg.at(2), std::nullopt});
        if (j.contains("differentials"))
          for (auto& d : j["differentials"]) {
            auto cd = parse_diff(d, j.at("name"));
            if (!d.contains("convention") && !d.contains("lambda_exponent")) cd.convention_declared = false;
            out.diffs.push_back(cd);
          }
      } else {
        throw ParseError("unrecognized record");
      }
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_classical_jsonl(std::ostream& out, const ClassicalData& d) {
  for (auto& c : d.classes) {
    nlohmann::json j{{"kind", "class"}, {"name", c.name}, {"f", c.f}, {"u", c.u}, {"t", c.t}};
    if (c.expr) j["expr"] = *c.expr;
    out << j.dump() << "\n";
  }
  for (auto& x : d.diffs) {
    auto tgt = nlohmann::json::array();
    for (auto& [c, n] : x.target.terms) tgt.push_back({{"coef", c}, {"name", n}});
    out << nlohmann::json{{"kind", "differential"}, {"convention", "page"}, {"r", x.r}, {"source", x.source}, {"target", tgt}}.dump()
        << "\n";
  }
}

}  // namespace synss
