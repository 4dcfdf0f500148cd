#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "synss/deduce.hpp"

namespace synss {

using nlohmann::json;

std::string ChartDegree::str() const {
  return "(" + std::to_string(stem) + "," + std::to_string(f) + "," + std::to_string(w) + ")";
}

std::string to_string(ChartKind k) {
  switch (k) {
    case ChartKind::ANSS_S: return "ANSS-S";
    case ChartKind::ANSS_SModLambda: return "ANSS-S/lambda";
    case ChartKind::aNSS: return "aNSS";
    case ChartKind::CESS: return "CESS";
  }
  return "?";
}

ChartKind chart_kind_from(const std::string& s) {
  if (s == "ANSS-S") return ChartKind::ANSS_S;
  if (s == "ANSS-S/lambda") return ChartKind::ANSS_SModLambda;
  if (s == "aNSS") return ChartKind::aNSS;
  if (s == "CESS") return ChartKind::CESS;
  throw DeductionError("invalid", "unknown chart kind '" + s + "'");
}

ChartDegree differential_shift(ChartKind k, int r) {
  // aNSS: (f,u,t) -> (f+1, u+r-1, t), so w = u+t grows by r-1
  if (k == ChartKind::aNSS) return {-1, 1, r - 1};
  return {-1, r, 0};
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Imported: return "imported";
    case Provenance::Asserted: return "asserted";
    case Provenance::Leibniz: return "leibniz";
    case Provenance::QMap: return "q-map";
  }
  return "?";
}

Provenance provenance_from(const std::string& s) {
  if (s == "imported") return Provenance::Imported;
  if (s == "asserted") return Provenance::Asserted;
  if (s == "leibniz") return Provenance::Leibniz;
  if (s == "q-map") return Provenance::QMap;
  throw DeductionError("invalid", "unknown provenance '" + s + "'");
}

std::string to_string(ExtKind k) {
  switch (k) {
    case ExtKind::TwoH: return "2/h";
    case ExtKind::Alpha1: return "alpha_1";
    case ExtKind::Alpha22: return "alpha_{2/2}";
    case ExtKind::Lambda: return "lambda";
  }
  return "?";
}

ExtKind ext_kind_from(const std::string& s) {
  if (s == "2/h" || s == "2" || s == "h") return ExtKind::TwoH;
  if (s == "alpha_1") return ExtKind::Alpha1;
  if (s == "alpha_{2/2}") return ExtKind::Alpha22;
  if (s == "lambda") return ExtKind::Lambda;
  throw DeductionError("invalid", "unknown extension kind '" + s + "'");
}

std::string multiplier_of(ExtKind k) {
  switch (k) {
    case ExtKind::TwoH: return "h";
    case ExtKind::Alpha1: return "alpha_1";
    case ExtKind::Alpha22: return "alpha_{2/2}";
    case ExtKind::Lambda: return "lambda";
  }
  return "?";
}

// ---------------------------------------------------------------- elements

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

int mod(long v, int p) { return static_cast<int>(((v % p) + p) % p); }

int inverse(int a, int p) {
  for (int x = 1; x < p; ++x)
    if (a * x % p == 1) return x;
  throw DeductionError("invalid", "no inverse");
}

Element canonical(std::vector<Term> ts, int p) {
  std::map<std::pair<std::string, int>, long> acc;
  for (auto& t : ts) acc[{t.name, t.k}] += t.coef;
  Element e;
  for (auto& [key, c] : acc) {
    int v = mod(c, p);
    if (v) e.terms.push_back({v, key.second, key.first});
  }
  return e;
}

Element scale(const Element& e, int c, int shift_k, int p) {
  std::vector<Term> ts;
  for (auto t : e.terms) ts.push_back({t.coef * c, t.k + shift_k, t.name});
  return canonical(ts, p);
}

Element add(const Element& a, const Element& b, int p) {
  auto ts = a.terms;
  ts.insert(ts.end(), b.terms.begin(), b.terms.end());
  return canonical(ts, p);
}


// Fact id of an apply_event reply; empty for no-op repetitions.
std::string fact_id(const json& out) {
  auto it = out.find("fact");
  return it != out.end() && it->is_string() ? it->get<std::string>() : "";
}

}  // namespace

std::string Element::str() const {
  if (terms.empty()) return "0";
  std::string s;
  for (auto& t : terms) {
    if (!s.empty()) s += " + ";
    if (t.coef != 1) s += std::to_string(t.coef) + " ";
    if (t.k == 1) s += "lambda ";
    if (t.k > 1) s += "lambda^" + std::to_string(t.k) + " ";
    s += t.name;
  }
  return s;
}

Element Element::parse(const std::string& text) {
  std::string s = trim(text);
  if (s.empty()) throw DeductionError("invalid", "empty element");
  if (s == "0") return {};
  std::vector<Term> ts;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find(" + ", pos);
    std::string part = trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    Term t;
    if (!part.empty() && std::isdigit(static_cast<unsigned char>(part[0]))) {
      size_t i = 0;
      while (i < part.size() && std::isdigit(static_cast<unsigned char>(part[i]))) ++i;
      if (i < part.size() && (part[i] == ' ' || part[i] == '*')) {
        t.coef = std::stoi(part.substr(0, i));
        part = trim(part.substr(i + 1));
      }
    }
    if (part.rfind("lambda^", 0) == 0) {
      size_t i = 7;
      while (i < part.size() && std::isdigit(static_cast<unsigned char>(part[i]))) ++i;
      if (i == 7 || i >= part.size() || part[i] != ' ') throw DeductionError("invalid", "bad λ-power in '" + text + "'");
      t.k = std::stoi(part.substr(7, i - 7));
      part = trim(part.substr(i));
    } else if (part.rfind("lambda ", 0) == 0) {
      t.k = 1;
      part = trim(part.substr(7));
    }
    if (part.empty()) throw DeductionError("invalid", "missing class name in '" + text + "'");
    if (part.find_first_of(" \t+") != std::string::npos)
      throw DeductionError("invalid", "malformed term '" + part + "' in '" + text + "'");
    t.name = part;
    ts.push_back(t);
    if (next == std::string::npos) break;
    pos = next + 3;
  }
  // canonical order; coefficients reduced later against the session prime
  std::map<std::pair<std::string, int>, long> acc;
  for (auto& t : ts) acc[{t.name, t.k}] += t.coef;
  Element e;
  for (auto& [key, c] : acc)
    if (c) e.terms.push_back({static_cast<int>(c), key.second, key.first});
  return e;
}

int Element::min_lambda() const {
  int m = 1 << 30;
  for (auto& t : terms) m = std::min(m, t.k);
  return m;
}

// ---------------------------------------------------------------- session basics

Session::Session(std::string id, ChartKind kind, int p) : id_(std::move(id)), kind_(kind), p_(p) {
  if (p < 2) throw DeductionError("invalid", "prime must be >= 2");
  classes_["1"] = ClassEntry{"1", {0, 0, 0}, 0, true, std::nullopt};
  log_.push_back(json{{"seq", 0}, {"op", "open"}, {"id", id_}, {"chart", to_string(kind_)}, {"p", p_}});
}

void Session::log_event(json ev) {
  ev["seq"] = log_.size();
  log_.push_back(std::move(ev));
}

std::string Session::log_text() const {
  std::string s;
  for (auto& e : log_) s += e.dump() + "\n";
  return s;
}

void Session::write_log(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << log_text();
}

Session Session::replay(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::optional<Session> s;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json ev;
    try {
      ev = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (!s) {
        if (ev.value("op", "") != "open") throw DeductionError("invalid", "the first event must be 'open'");
        s.emplace(ev.at("id").get<std::string>(), chart_kind_from(ev.at("chart")), ev.value("p", 2));
        continue;
      }
      s->apply_event(ev);
    } catch (const DeductionError& e) {
      throw DeductionError(e.code, "line " + std::to_string(lineno) + ": " + e.what());
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!s) throw ParseError("empty session log");
  return std::move(*s);
}

Session Session::replay_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return replay(in);
}

std::string Session::resolve(const std::string& name) const {
  if (classes_.count(name)) return name;
  auto it = aliases_.find(name);
  if (it != aliases_.end()) return it->second;
  throw DeductionError("unknown_class", "unknown class '" + name + "' on chart " + id_);
}

bool Session::has_class(const std::string& name) const { return classes_.count(name) || aliases_.count(name); }

const ClassEntry& Session::cls(const std::string& name) const { return classes_.at(resolve(name)); }

Element Session::resolve_element(const Element& e) const {
  std::vector<Term> ts;
  for (auto t : e.terms) {
    t.name = resolve(t.name);
    ts.push_back(t);
  }
  return canonical(ts, p_);
}

Element Session::normalize(Element e) const {
  std::vector<Term> ts;
  for (auto& t : e.terms) {
    auto& c = classes_.at(t.name);
    if (c.torsion > 0 && t.k >= c.torsion) continue;  // λ^k kills a λ^e-torsion class
    ts.push_back(t);
  }
  return canonical(ts, p_);
}

ChartDegree Session::degree(const Element& e) const {
  if (e.zero()) throw DeductionError("invalid", "the zero element has no degree");
  std::optional<ChartDegree> d;
  for (auto& t : e.terms) {
    auto c = classes_.at(t.name).deg;
    ChartDegree td{c.stem, c.f, c.w - t.k};
    if (d && td != *d)
      throw DeductionError("degree_mismatch", "element " + e.str() + " is not homogeneous: " + d->str() + " vs " + td.str());
    d = td;
  }
  return *d;
}

bool Session::is_permanent(const std::string& name) const { return name == "1" || permanent_fact_.count(name); }

const Differential* Session::differential_from(const std::string& source) const {
  for (auto& d : diffs_)
    if (d.source == source) return &d;
  return nullptr;
}

// Killed = the pivot (last) term of some differential target with no λ-power.
bool Session::killed(const std::string& name, int* page) const {
  for (auto& d : diffs_) {
    auto& t = d.target.terms.back();
    if (t.name == name && t.k == 0) {
      if (page) *page = d.r;
      return true;
    }
  }
  return false;
}

std::string Session::status(const std::string& name) const {
  auto n = resolve(name);
  if (differential_from(n)) return "source";
  if (killed(n)) return "target";
  return "alive";
}

bool Session::alive_at_einf(const std::string& name) const { return status(name) == "alive"; }

int Session::einf_torsion(const std::string& name) const {
  auto n = resolve(name);
  int e = classes_.at(n).torsion;
  for (auto& d : diffs_)
    for (auto& t : d.target.terms)
      if (t.name == n && t.k > 0) e = e == 0 ? t.k : std::min(e, t.k);
  return e;
}

int Session::last_page() const {
  int r = 1;
  for (auto& d : diffs_) r = std::max(r, d.r);
  return r;
}

bool Session::collapses_by(int page) const { return last_page() < page && tasks_.empty(); }

const FactBase* Session::fact(const std::string& id) const {
  for (auto& r : relations_)
    if (r.id == id) return &r;
  for (auto& d : diffs_)
    if (d.id == id) return &d;
  for (auto& x : exts_)
    if (x.id == id) return &x;
  for (auto& q : qvals_)
    if (q.id == id) return &q;
  for (auto& p : permanence_)
    if (p.id == id) return &p;
  return nullptr;
}

std::string Session::fact_summary(const std::string& id) const {
  for (auto& r : relations_)
    if (r.id == id) return r.m + " · " + r.x + " = " + r.result.str();
  for (auto& d : diffs_)
    if (d.id == id) return "d_" + std::to_string(d.r) + "(" + d.source + ") = " + d.target.str();
  for (auto& x : exts_)
    if (x.id == id) return to_string(x.kind) + "-extension " + x.source + " -> " + x.target.str();
  for (auto& q : qvals_)
    if (q.id == id) return "q(" + q.source + ") = " + q.value.str();
  for (auto& [name, fid] : permanent_fact_)
    if (fid == id) return name + " is a permanent cycle";
  return id;
}

std::vector<std::string> Session::provenance_chain(const std::string& id) const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::function<void(const std::string&, int)> walk = [&](const std::string& f, int depth) {
    std::string pad(2 * depth, ' ');
    if (f.find(':') != std::string::npos) {
      out.push_back(pad + f + " [linked session]");
      return;
    }
    auto* b = fact(f);
    if (!b) {
      out.push_back(pad + f + " [missing]");
      return;
    }
    out.push_back(pad + f + " [" + to_string(b->provenance) + (b->cite.empty() ? "" : ": " + b->cite) + "] " +
                  fact_summary(f));
    if (!seen.insert(f).second) return;
    for (auto& p : b->parents) walk(p, depth + 1);
  };
  walk(id, 0);
  return out;
}

void Session::check_parents(const std::vector<std::string>& parents) const {
  for (auto& p : parents)
    if (p.find(':') == std::string::npos && !fact(p))
      throw DeductionError("invalid", "unknown parent fact '" + p + "'");
}

std::vector<Term> Session::page_candidates(const ChartDegree& d, int r, const std::vector<Differential>& pending) const {
  auto source_page = [&](const std::string& n) {
    for (auto* ds : {&diffs_, &pending})
      for (auto& x : *ds)
        if (x.source == n) return x.r;
    return 0;
  };
  auto target_page = [&](const std::string& n) {
    for (auto* ds : {&diffs_, &pending})
      for (auto& x : *ds)
        if (!x.target.zero() && x.target.terms.back().name == n && x.target.terms.back().k == 0) return x.r;
    return 0;
  };
  std::vector<Term> out;
  for (auto& [name, c] : classes_) {
    if (c.deg.stem != d.stem || c.deg.f != d.f || c.deg.w < d.w) continue;
    int j = c.deg.w - d.w;
    if (c.torsion > 0 && j >= c.torsion) continue;
    int sp = source_page(name), tp = target_page(name);
    if (sp && sp <= r) continue;
    if (tp && tp <= r) continue;
    out.push_back({1, j, name});
  }
  return out;
}

std::optional<Element> Session::product(const std::string& m_in, const Element& e, std::vector<std::string>* used,
                                        std::string* missing) const {
  std::string m = m_in == "lambda" ? m_in : resolve(m_in);
  if (m == "lambda") return normalize(scale(e, 1, 1, p_));
  Element acc;
  for (auto& t : e.terms) {
    Element part;
    if (m == "1") {
      part = Element::of(t.name);
    } else if (t.name == "1") {
      part = Element::of(m);
    } else {
      auto it = relation_index_.find({m, t.name});
      int sign = 1;
      if (it == relation_index_.end()) {
        it = relation_index_.find({t.name, m});
        if (it != relation_index_.end() && p_ != 2 && (classes_.at(m).deg.stem * classes_.at(t.name).deg.stem) % 2)
          sign = -1;
      }
      if (it == relation_index_.end()) {
        if (missing) *missing = m + " · " + t.name;
        return std::nullopt;
      }
      auto& r = relations_[it->second];
      if (used) used->push_back(r.id);
      part = scale(r.result, sign, 0, p_);
    }
    acc = add(acc, scale(part, t.coef, t.k, p_), p_);
  }
  return normalize(acc);
}

// ---------------------------------------------------------------- mutations

void Session::add_class(const std::string& name, ChartDegree deg, int torsion, const std::optional<std::string>& expr) {
  json ev{{"op", "class"}, {"name", name}, {"deg", {deg.stem, deg.f, deg.w}}, {"torsion", torsion}};
  if (expr) ev["expr"] = *expr;
  apply_event(ev);
}

void Session::add_alias(const std::string& alias, const std::string& name) {
  apply_event(json{{"op", "alias"}, {"alias", alias}, {"name", name}});
}

std::string Session::add_relation(const std::string& m, const std::string& x, const Element& result, Provenance prov,
                                  const std::string& cite) {
  auto out = apply_event(json{{"op", "relation"}, {"m", m}, {"x", x}, {"result", result.str()},
                              {"provenance", to_string(prov)}, {"cite", cite}});
  return fact_id(out);
}

std::string Session::assert_permanent(const std::string& name, Provenance prov, const std::string& cite) {
  auto out = apply_event(json{{"op", "permanent"}, {"name", name}, {"provenance", to_string(prov)}, {"cite", cite}});
  return fact_id(out);
}

std::string Session::assert_differential(int r, const std::string& source, const Element& target, Provenance prov,
                                         const std::string& cite, const std::vector<std::string>& parents) {
  auto out = apply_event(json{{"op", "differential"}, {"r", r}, {"source", source}, {"target", target.str()},
                              {"provenance", to_string(prov)}, {"cite", cite}, {"parents", parents}});
  return fact_id(out);
}

std::string Session::assert_hidden_extension(ExtKind kind, const std::string& source, const Element& target,
                                             const std::string& level, Provenance prov, const std::string& cite,
                                             const std::vector<std::string>& parents) {
  auto out = apply_event(json{{"op", "extension"}, {"kind", to_string(kind)}, {"source", source},
                              {"target", target.str()}, {"level", level}, {"provenance", to_string(prov)},
                              {"cite", cite}, {"parents", parents}});
  return fact_id(out);
}

std::string Session::record_q_value(const std::string& source, const Element& value, Provenance prov,
                                    const std::string& cite) {
  auto out = apply_event(json{{"op", "q_value"}, {"source", source}, {"value", value.str()},
                              {"provenance", to_string(prov)}, {"cite", cite}});
  return fact_id(out);
}

PropagationReport Session::propagate_leibniz() {
  auto out = apply_event(json{{"op", "propagate"}});
  PropagationReport rep;
  rep.derived = out.at("derived").get<std::vector<std::string>>();
  rep.tasks = tasks_;
  rep.conflicts = out.at("conflicts").get<std::vector<std::string>>();
  return rep;
}

std::string Session::insert_differential(Differential d) {
  d.source = resolve(d.source);
  d.target = normalize(resolve_element(d.target));
  if (d.r < 1) throw DeductionError("invalid", "page must be >= 1");
  if (d.target.zero()) throw DeductionError("invalid", "zero target; record permanence instead");
  auto sd = classes_.at(d.source).deg;
  auto want = sd + differential_shift(kind_, d.r);
  auto got = degree(d.target);
  std::string shown = "d_" + std::to_string(d.r) + "(" + d.source + ") = " + d.target.str();
  if (got != want)
    throw DeductionError("degree_mismatch", shown + ": source " + sd.str() + " needs a target in " + want.str() +
                                                ", got " + got.str());
  auto chain_text = [&](const std::string& fid) {
    std::string s;
    for (auto& l : provenance_chain(fid)) s += "\n    " + l;
    return s;
  };
  std::string new_chain = "\n    new: [" + to_string(d.provenance) + (d.cite.empty() ? "" : ": " + d.cite) + "] " + shown;
  if (auto* old = differential_from(d.source)) {
    if (old->r == d.r && old->target == d.target) return "";
    throw DeductionError("conflict", shown + " conflicts with the recorded " + fact_summary(old->id) + new_chain +
                                         "\n    recorded:" + chain_text(old->id));
  }
  if (permanent_fact_.count(d.source))
    throw DeductionError("conflict", shown + " contradicts permanence of " + d.source + new_chain +
                                         "\n    recorded:" + chain_text(permanent_fact_.at(d.source)));
  for (auto& o : diffs_) {
    auto& piv = o.target.terms.back();
    if (piv.name == d.source && piv.k == 0) {
      std::string why = o.r == d.r ? "receives a differential of the same page" :
                        o.r < d.r  ? "is already dead" : "must survive to the page of";
      throw DeductionError(o.r < d.r ? "dead_source" : "conflict",
                           shown + ": " + d.source + " " + why + " " + fact_summary(o.id) + new_chain +
                               "\n    recorded:" + chain_text(o.id));
    }
    for (auto& t : d.target.terms)
      if (o.source == t.name && o.r <= d.r)
        throw DeductionError("conflict", shown + ": target " + t.name + " supports " + fact_summary(o.id) + new_chain +
                                             "\n    recorded:" + chain_text(o.id));
  }
  auto& piv = d.target.terms.back();
  if (piv.k == 0)
    if (auto* o = differential_from(piv.name); o && o->r > d.r)
      throw DeductionError("conflict", shown + " kills " + piv.name + ", which supports " + fact_summary(o->id) +
                                           new_chain + "\n    recorded:" + chain_text(o->id));
  d.id = new_fact();
  diffs_.push_back(d);
  return d.id;
}

std::string Session::insert_extension(HiddenExtension x) {
  x.source = resolve(x.source);
  x.target = normalize(resolve_element(x.target));
  if (x.level != "E2" && x.level != "Einf") throw DeductionError("invalid", "level must be E2 or Einf");
  if (x.target.zero()) throw DeductionError("invalid", "zero extension target");
  auto sd = classes_.at(x.source).deg;
  ChartDegree md = x.kind == ExtKind::Lambda ? kLambdaDegree : cls(multiplier_of(x.kind)).deg;
  auto td = degree(x.target);
  auto naive = sd + md;
  std::string shown = to_string(x.kind) + "-extension " + x.source + " -> " + x.target.str();
  if (td.stem != naive.stem || td.w != naive.w || td.f < naive.f)
    throw DeductionError("degree_mismatch", shown + ": product lands in " + naive.str() + ", target is in " + td.str());
  if (x.level == "Einf") {
    if (!alive_at_einf(x.source)) throw DeductionError("dead_source", shown + ": " + x.source + " does not survive to E_inf");
    for (auto& t : x.target.terms)
      if (status(t.name) == "source")
        throw DeductionError("conflict", shown + ": " + t.name + " does not survive to E_inf");
    if (killed(x.target.terms.back().name) && x.target.terms.back().k == 0)
      throw DeductionError("conflict", shown + ": " + x.target.terms.back().name + " is hit by a differential");
  }
  for (auto& o : exts_)
    if (o.kind == x.kind && o.source == x.source && o.level == x.level) {
      if (o.target == x.target) return "";
      throw DeductionError("conflict", shown + " conflicts with " + fact_summary(o.id));
    }
  x.id = new_fact();
  exts_.push_back(x);
  return x.id;
}

namespace {

FactBase read_fact(const json& ev) {
  FactBase b;
  b.provenance = provenance_from(ev.value("provenance", "asserted"));
  b.cite = ev.value("cite", "");
  if (ev.contains("parents")) b.parents = ev["parents"].get<std::vector<std::string>>();
  return b;
}

}  // namespace

json Session::apply_event(const json& in) {
  json ev = in;
  json recorded;  // outcome fields present in a replayed log
  for (const char* k : {"seq", "fact", "derived", "tasks", "conflicts"})
    if (ev.contains(k)) {
      recorded[k] = ev[k];
      ev.erase(k);
    }
  std::string op = ev.at("op");
  json out;
  if (op == "class") {
    std::string name = ev.at("name");
    if (name.empty() || name.rfind("lambda", 0) == 0 || name.find(" + ") != std::string::npos ||
        std::isdigit(static_cast<unsigned char>(name[0])))
      throw DeductionError("invalid", "invalid class name '" + name + "'");
    auto d = ev.at("deg");
    ClassEntry c{name, {d.at(0), d.at(1), d.at(2)}, ev.value("torsion", 0), false, std::nullopt};
    if (ev.contains("expr")) c.expr = ev["expr"].get<std::string>();
    if (c.torsion < 0) throw DeductionError("invalid", "negative torsion exponent for " + name);
    if (aliases_.count(name)) throw DeductionError("conflict", name + " is already an alias");
    if (auto it = classes_.find(name); it != classes_.end()) {
      if (it->second.deg == c.deg && it->second.torsion == c.torsion) return out;
      throw DeductionError("conflict", "class " + name + " already recorded in " + it->second.deg.str());
    }
    classes_[name] = c;
    class_order_.push_back(name);
  } else if (op == "alias") {
    std::string a = ev.at("alias"), n = resolve(ev.at("name"));
    if (classes_.count(a)) throw DeductionError("conflict", "alias " + a + " names a class");
    if (auto it = aliases_.find(a); it != aliases_.end()) {
      if (it->second == n) return out;
      throw DeductionError("conflict", "alias " + a + " already points to " + it->second);
    }
    aliases_[a] = n;
  } else if (op == "relation") {
    Relation r;
    static_cast<FactBase&>(r) = read_fact(ev);
    r.m = resolve(ev.at("m"));
    r.x = resolve(ev.at("x"));
    r.result = normalize(resolve_element(Element::parse(ev.at("result"))));
    check_parents(r.parents);
    auto want = classes_.at(r.m).deg + classes_.at(r.x).deg;
    if (!r.result.zero() && degree(r.result) != want)
      throw DeductionError("degree_mismatch", r.m + " · " + r.x + " lies in " + want.str() + ", but " + r.result.str() +
                                                  " is in " + degree(r.result).str());
    auto key = std::make_pair(r.m, r.x);
    if (auto it = relation_index_.find(key); it != relation_index_.end()) {
      if (relations_[it->second].result == r.result) return out;
      throw DeductionError("conflict", "relation " + r.m + " · " + r.x + " already recorded as " +
                                           relations_[it->second].result.str());
    }
    r.id = new_fact();
    relation_index_[key] = relations_.size();
    relations_.push_back(r);
    out["fact"] = r.id;
  } else if (op == "permanent") {
    std::string n = resolve(ev.at("name"));
    if (permanent_fact_.count(n)) return out;
    if (auto* d = differential_from(n))
      throw DeductionError("conflict", n + " supports " + fact_summary(d->id));
    FactBase b = read_fact(ev);
    check_parents(b.parents);
    b.id = new_fact();
    permanence_.push_back(b);
    permanent_fact_[n] = b.id;
    classes_[n].permanent = true;
    out["fact"] = b.id;
  } else if (op == "differential") {
    Differential d;
    static_cast<FactBase&>(d) = read_fact(ev);
    d.r = ev.at("r");
    d.source = ev.at("source");
    d.target = Element::parse(ev.at("target"));
    check_parents(d.parents);
    if ((d.provenance == Provenance::Leibniz || d.provenance == Provenance::QMap) && d.parents.empty())
      throw DeductionError("invalid", "derived differentials need parent facts");
    auto id = insert_differential(d);
    if (id.empty()) return out;
    out["fact"] = id;
  } else if (op == "extension") {
    HiddenExtension x;
    static_cast<FactBase&>(x) = read_fact(ev);
    x.kind = ext_kind_from(ev.at("kind"));
    x.source = ev.at("source");
    x.target = Element::parse(ev.at("target"));
    x.level = ev.value("level", "Einf");
    check_parents(x.parents);
    auto id = insert_extension(x);
    if (id.empty()) return out;
    out["fact"] = id;
  } else if (op == "q_value") {
    QRecord q;
    static_cast<FactBase&>(q) = read_fact(ev);
    q.source = resolve(ev.at("source"));
    q.value = Element::parse(ev.at("value"));
    q.value = canonical(q.value.terms, p_);
    for (auto& o : qvals_)
      if (o.source == q.source) {
        if (o.value == q.value) return out;
        throw DeductionError("conflict", "q(" + q.source + ") already recorded as " + o.value.str());
      }
    q.id = new_fact();
    qvals_.push_back(q);
    out["fact"] = q.id;
  } else if (op == "propagate") {
    auto rep = run_propagation();
    out["derived"] = rep.derived;
    out["tasks"] = rep.tasks.size();
    out["conflicts"] = rep.conflicts;
  } else {
    throw DeductionError("invalid", "unknown event '" + op + "'");
  }
  for (auto& [k, v] : recorded.items()) {
    if (k == "seq") continue;
    if (!out.contains(k) || out[k] != v)
      throw DeductionError("replay", "event '" + op + "' reproduced " + (out.contains(k) ? out[k].dump() : "nothing") +
                                         " for '" + k + "', log says " + v.dump());
  }
  json logged = ev;
  for (auto& [k, v] : out.items()) logged[k] = v;
  log_event(logged);
  return out;
}

// ---------------------------------------------------------------- Leibniz propagation

namespace {

// Solve Σ a_i cols_i = rhs over F_p; returns (solution, nullity) or nullopt if inconsistent.
std::optional<std::pair<std::vector<int>, int>> solve(const std::vector<Element>& cols, const Element& rhs, int p) {
  std::map<std::pair<std::string, int>, int> row_of;
  auto rid = [&](const Term& t) {
    auto key = std::make_pair(t.name, t.k);
    auto it = row_of.find(key);
    if (it != row_of.end()) return it->second;
    int r = static_cast<int>(row_of.size());
    row_of[key] = r;
    return r;
  };
  for (auto& c : cols)
    for (auto& t : c.terms) rid(t);
  for (auto& t : rhs.terms) rid(t);
  int R = static_cast<int>(row_of.size()), C = static_cast<int>(cols.size());
  std::vector<std::vector<int>> a(R, std::vector<int>(C + 1, 0));
  for (int c = 0; c < C; ++c)
    for (auto& t : cols[c].terms) a[rid(t)][c] = mod(t.coef, p);
  for (auto& t : rhs.terms) a[rid(t)][C] = mod(t.coef, p);
  std::vector<int> pivcol;
  int row = 0;
  for (int c = 0; c < C && row < R; ++c) {
    int piv = -1;
    for (int r = row; r < R; ++r)
      if (a[r][c]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[row]);
    int inv = inverse(a[row][c], p);
    for (auto& v : a[row]) v = v * inv % p;
    for (int r = 0; r < R; ++r)
      if (r != row && a[r][c]) {
        int f = a[r][c];
        for (int k = 0; k <= C; ++k) a[r][k] = mod(a[r][k] - f * a[row][k], p);
      }
    pivcol.push_back(c);
    ++row;
  }
  for (int r = row; r < R; ++r)
    if (a[r][C]) return std::nullopt;
  std::vector<int> x(C, 0);
  for (int i = 0; i < row; ++i) x[pivcol[i]] = a[i][C];
  return std::make_pair(x, C - row);
}

}  // namespace

PropagationReport Session::run_propagation() {
  PropagationReport rep;
  std::vector<Task> pass_tasks;
  auto task = [&](std::string kind, std::string text, std::vector<std::string> facts) {
    Task t{std::move(kind), std::move(text), std::move(facts)};
    if (std::find(pass_tasks.begin(), pass_tasks.end(), t) == pass_tasks.end()) pass_tasks.push_back(t);
  };
  auto sign_of = [&](const std::string& m) {
    return (p_ != 2 && classes_.at(m).deg.stem % 2) ? -1 : 1;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    pass_tasks.clear();
    auto emit = [&](int r, const std::string& src, const Element& tgt, std::vector<std::string> parents,
                    const std::string& cite) {
      std::sort(parents.begin(), parents.end());
      parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
      Differential d;
      d.provenance = Provenance::Leibniz;
      d.cite = cite;
      d.parents = parents;
      d.r = r;
      d.source = src;
      d.target = tgt;
      try {
        auto id = insert_differential(d);
        if (!id.empty()) {
          rep.derived.push_back(id);
          changed = true;
        }
      } catch (const DeductionError& e) {
        std::string msg = e.what();
        if (std::find(rep.conflicts.begin(), rep.conflicts.end(), msg) == rep.conflicts.end())
          rep.conflicts.push_back(msg);
        task("conflict", msg, parents);
      }
    };
    for (size_t ri = 0; ri < relations_.size(); ++ri) {
      const Relation rel = relations_[ri];
      std::string rel_text = rel.m + " · " + rel.x + " = " + rel.result.str();
      std::vector<std::pair<std::string, std::string>> orient{{rel.m, rel.x}};
      if (rel.x != rel.m) orient.push_back({rel.x, rel.m});
      for (auto& [m, x] : orient) {
        if (!is_permanent(m)) continue;
        std::vector<std::string> base{rel.id};
        if (m != "1") base.push_back(permanent_fact_.at(m));
        if (rel.result.terms.size() != 1) {
          if (differential_from(x)) task("non-unique division", "relation " + rel_text + " has a composite right side", {rel.id});
          continue;
        }
        const Term y = rel.result.terms[0];
        int cinv = inverse(mod(y.coef, p_), p_);
        // Mode A: d(x) known, so d(λ^k y) = ± m · d(x)
        if (auto* dx = differential_from(x)) {
          std::vector<std::string> used;
          std::string missing;
          auto mz = product(m, dx->target, &used, &missing);
          if (!mz) {
            task("unknown product", "need " + missing + " to push " + fact_summary(dx->id) + " along " + rel_text,
                 {rel.id, dx->id});
            continue;
          }
          Element rhs = scale(*mz, sign_of(m) * cinv, 0, p_);
          if (rhs.zero()) continue;
          if (rhs.min_lambda() < y.k) {
            task("no solution", "m · d(x) = " + rhs.str() + " is not divisible by lambda^" + std::to_string(y.k) +
                                    " (from " + rel_text + ")", {rel.id, dx->id});
            continue;
          }
          Element dy = normalize(scale(rhs, 1, -y.k, p_));
          if (y.k > 0) {
            auto tdeg = classes_.at(y.name).deg + differential_shift(kind_, dx->r);
            std::vector<std::string> amb;
            for (auto& c : page_candidates(tdeg, dx->r)) {
              int e = classes_.at(c.name).torsion;
              if (e > 0 && c.k + y.k >= e) amb.push_back(Element{{c}}.str());
            }
            if (!amb.empty()) {
              std::string list;
              for (auto& s : amb) list += (list.empty() ? "" : ", ") + s;
              task("ambiguous lambda division", "dividing " + rhs.str() + " by lambda^" + std::to_string(y.k) +
                                                    " is ambiguous up to " + list, {rel.id, dx->id});
              continue;
            }
          }
          if (dy.zero()) continue;
          auto parents = base;
          parents.push_back(dx->id);
          parents.insert(parents.end(), used.begin(), used.end());
          emit(dx->r, y.name, dy, parents, "Leibniz: " + rel_text + " and " + fact_summary(dx->id));
          continue;
        }
        // Mode B: d(y) known, x unknown, so m · d(x) = ± λ^k d(y)
        auto* dyf = differential_from(y.name);
        if (!dyf || is_permanent(x)) continue;
        int kp = 0;
        if (killed(x, &kp) && kp <= dyf->r) continue;
        Element rhs = normalize(scale(dyf->target, sign_of(m) * y.coef, y.k, p_));
        if (rhs.zero()) continue;
        auto tdeg = classes_.at(x).deg + differential_shift(kind_, dyf->r);
        auto cands = page_candidates(tdeg, dyf->r);
        std::vector<Element> cols;
        std::vector<std::string> used, missing_list;
        for (auto& c : cands) {
          std::string missing;
          auto pr = product(m, Element{{c}}, &used, &missing);
          if (!pr) missing_list.push_back(missing);
          else cols.push_back(*pr);
        }
        std::string what = "dividing " + rhs.str() + " by " + m + " in " + tdeg.str() + " (from " + rel_text +
                           " and " + fact_summary(dyf->id) + ")";
        if (!missing_list.empty()) {
          std::string list;
          for (auto& s : missing_list) list += (list.empty() ? "" : ", ") + s;
          task("unknown product", what + " needs " + list, {rel.id, dyf->id});
          continue;
        }
        auto sol = solve(cols, rhs, p_);
        if (!sol) {
          task("no solution", what + ": no class has the required product", {rel.id, dyf->id});
          continue;
        }
        if (sol->second > 0) {
          std::string list;
          for (auto& c : cands) list += (list.empty() ? "" : ", ") + Element{{c}}.str();
          task("non-unique division", what + ": candidates " + list, {rel.id, dyf->id});
          continue;
        }
        std::vector<Term> ts;
        for (size_t i = 0; i < cands.size(); ++i)
          if (sol->first[i]) ts.push_back({sol->first[i], cands[i].k, cands[i].name});
        auto parents = base;
        parents.push_back(dyf->id);
        parents.insert(parents.end(), used.begin(), used.end());
        emit(dyf->r, x, canonical(ts, p_), parents, "Leibniz: " + rel_text + " and " + fact_summary(dyf->id));
      }
    }
  }
  tasks_ = pass_tasks;
  rep.tasks = tasks_;
  return rep;
}

}  // namespace synss
