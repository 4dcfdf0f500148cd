#include <algorithm>
#include <functional>

#include "synss/deduce.hpp"

namespace synss {

using nlohmann::json;

ConsistencyReport Session::check_consistency(const Session* quotient) const {
  ConsistencyReport rep;
  auto& bad = rep.problems;
  // degrees
  for (auto& r : relations_)
    if (!r.result.zero() && degree(r.result) != classes_.at(r.m).deg + classes_.at(r.x).deg)
      bad.push_back("degree: relation " + fact_summary(r.id));
  for (auto& d : diffs_)
    if (degree(d.target) != classes_.at(d.source).deg + differential_shift(kind_, d.r))
      bad.push_back("degree: " + fact_summary(d.id));
  for (auto& x : exts_) {
    ChartDegree md = x.kind == ExtKind::Lambda ? kLambdaDegree : cls(multiplier_of(x.kind)).deg;
    auto naive = classes_.at(x.source).deg + md;
    auto td = degree(x.target);
    if (td.stem != naive.stem || td.w != naive.w || td.f < naive.f) bad.push_back("degree: " + fact_summary(x.id));
  }
  // one page per class
  for (auto& d : diffs_)
    for (auto& o : diffs_)
      for (auto& t : o.target.terms)
        if (t.name == d.source && t.k == 0 && o.r == d.r)
          bad.push_back("page: " + d.source + " both supports and receives a d_" + std::to_string(d.r));
  // provenance chains end in imported/asserted facts (or in a linked session)
  std::function<bool(const std::string&, std::set<std::string>&)> grounded = [&](const std::string& id,
                                                                                 std::set<std::string>& path) {
    if (id.find(':') != std::string::npos) return true;
    auto* f = fact(id);
    if (!f || path.count(id)) return false;
    if (f->provenance == Provenance::Imported || f->provenance == Provenance::Asserted) return true;
    if (f->parents.empty()) return false;
    path.insert(id);
    bool ok = std::all_of(f->parents.begin(), f->parents.end(), [&](auto& p) { return grounded(p, path); });
    path.erase(id);
    return ok;
  };
  auto check_fact = [&](const FactBase& f) {
    std::set<std::string> path;
    if (!grounded(f.id, path)) bad.push_back("provenance: " + f.id + " (" + fact_summary(f.id) + ") is not grounded");
  };
  for (auto& f : relations_) check_fact(f);
  for (auto& f : diffs_) check_fact(f);
  for (auto& f : exts_) check_fact(f);
  for (auto& f : qvals_) check_fact(f);
  for (auto& f : permanence_) check_fact(f);
  // λ-torsion audit on the chart of S: a λ-torsion class alive at E_∞ must be
  // hit by q, carry a hidden λ-extension, or owe its torsion to a differential.
  if (kind_ == ChartKind::ANSS_S)
    for (auto& name : class_order_) {
      if (einf_torsion(name) == 0 || !alive_at_einf(name)) continue;
      bool explained = false;
      for (auto& d : diffs_)
        for (auto& t : d.target.terms) explained |= t.name == name && t.k > 0;
      for (auto& x : exts_) explained |= x.kind == ExtKind::Lambda && x.source == name;
      if (quotient)
        for (auto& q : quotient->q_values())
          for (auto& t : q.value.terms)
            if (t.name == name && quotient->alive_at_einf(q.source)) explained = true;
      if (!explained)
        bad.push_back("gap: λ-torsion class " + name + " " + classes_.at(name).deg.str() +
                      " survives to E_inf without a q-preimage or a λ-extension");
    }
  return rep;
}

namespace {

json terms_json(const Element& e) {
  auto a = json::array();
  for (auto& t : e.terms) a.push_back({{"coef", t.coef}, {"lambda", t.k}, {"name", t.name}});
  return a;
}

json fact_json(const FactBase& f) {
  return {{"id", f.id}, {"provenance", to_string(f.provenance)}, {"cite", f.cite}, {"parents", f.parents}};
}

}  // namespace

json Session::export_chart() const {
  json j;
  j["schema"] = "synss.chart/1";
  int smin = 0, smax = 0, fmax = 0;
  for (auto& [n, c] : classes_) {
    smin = std::min(smin, c.deg.stem);
    smax = std::max(smax, c.deg.stem);
    fmax = std::max(fmax, c.deg.f);
  }
  j["metadata"] = {{"id", id_}, {"prime", p_}, {"kind", to_string(kind_)},
                   {"range", {{"stem_min", smin}, {"stem_max", smax}, {"f_max", fmax}}},
                   {"collapse_page", last_page() + 1}, {"open_tasks", tasks_.size()}};
  std::vector<const ClassEntry*> cs;
  for (auto& [n, c] : classes_) cs.push_back(&c);
  std::sort(cs.begin(), cs.end(), [](auto* a, auto* b) {
    return std::tie(a->deg.stem, a->deg.f, a->deg.w, a->name) < std::tie(b->deg.stem, b->deg.f, b->deg.w, b->name);
  });
  std::map<std::string, std::vector<std::string>> al;
  for (auto& [a, n] : aliases_) al[n].push_back(a);
  auto& classes = j["classes"] = json::array();
  for (auto* c : cs) {
    json x{{"id", c->name}, {"name", c->name}, {"stem", c->deg.stem}, {"f", c->deg.f}, {"w", c->deg.w},
           {"torsion", c->torsion}, {"einf_torsion", einf_torsion(c->name)}, {"status", status(c->name)},
           {"permanent", c->permanent}, {"aliases", al[c->name]}};
    if (c->expr) x["expr"] = *c->expr;
    classes.push_back(x);
  }
  auto& lines = j["lines"] = json::array();
  for (auto& r : relations_) {
    if (r.m != "h" && r.m != "alpha_1" && r.m != "alpha_{2/2}") continue;
    if (r.result.terms.size() != 1) continue;
    auto& t = r.result.terms[0];
    lines.push_back({{"fact", r.id}, {"multiplier", r.m}, {"source", r.x}, {"target", t.name}, {"lambda", t.k}});
  }
  auto& rel = j["relations"] = json::array();
  for (auto& r : relations_) {
    auto x = fact_json(r);
    x["m"] = r.m;
    x["x"] = r.x;
    x["result"] = r.result.str();
    rel.push_back(x);
  }
  auto& ds = j["differentials"] = json::array();
  for (auto& d : diffs_) {
    auto x = fact_json(d);
    x["r"] = d.r;
    x["source"] = d.source;
    x["target"] = d.target.str();
    x["terms"] = terms_json(d.target);
    x["lambda_exponent"] = d.target.min_lambda();
    ds.push_back(x);
  }
  auto& es = j["extensions"] = json::array();
  for (auto& e : exts_) {
    auto x = fact_json(e);
    x["kind"] = to_string(e.kind);
    x["source"] = e.source;
    x["target"] = e.target.str();
    x["terms"] = terms_json(e.target);
    x["level"] = e.level;
    es.push_back(x);
  }
  auto& qs = j["q_values"] = json::array();
  for (auto& q : qvals_) {
    auto x = fact_json(q);
    x["source"] = q.source;
    x["value"] = q.value.str();
    qs.push_back(x);
  }
  auto& ps = j["permanent"] = json::array();
  for (auto& [n, id] : permanent_fact_) ps.push_back({{"class", n}, {"fact", id}});
  auto& ts = j["tasks"] = json::array();
  for (auto& t : tasks_) ts.push_back({{"kind", t.kind}, {"text", t.text}, {"facts", t.facts}});
  return j;
}

// ---------------------------------------------------------------- comparison maps

namespace {

std::string ext_ref(const Session& s, const std::string& id) { return s.id() + ":" + id; }

std::optional<ExtKind> kind_for_multiplier(const std::string& m) {
  if (m == "h") return ExtKind::TwoH;
  if (m == "alpha_1") return ExtKind::Alpha1;
  if (m == "alpha_{2/2}") return ExtKind::Alpha22;
  if (m == "lambda") return ExtKind::Lambda;
  return std::nullopt;
}

const QRecord* q_of(const Session& q, const std::string& name) {
  for (auto& r : q.q_values())
    if (r.source == name) return &r;
  return nullptr;
}

}  // namespace

QModuleReport q_module_check(const Session& s, const Session& smod) {
  QModuleReport rep;
  const ChartDegree q_shift{-1, 1, 1};
  std::set<std::string> valid;
  for (auto& q : smod.q_values()) {
    ++rep.checked;
    std::string shown = "q(" + q.source + ") = " + q.value.str();
    try {
      Element v;
      for (auto t : q.value.terms) {
        t.name = s.resolve(t.name);
        v.terms.push_back(t);
      }
      if (v.zero()) {
        valid.insert(q.source);
        continue;
      }
      auto want = smod.cls(q.source).deg + q_shift;
      auto got = s.degree(v);
      if (got != want) {
        rep.violations.push_back(shown + ": value lies in " + got.str() + ", q lands in " + want.str());
        continue;
      }
      valid.insert(q.source);
    } catch (const DeductionError& e) {
      rep.violations.push_back(shown + ": " + e.what());
    }
  }
  for (auto& r : smod.relations()) {
    auto* qx = q_of(smod, r.x);
    if (!qx || !valid.count(r.x)) continue;
    // q(Y) from the recorded values of the terms of Y (λ acts by zero on S/λ)
    Element qy;
    bool known = true;
    std::vector<std::string> parents{ext_ref(smod, r.id), ext_ref(smod, qx->id)};
    for (auto& t : r.result.terms) {
      auto* qt = q_of(smod, t.name);
      if (t.k > 0 || !qt || !valid.count(t.name)) {
        known = false;
        break;
      }
      parents.push_back(ext_ref(smod, qt->id));
      for (auto u : qt->value.terms) {
        u.coef *= t.coef;
        u.name = s.resolve(u.name);
        qy.terms.push_back(u);
      }
    }
    if (!known) continue;
    qy = s.normalize(Element::parse(qy.zero() ? "0" : qy.str()));
    Element qxv;
    for (auto u : qx->value.terms) {
      u.name = s.resolve(u.name);
      qxv.terms.push_back(u);
    }
    qxv = s.normalize(Element::parse(qxv.zero() ? "0" : qxv.str()));
    std::string shown = "q(" + r.m + " · " + r.x + ") = " + r.m + " · q(" + r.x + ")";
    if (qxv.zero()) {
      if (!qy.zero()) rep.violations.push_back(shown + ": q(" + r.x + ") = 0 but q of the product is " + qy.str());
      continue;
    }
    if (!s.has_class(r.m) && r.m != "lambda") {
      rep.notes.push_back(shown + ": multiplier " + r.m + " is not on the chart of S");
      continue;
    }
    std::string missing;
    auto prod = s.product(r.m, qxv, nullptr, &missing);
    if (prod) {
      if (*prod != qy) rep.violations.push_back(shown + ": " + r.m + " · " + qxv.str() + " = " + prod->str() +
                                                " on S, but q gives " + qy.str());
      continue;
    }
    if (qy.zero()) {
      rep.notes.push_back(shown + ": forces " + r.m + " · " + qxv.str() + " = 0");
      continue;
    }
    auto kind = kind_for_multiplier(s.resolve(r.m));
    if (!kind || qxv.terms.size() != 1 || qxv.terms[0].k != 0) {
      rep.notes.push_back(shown + ": forced product " + r.m + " · " + qxv.str() + " = " + qy.str() +
                          " is not a recordable extension");
      continue;
    }
    HiddenExtension x;
    x.kind = *kind;
    x.source = qxv.terms[0].name;
    x.target = qy;
    x.level = "E2";
    x.provenance = Provenance::QMap;
    x.parents = parents;
    x.cite = "q is a module map: " + r.m + " · " + r.x + " = " + r.result.str() + " on " + smod.id();
    auto naive = s.cls(x.source).deg + (x.kind == ExtKind::Lambda ? kLambdaDegree : s.cls(r.m).deg);
    auto td = s.degree(qy);
    if (td.stem != naive.stem || td.w != naive.w || td.f < naive.f) {
      rep.violations.push_back(shown + ": forced extension to " + qy.str() + " has inconsistent degree");
      continue;
    }
    rep.forced.push_back(x);
  }
  return rep;
}

TransferReport transfer_via_i(const Session& s, const Session& smod) {
  TransferReport rep;
  auto lift = [&](const std::string& n) -> std::optional<std::string> {
    if (!s.has_class(n)) return std::nullopt;
    auto m = s.resolve(n);
    if (s.cls(m).deg != smod.cls(n).deg) return std::nullopt;
    return m;
  };
  auto lift_element = [&](const Element& e) -> std::optional<Element> {
    Element out;
    for (auto t : e.terms) {
      auto m = lift(t.name);
      if (!m || t.k != 0) return std::nullopt;
      t.name = *m;
      out.terms.push_back(t);
    }
    return Element::parse(out.str());
  };
  struct Lift {
    const Differential* d;
    Differential x;
    std::string shown;
  };
  std::vector<Lift> lifted;
  for (auto& d : smod.differentials()) {
    auto src = lift(d.source);
    auto tgt = lift_element(d.target);
    std::string shown = "d_" + std::to_string(d.r) + "(" + d.source + ") = " + d.target.str();
    if (!src || !tgt) {
      rep.skipped.push_back(shown + ": no i-preimage on " + s.id());
      continue;
    }
    Differential x;
    x.r = d.r;
    x.source = *src;
    x.target = *tgt;
    x.provenance = Provenance::QMap;
    x.parents = {ext_ref(smod, d.id)};
    x.cite = "i-transfer of " + shown + " from " + smod.id();
    lifted.push_back({&d, x, shown});
  }
  std::vector<Differential> batch;
  for (auto& l : lifted) batch.push_back(l.x);
  for (auto& [d, x, shown] : lifted) {
    // i(y) determines y only up to λ-multiples in the target degree
    auto tdeg = s.cls(x.source).deg + differential_shift(s.kind(), x.r);
    std::vector<std::string> amb;
    for (auto& c : s.page_candidates(tdeg, x.r, batch))
      if (c.k > 0) amb.push_back(Element{{c}}.str());
    if (!amb.empty()) {
      std::string list;
      for (auto& a : amb) list += (list.empty() ? "" : ", ") + a;
      rep.tasks.push_back({"ambiguous lift", shown + " lifts only modulo " + list, {d->id}});
      continue;
    }
    rep.differentials.push_back(x);
  }
  for (auto& e : smod.extensions()) {
    if (e.level != "Einf") continue;
    auto src = lift(e.source);
    auto tgt = lift_element(e.target);
    std::string shown = to_string(e.kind) + "-extension " + e.source + " -> " + e.target.str();
    if (!src || !tgt) {
      rep.skipped.push_back(shown + ": no i-preimage on " + s.id());
      continue;
    }
    HiddenExtension x = e;
    x.id.clear();
    x.source = *src;
    x.target = *tgt;
    x.provenance = Provenance::QMap;
    x.parents = {ext_ref(smod, e.id)};
    x.cite = "i is multiplicative: " + shown + " on " + smod.id();
    rep.extensions.push_back(x);
  }
  return rep;
}

std::vector<std::string> apply_forced(Session& s, const QModuleReport& r) {
  std::vector<std::string> ids;
  for (auto& x : r.forced) {
    auto id = s.assert_hidden_extension(x.kind, x.source, x.target, x.level, x.provenance, x.cite, x.parents);
    if (!id.empty()) ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> apply_transfer(Session& s, const TransferReport& r) {
  std::vector<std::string> ids;
  for (auto& d : r.differentials) {
    auto id = s.assert_differential(d.r, d.source, d.target, d.provenance, d.cite, d.parents);
    if (!id.empty()) ids.push_back(id);
  }
  for (auto& x : r.extensions) {
    auto id = s.assert_hidden_extension(x.kind, x.source, x.target, x.level, x.provenance, x.cite, x.parents);
    if (!id.empty()) ids.push_back(id);
  }
  return ids;
}

// ---------------------------------------------------------------- comparison targets

ComparisonTarget ComparisonTarget::from_ext_table(const ExtTable& t) {
  ComparisonTarget c;
  c.name = t.presentation;
  for (auto& e : t.entries) c.dims[{e.t - e.f, e.f}] += e.dim;
  return c;
}

ComparisonTarget ComparisonTarget::read_jsonl(std::istream& in) {
  ComparisonTarget c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = json::parse(line);
      std::string kind = j.at("kind");
      if (kind == "target") {
        c.name = j.at("name");
      } else if (kind == "dim") {
        c.dims[{j.at("stem"), j.at("s")}] = j.at("dim");
      } else if (kind == "product") {
        Product p{j.at("m"), j.at("x"), j.at("y"), std::nullopt, std::nullopt};
        if (j.contains("x_deg")) p.x_deg = std::make_pair(j["x_deg"].at(0).get<int>(), j["x_deg"].at(1).get<int>());
        if (j.contains("y_deg")) p.y_deg = std::make_pair(j["y_deg"].at(0).get<int>(), j["y_deg"].at(1).get<int>());
        c.products.push_back(p);
      } else {
        throw ParseError("unknown kind '" + kind + "'");
      }
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

ComparisonReport infer_hidden_from_comparison(Session& sess, const ComparisonTarget& target) {
  ComparisonReport rep;
  auto by_deg = [&](const std::optional<std::pair<int, int>>& d) {
    std::vector<std::string> out;
    if (!d) return out;
    for (auto& n : sess.class_order()) {
      auto& c = sess.cls(n).deg;
      if (c.stem == d->first && c.w - c.stem == d->second) out.push_back(n);
    }
    return out;
  };
  for (auto& p : target.products) {
    ComparisonReport::Item it;
    it.product = p.m + " · " + p.x + " = " + p.y;
    auto res = [&](const std::string& n) -> std::optional<std::string> {
      if (!sess.has_class(n)) return std::nullopt;
      return sess.resolve(n);
    };
    auto m = res(p.m), x = res(p.x), y = res(p.y);
    if (!m || !x || !y) {
      it.status = "unresolved";
      it.detail = "no chart name for";
      for (auto* n : {&p.m, &p.x, &p.y})
        if (!res(*n)) it.detail += " " + *n;
      it.candidate_sources = by_deg(p.x_deg);
      it.candidate_targets = by_deg(p.y_deg);
      rep.items.push_back(it);
      continue;
    }
    auto kind = kind_for_multiplier(*m);
    if (!kind) {
      it.status = "rejected";
      it.detail = *m + " is not an extension multiplier";
      rep.items.push_back(it);
      continue;
    }
    auto prod = sess.product(*m, Element::of(*x));
    bool witnessed = prod && *prod == Element::of(*y);
    for (auto& e : sess.extensions())
      witnessed |= e.kind == *kind && e.source == *x && e.target == Element::of(*y);
    if (witnessed) {
      it.status = "witnessed";
      rep.items.push_back(it);
      continue;
    }
    try {
      auto id = sess.assert_hidden_extension(*kind, *x, Element::of(*y), "Einf", Provenance::Imported,
                                             "comparison with " + target.name + ": " + it.product);
      it.status = "recorded";
      it.detail = id;
      if (!id.empty()) rep.recorded.push_back(id);
    } catch (const DeductionError& e) {
      it.status = "rejected";
      it.detail = e.what();
    }
    rep.items.push_back(it);
  }
  return rep;
}

// ---------------------------------------------------------------- classical data

void import_classical(Session& sess, const ClassicalData& data) {
  if (sess.kind() != ChartKind::aNSS) throw DeductionError("invalid", "classical data belongs on an aNSS chart");
  for (auto& c : data.classes) {
    auto q = assign_weight(c);
    sess.add_class(c.name, {c.t - c.f, c.f, q.w}, 0, c.expr);
  }
  for (auto& d : data.diffs) {
    Element e;
    for (auto& [coef, n] : d.target.terms) e.terms.push_back({coef, 0, n});
    sess.assert_differential(d.r, d.source, Element::parse(e.str()), Provenance::Imported,
                             d.convention_declared ? "classical aNSS data" : "classical aNSS data (page convention undeclared)");
  }
}

ClassicalData export_classical(const Session& sess) {
  ClassicalData out;
  for (auto& n : sess.class_order()) {
    auto& c = sess.cls(n);
    int t = c.deg.stem + c.deg.f;
    out.classes.push_back({n, c.deg.f, c.deg.w - t, t, c.expr});
  }
  for (auto& d : sess.differentials()) {
    ClassicalDifferential cd;
    cd.r = d.r;
    cd.source = d.source;
    for (auto& t : d.target.terms) cd.target.terms.push_back({t.coef, t.name});
    cd.convention_declared = d.cite.find("undeclared") == std::string::npos;
    out.diffs.push_back(cd);
  }
  return out;
}

}  // namespace synss
