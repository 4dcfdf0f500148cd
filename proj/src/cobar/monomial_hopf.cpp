#include <algorithm>
#include <functional>

#include "synss/cobar.hpp"

namespace synss {

namespace {

// All monomials of degree <= t_max in the given generators (exterior ones capped at 1).
std::vector<Monomial> monomials_through(const Presentation& pres, const std::vector<int>& gens, int t_max) {
  std::vector<Monomial> out;
  std::vector<Monomial::Entry> cur;
  std::function<void(size_t, int)> rec = [&](size_t k, int t) {
    if (k == gens.size()) {
      out.push_back(Monomial(cur));
      return;
    }
    const Generator& g = pres.gen(gens[k]);
    int cap = g.kind == GenKind::Exterior ? 1 : (g.deg.t > 0 ? (t_max - t) / g.deg.t : 0);
    for (int e = 0; e <= cap && t + e * g.deg.t <= t_max; ++e) {
      if (e) cur.push_back({static_cast<uint16_t>(gens[k]), e});
      rec(k + 1, t + e * g.deg.t);
      if (e) cur.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace

MonomialHopfAlgebra::MonomialHopfAlgebra(HopfPtr h, int t_max) : h_(std::move(h)), t_max_(t_max) {
  const auto& hp = *h_;
  if (!hp.is_hopf_algebra() || hp.prime() != 2)
    throw std::invalid_argument("monomial Hopf algebra tables need a p = 2 Hopf algebra");
  const auto& pres = *hp.presentation();
  std::vector<int> gens;
  int top = 0;
  for (int g = 0; g < pres.size(); ++g) {
    top = std::max(top, pres.gen(g).deg.t);
    if (pres.gen(g).deg.t <= t_max) gens.push_back(g);
  }
  // The next generator beyond n_max would have degree 2*top+1 (or 2*top+2 on squares).
  if (top < t_max && 2 * top + 1 <= t_max)
    throw std::invalid_argument("n_max = " + std::to_string(hp.n_max()) + " too small for t_max = " + std::to_string(t_max));
  auto all = monomials_through(pres, gens, t_max);
  std::vector<std::pair<int, Monomial>> keyed;
  for (auto& m : all) keyed.push_back({monomial_degree(m, pres).t, m});
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return canonical_less(a.second, b.second, pres);
  });
  by_deg_.assign(t_max + 1, {});
  for (auto& [t, m] : keyed) {
    index_[m] = static_cast<int>(mono_.size());
    by_deg_[t].push_back(static_cast<int>(mono_.size()));
    mono_.push_back(m);
    deg_.push_back(t);
  }
  dbar_.resize(mono_.size());
  for (size_t i = 0; i < mono_.size(); ++i) {
    if (deg_[i] == 0) continue;
    Polynomial d = hp.coproduct(Polynomial::monomial(hp.ring(), mono_[i]));
    for (auto& t : d.terms()) {
      auto sp = hp.split_tensor(t.mono);
      if (sp.left.is_one() || sp.right.is_one()) continue;
      if (t.coef.mod_p(2) == 0) continue;
      dbar_[i].push_back({index_.at(sp.left), index_.at(sp.right)});
    }
    std::sort(dbar_[i].begin(), dbar_[i].end());
  }
}

int MonomialHopfAlgebra::index_of(const Monomial& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : it->second;
}

bool MonomialHopfAlgebra::in_square_ideal(int i) const {
  for (auto& [g, e] : mono_[i].entries())
    if (e >= 2) return true;
  return false;
}

std::string MonomialHopfAlgebra::label(int i) const {
  std::string s = format_monomial(mono_[i], *h_->presentation());
  return s.empty() ? "1" : s;
}

F2Comodule F2Comodule::trivial() {
  F2Comodule m;
  m.labels = {"1"};
  m.degree = {0};
  m.reduced_coaction = {{}};
  return m;
}

F2Comodule F2Comodule::from_spec(const ComoduleSpec& spec, const MonomialHopfAlgebra& a, int t_max) {
  if (spec.side != ComoduleSpec::Side::Left) throw std::invalid_argument("F_2 cobar coefficients must be a left comodule");
  if (spec.coalgebra_id != a.hopf().id()) throw PresentationMismatch("comodule is over " + spec.coalgebra_id);
  const auto& mp = *spec.module;
  std::vector<int> gens;
  for (int g = 0; g < mp.size(); ++g)
    if (mp.gen(g).deg.t <= t_max) gens.push_back(g);
  auto all = monomials_through(mp, gens, t_max);
  std::vector<std::pair<int, Monomial>> keyed;
  for (auto& m : all) keyed.push_back({monomial_degree(m, mp).t, m});
  std::sort(keyed.begin(), keyed.end(), [&](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return canonical_less(x.second, y.second, mp);
  });
  F2Comodule out;
  std::map<Monomial, int> index;
  for (auto& [t, m] : keyed) {
    index[m] = static_cast<int>(out.labels.size());
    std::string l = format_monomial(m, mp);
    out.labels.push_back(l.empty() ? "1" : l);
    out.degree.push_back(t);
  }
  out.reduced_coaction.resize(out.labels.size());
  for (auto& [t, m] : keyed) {
    // multiplicative extension of the generator coactions, mod 2
    std::map<std::pair<Monomial, Monomial>, int> acc{{{Monomial(), Monomial()}, 1}};
    for (auto& [g, e] : m.entries())
      for (int r = 0; r < e; ++r) {
        std::map<std::pair<Monomial, Monomial>, int> next;
        for (auto& [k, c] : acc)
          for (auto& term : spec.coaction[g]) {
            int cc = static_cast<int>(term.coef.mod_p(2));
            if (!cc) continue;
            next[{k.first * term.coalg_part, k.second * term.module_part}] ^= c;
          }
        acc = std::move(next);
      }
    int i = index.at(m);
    for (auto& [k, c] : acc) {
      if (!c || k.first.is_one()) continue;
      int ai = a.index_of(k.first), mi = index.at(k.second);
      if (ai < 0) throw std::logic_error("coaction leaves the truncation");
      out.reduced_coaction[i].push_back({ai, mi});
    }
    std::sort(out.reduced_coaction[i].begin(), out.reduced_coaction[i].end());
  }
  return out;
}

}  // namespace synss
